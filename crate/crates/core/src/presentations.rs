//! Ring presentations attached to a stacky fan over a twisted base:
//! the character ring of the minimal quotient group, the Grothendieck
//! K-theory presentation, and the Chen-Ruan cohomology presentation with
//! its sector decomposition.

use crate::error::{Error, Result};
use crate::fan::Cone;
use crate::lattice::{FgAbelianGroup, GaleDual, GroupElement, GroupHom, IntMatrix, QMatrix};
use crate::polyring::groebner::{groebner_capped, normal_form, quotient_basis, GroebnerBasis, Ideal};
use crate::polyring::poly::{Monomial, MonomialOrder, Poly, Table, VarTableBuilder};
use crate::polyring::scalar::{CycField, Field};
use crate::stackyfan::{BoxElement, QuotientStackyFan, StackyFan};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// A presented quotient ring with its Groebner data.
#[derive(Clone, Debug)]
pub struct RingPresentation {
    pub table: Table,
    pub field: Field,
    pub relations: Vec<Poly>,
    pub order: MonomialOrder,
    pub gb: GroebnerBasis,
    /// Standard monomials; `None` when the quotient is infinite-dimensional.
    pub qbasis: Option<Vec<Monomial>>,
}

impl RingPresentation {
    pub fn new(table: Table, field: Field, relations: Vec<Poly>, order: MonomialOrder, max_pairs: usize) -> Result<Self> {
        let gb = groebner_capped(&Ideal::new(relations.clone(), order), max_pairs)?;
        let qbasis = quotient_basis(&gb, table.len());
        Ok(RingPresentation { table, field, relations, order, gb, qbasis })
    }

    /// Dimension over the coefficient field, when finite.
    pub fn dimension(&self) -> Option<usize> {
        self.qbasis.as_ref().map(|b| b.len())
    }

    pub fn nf(&self, p: &Poly) -> Poly {
        normal_form(p, &self.gb)
    }

    /// Coordinates of an element in the standard monomial basis.
    pub fn coordinates(&self, p: &Poly) -> Vec<crate::polyring::scalar::Scalar> {
        let basis = self.qbasis.as_ref().expect("finite quotient required");
        let n = self.nf(p);
        basis.iter().map(|m| n.coefficient(m)).collect()
    }

    /// The same presentation over a larger coefficient field.
    pub fn extend_field(&self, field: &Field) -> Result<RingPresentation> {
        let relations: Vec<Poly> = self.relations.iter().map(|p| p.extend_field(field)).collect();
        RingPresentation::new(self.table.clone(), field.clone(), relations, self.order, crate::polyring::DEFAULT_PAIR_CAP)
    }

    /// Rank of the quotient as a module over a local Artinian base ring
    /// presented on the listed variables. The fiber dimension comes from
    /// specializing every base variable to its augmentation value; freeness
    /// over a local Artinian ring is exactly the length count
    /// `total = rank * base`. Returns `None` when the module is not free.
    ///
    /// `augmentation`: the residue value of each base variable (1 on K-theory
    /// classes, 0 on positive-degree cohomology classes).
    pub fn free_rank_over_local_base(
        &self,
        base_vars: &[usize],
        augmentation: &[i64],
        base_dim: usize,
        max_pairs: usize,
    ) -> Result<Option<usize>> {
        let total = match self.dimension() {
            Some(t) => t,
            None => return Ok(None),
        };
        let mut relations = self.relations.clone();
        for (&v, &a) in base_vars.iter().zip(augmentation) {
            relations.push(
                Poly::var(&self.table, &self.field, v).sub(&Poly::from_int(&self.table, &self.field, a)),
            );
        }
        let fiber = RingPresentation::new(
            self.table.clone(),
            self.field.clone(),
            relations,
            self.order,
            max_pairs,
        )?;
        let fiber_dim = match fiber.dimension() {
            Some(f) => f,
            None => return Ok(None),
        };
        if fiber_dim * base_dim == total {
            Ok(Some(fiber_dim))
        } else {
            Ok(None)
        }
    }
}

/// How the base ring came to be; built-ins carry their Chern character data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseKind {
    Point,
    Projective(u32),
    Custom,
}

/// The two presented base rings: the K-theory of the base with distinguished
/// unit classes, and its cohomology with the matching first Chern classes.
#[derive(Clone, Debug)]
pub struct TwistSpec {
    pub kind: BaseKind,
    pub k_table: Table,
    pub k_relations: Vec<Poly>,
    pub h_table: Table,
    pub h_relations: Vec<Poly>,
    /// Distinguished invertible classes, one per basis functional (length d).
    pub xi: Vec<Poly>,
    pub xi_inv: Vec<Poly>,
    /// First Chern classes of the distinguished bundles, in the cohomology table.
    pub c1: Vec<Poly>,
}

impl TwistSpec {
    /// Trivial twist over a point.
    pub fn point(d: usize) -> TwistSpec {
        let field = CycField::rational();
        let k_table = VarTableBuilder::new().build();
        let h_table = VarTableBuilder::new().build();
        let one = Poly::one(&k_table, &field);
        let zero = Poly::zero(&h_table, &field);
        TwistSpec {
            kind: BaseKind::Point,
            k_table: k_table.clone(),
            k_relations: vec![],
            h_table,
            h_relations: vec![],
            xi: vec![one.clone(); d],
            xi_inv: vec![one; d],
            c1: vec![zero; d],
        }
    }

    /// Base projective space of dimension `r` with hyperplane class data:
    /// K-theory `Z[h, h_inv]/((h-1)^{r+1})`, cohomology `Q[H]/(H^{r+1})`.
    /// The i-th distinguished class is `O(powers[i])`.
    pub fn projective(r: u32, powers: &[i64]) -> TwistSpec {
        let field = CycField::rational();
        let mut kb = VarTableBuilder::new();
        let (h, hi) = kb.add_unit("h", None);
        let k_table = kb.build();
        let mut hb = VarTableBuilder::new();
        let cap_h = hb.add("H", Some(BigRational::from_integer(BigInt::from(2))));
        let h_table = hb.build();
        let hm1 = Poly::var(&k_table, &field, h).sub(&Poly::one(&k_table, &field));
        // the unit relation h * h_inv = 1 is added by consumers for every
        // declared unit pair
        let k_relations = vec![hm1.pow(r + 1)];
        let h_relations = vec![Poly::var(&h_table, &field, cap_h).pow(r + 1)];
        let mut xi = Vec::new();
        let mut xi_inv = Vec::new();
        let mut c1 = Vec::new();
        for &p in powers {
            let (fwd, bwd) = if p >= 0 { (h, hi) } else { (hi, h) };
            let e = p.unsigned_abs() as u32;
            xi.push(Poly::var(&k_table, &field, fwd).pow(e));
            xi_inv.push(Poly::var(&k_table, &field, bwd).pow(e));
            c1.push(
                Poly::var(&h_table, &field, cap_h)
                    .mul_scalar(&field.from_rational(BigRational::from_integer(BigInt::from(p)))),
            );
        }
        TwistSpec {
            kind: BaseKind::Projective(r),
            k_table,
            k_relations,
            h_table,
            h_relations,
            xi,
            xi_inv,
            c1,
        }
    }

    pub fn rank(&self) -> usize {
        self.xi.len()
    }

    /// All distinguished classes equal to 1 (no genuine twist).
    pub fn is_trivial_twist(&self) -> bool {
        self.xi.iter().all(|p| p.is_one())
    }

    /// Check the structural invariants: `xi * xi_inv = 1` in the base
    /// K-theory and each `c1` nilpotent in the base cohomology.
    pub fn validate(&self, max_pairs: usize) -> Result<()> {
        let field = CycField::rational();
        let k_pres = RingPresentation::new(
            self.k_table.clone(),
            field.clone(),
            with_unit_relations(&self.k_table, &field, self.k_relations.clone()),
            MonomialOrder::GrevLex,
            max_pairs,
        )?;
        for (x, xi_inv) in self.xi.iter().zip(&self.xi_inv) {
            let prod = x.mul(xi_inv).sub(&Poly::one(&self.k_table, &field));
            if !k_pres.nf(&prod).is_zero() {
                return Err(Error::invalid("xi * xi_inv is not 1 in the base K-theory"));
            }
        }
        let h_pres = RingPresentation::new(
            self.h_table.clone(),
            field.clone(),
            self.h_relations.clone(),
            MonomialOrder::GrevLex,
            max_pairs,
        )?;
        let hdim = h_pres
            .dimension()
            .ok_or_else(|| Error::invalid("base cohomology must be finite-dimensional"))?;
        for c in &self.c1 {
            let mut p = Poly::one(&self.h_table, &field);
            let mut nilpotent = false;
            for _ in 0..=hdim {
                p = h_pres.nf(&p.mul(c));
                if p.is_zero() {
                    nilpotent = true;
                    break;
                }
            }
            if !nilpotent {
                return Err(Error::invalid("a distinguished c1 class is not nilpotent"));
            }
        }
        Ok(())
    }
}

/// Append the `x * x_inv - 1` relations for every declared unit pair.
pub fn with_unit_relations(table: &Table, field: &Field, mut relations: Vec<Poly>) -> Vec<Poly> {
    for (x, xi) in table.unit_pairs() {
        let rel = Poly::var(table, field, x)
            .mul(&Poly::var(table, field, xi))
            .sub(&Poly::one(table, field));
        relations.push(rel);
    }
    relations
}

/// The group ring of the Gale dual of the minimal map, in normal-form
/// coordinates: Laurent units for the free part, torsion generators with
/// `w^q = 1`, and the images of the standard basis as monomials.
#[derive(Clone, Debug)]
pub struct CharacterRing {
    pub dual: GaleDual,
    pub table: Table,
    /// (variable, inverse) per free generator of the dual group.
    pub u_pairs: Vec<(usize, usize)>,
    /// One variable per torsion generator.
    pub w_vars: Vec<usize>,
    pub relations: Vec<Poly>,
    /// Monomial images of the standard basis vectors (one per ray).
    pub x_monomials: Vec<Poly>,
}

impl CharacterRing {
    /// The group-ring monomial of a dual-group element.
    pub fn monomial_of(&self, e: &GroupElement, field: &Field) -> Poly {
        assert_eq!(e.parent, self.dual.group);
        let mut exps = vec![0u32; self.table.len()];
        let fr = self.dual.group.free_rank;
        for (k, &(u, ui)) in self.u_pairs.iter().enumerate() {
            let c = &e.coords[k];
            if c.is_positive() {
                exps[u] = c.to_u32().expect("exponent fits");
            } else if c.is_negative() {
                exps[ui] = (-c).to_u32().expect("exponent fits");
            }
        }
        for (j, &w) in self.w_vars.iter().enumerate() {
            let c = &e.coords[fr + j];
            if c.is_positive() {
                exps[w] = c.to_u32().expect("exponent fits");
            }
        }
        Poly::monomial(&self.table, field, Monomial(exps), field.one())
    }
}

/// Character ring of the minimal quotient group (group ring of the Gale
/// dual of the ray map).
pub fn character_ring(sf: &StackyFan) -> Result<CharacterRing> {
    let field = CycField::rational();
    let dual = sf.gale_dual_min()?;
    let mut b = VarTableBuilder::new();
    let mut u_pairs = Vec::new();
    for k in 0..dual.group.free_rank {
        u_pairs.push(b.add_unit(format!("u{}", k + 1), None));
    }
    let mut w_vars = Vec::new();
    for j in 0..dual.group.torsion.len() {
        w_vars.push(b.add(format!("w{}", j + 1), None));
    }
    let table = b.build();
    let mut relations = with_unit_relations(&table, &field, Vec::new());
    for (j, q) in dual.group.torsion.iter().enumerate() {
        let e = q.to_u32().ok_or_else(|| Error::invalid("torsion order too large"))?;
        relations.push(
            Poly::var(&table, &field, w_vars[j])
                .pow(e)
                .sub(&Poly::one(&table, &field)),
        );
    }
    let ring = CharacterRing {
        dual: dual.clone(),
        table,
        u_pairs,
        w_vars,
        relations,
        x_monomials: Vec::new(),
    };
    let x_monomials = dual
        .dual_map
        .column_elements()
        .iter()
        .map(|e| ring.monomial_of(e, &field))
        .collect();
    Ok(CharacterRing { x_monomials, ..ring })
}

/// The distinguished lattice basis used by a nontrivial twist: primitive ray
/// generators of a unimodular top cone, with the matrix of dual functionals.
#[derive(Clone, Debug)]
pub struct DistinguishedBasis {
    /// Ray indices of the chosen top cone (empty for rank zero).
    pub cone: Vec<usize>,
    /// Rows are the dual-basis functionals on the free lattice.
    pub functionals: IntMatrix,
    /// Columns are the chosen lattice points on the rays.
    pub basis_vectors: IntMatrix,
}

/// Choose a top cone whose primitive ray generators form a lattice basis.
pub fn distinguished_basis(sf: &StackyFan) -> Result<DistinguishedBasis> {
    let d = sf.group().free_rank;
    if d == 0 {
        return Ok(DistinguishedBasis {
            cone: vec![],
            functionals: IntMatrix::identity(0),
            basis_vectors: IntMatrix::identity(0),
        });
    }
    for cone in sf.fan().top_cones() {
        let cols: Vec<Vec<BigInt>> = cone
            .iter()
            .map(|&i| crate::lattice::primitive_vector(&sf.fan().rays()[i]))
            .collect();
        let m = IntMatrix::from_columns(d, &cols);
        if m.is_unimodular() {
            let inv = unimodular_inverse(&m);
            return Ok(DistinguishedBasis {
                cone: cone.iter().copied().collect(),
                functionals: inv,
                basis_vectors: m,
            });
        }
    }
    Err(Error::NoUnimodularTopCone)
}

/// Inverse of a unimodular integer matrix (via the Smith transforms).
fn unimodular_inverse(m: &IntMatrix) -> IntMatrix {
    let (u, d, v) = m.smith_normal_form();
    // u m v = 1 or diag(+-1); fold the signs into u
    let n = m.rows();
    let mut su = u;
    for i in 0..n {
        if d.at(i, i) < &BigInt::zero() {
            for c in 0..n {
                let e = -su.at(i, c);
                su.set(i, c, e);
            }
        }
    }
    v.mul(&su)
}

/// The functionals used to index the relation ideals: for a trivial twist
/// the standard dual basis, otherwise the dual basis of the distinguished
/// unimodular cone. Rows of the returned matrix are the functionals.
fn relation_functionals(sf: &StackyFan, twist: &TwistSpec) -> Result<(IntMatrix, Option<DistinguishedBasis>)> {
    let d = sf.group().free_rank;
    if twist.is_trivial_twist() {
        Ok((IntMatrix::identity(d), None))
    } else {
        let db = distinguished_basis(sf)?;
        Ok((db.functionals.clone(), Some(db)))
    }
}

/// Which variables present the K-theory ring.
#[derive(Clone, Debug)]
pub enum KVariables {
    /// Torsion-free lattice: Laurent generators, one unit pair per ray.
    Reduced { x_pairs: Vec<(usize, usize)> },
    /// General lattice: normal-form coordinates on the dual group.
    General {
        u_pairs: Vec<(usize, usize)>,
        w_vars: Vec<usize>,
    },
}

/// The K-theory presentation of a stacky fan over a twisted base.
#[derive(Clone, Debug)]
pub struct KRing {
    pub presentation: RingPresentation,
    /// Class of each ray's line bundle in the presentation.
    pub x_classes: Vec<Poly>,
    /// Indices of the base K-theory variables inside the combined table.
    pub base_vars: Vec<usize>,
    pub variables: KVariables,
    /// The distinguished basis, when a nontrivial twist required one.
    pub basis_choice: Option<DistinguishedBasis>,
    /// Pairings `<theta_k, b_j>` used for the circle relations.
    pub theta_pairings: IntMatrix,
}

/// Build the K-theory presentation.
///
/// Relations: base K-theory relations, unit pairings, one Stanley-Reisner
/// product `prod_{i in I}(1 - x_i)` per primitive non-face `I`, and one
/// circle relation per basis functional `theta`:
/// `prod_j x_j^{<theta, b_j>} - prod_i xi_inv_i^{<theta, v_i>}`.
pub fn k_ring(sf: &StackyFan, twist: &TwistSpec) -> Result<KRing> {
    k_ring_capped(sf, twist, crate::polyring::DEFAULT_PAIR_CAP)
}

pub fn k_ring_capped(sf: &StackyFan, twist: &TwistSpec, max_pairs: usize) -> Result<KRing> {
    sf.validate()?;
    let d = sf.group().free_rank;
    if twist.rank() != d {
        return Err(Error::invalid(format!(
            "twist carries {} distinguished classes but the free rank is {}",
            twist.rank(),
            d
        )));
    }
    let field = CycField::rational();
    let (thetas, basis_choice) = relation_functionals(sf, twist)?;
    let n = sf.num_rays();

    // pairings <theta_k, b_j> for all rays
    let mut theta_pairings = IntMatrix::zeros(d, n);
    for k in 0..d {
        for j in 0..n {
            let mut acc = BigInt::zero();
            let free = sf.generator(j).free_part();
            for c in 0..d {
                acc += thetas.at(k, c) * &free[c];
            }
            theta_pairings.set(k, j, acc);
        }
    }

    if sf.is_reduced() {
        // Laurent presentation directly on the ray classes
        let mut b = VarTableBuilder::new();
        let base_vars = b.append_table(&twist.k_table);
        let mut x_pairs = Vec::new();
        for j in 0..n {
            x_pairs.push(b.add_unit(format!("x{}", j + 1), None));
        }
        let table = b.build();
        let embed = |p: &Poly| p.remap(&table, &field, &base_vars);

        let mut relations = Vec::new();
        for r in &twist.k_relations {
            relations.push(embed(r));
        }
        relations = with_unit_relations(&table, &field, relations);
        for nf in sf.fan().primitive_nonfaces() {
            let mut prod = Poly::one(&table, &field);
            for i in nf {
                let one_minus = Poly::one(&table, &field).sub(&Poly::var(&table, &field, x_pairs[i].0));
                prod = prod.mul(&one_minus);
            }
            relations.push(prod);
        }
        for k in 0..d {
            let mut exps = vec![0u32; table.len()];
            for j in 0..n {
                let e = theta_pairings.at(k, j);
                if e.is_positive() {
                    exps[x_pairs[j].0] += e.to_u32().expect("exponent fits");
                } else if e.is_negative() {
                    exps[x_pairs[j].1] += (-e).to_u32().expect("exponent fits");
                }
            }
            let lhs = Poly::monomial(&table, &field, Monomial(exps), field.one());
            let rhs = if twist.is_trivial_twist() {
                Poly::one(&table, &field)
            } else {
                embed(&twist.xi_inv[k])
            };
            relations.push(lhs.sub(&rhs));
        }
        let presentation = RingPresentation::new(table.clone(), field.clone(), relations, MonomialOrder::GrevLex, max_pairs)?;
        let x_classes = (0..n).map(|j| Poly::var(&table, &field, x_pairs[j].0)).collect();
        Ok(KRing {
            presentation,
            x_classes,
            base_vars,
            variables: KVariables::Reduced { x_pairs },
            basis_choice,
            theta_pairings,
        })
    } else {
        // normal-form coordinates on the dual group
        let chr = character_ring(&sf.minimal())?;
        let mut b = VarTableBuilder::new();
        let base_vars = b.append_table(&twist.k_table);
        let chr_map = b.append_table(&chr.table);
        let u_pairs: Vec<(usize, usize)> = chr.u_pairs.iter().map(|&(u, ui)| (chr_map[u], chr_map[ui])).collect();
        let w_vars: Vec<usize> = chr.w_vars.iter().map(|&w| chr_map[w]).collect();
        let table = b.build();
        let embed_base = |p: &Poly| p.remap(&table, &field, &base_vars);
        let embed_chr = |p: &Poly| p.remap(&table, &field, &chr_map);

        let mut relations = Vec::new();
        for r in &twist.k_relations {
            relations.push(embed_base(r));
        }
        relations = with_unit_relations(&table, &field, relations);
        for (j, q) in chr.dual.group.torsion.iter().enumerate() {
            let e = q.to_u32().ok_or_else(|| Error::invalid("torsion order too large"))?;
            relations.push(
                Poly::var(&table, &field, w_vars[j])
                    .pow(e)
                    .sub(&Poly::one(&table, &field)),
            );
        }
        let x_classes: Vec<Poly> = chr.x_monomials.iter().map(|p| embed_chr(p)).collect();
        for nf in sf.fan().primitive_nonfaces() {
            let mut prod = Poly::one(&table, &field);
            for i in nf {
                prod = prod.mul(&Poly::one(&table, &field).sub(&x_classes[i]));
            }
            relations.push(prod);
        }
        for k in 0..d {
            // the group element sum_j <theta_k, b_j> dual(e_j)
            let mut acc = chr.dual.group.zero();
            for j in 0..n {
                let col = chr.dual.dual_map.column_elements()[j].clone();
                acc = acc.add(&col.scale(theta_pairings.at(k, j)));
            }
            let lhs = embed_chr(&chr.monomial_of(&acc, &field));
            let rhs = if twist.is_trivial_twist() {
                Poly::one(&table, &field)
            } else {
                embed_base(&twist.xi_inv[k])
            };
            relations.push(lhs.sub(&rhs));
        }
        let presentation = RingPresentation::new(table.clone(), field.clone(), relations, MonomialOrder::GrevLex, max_pairs)?;
        Ok(KRing {
            presentation,
            x_classes,
            base_vars,
            variables: KVariables::General { u_pairs, w_vars },
            basis_choice,
            theta_pairings,
        })
    }
}

/// One twisted sector: its box element, quotient data, cohomology
/// presentation over the base, and the restriction classes of every parent
/// ray line bundle.
#[derive(Clone, Debug)]
pub struct SectorRing {
    pub v: BoxElement,
    pub quotient: QuotientStackyFan,
    pub presentation: RingPresentation,
    /// Sector variable index of each link ray (parent index).
    pub z_of_ray: BTreeMap<usize, usize>,
    /// Indices of the base cohomology variables in the sector table.
    pub base_vars: Vec<usize>,
    /// Restriction class of each parent ray: a sector polynomial, or `None`
    /// when the ray is incompatible with the sector cone (class is zero).
    pub ray_classes: Vec<Option<Poly>>,
    /// Rational degree shift `2 * sum(alpha)`.
    pub shift: BigRational,
}

/// The Chen-Ruan sector decomposition.
#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    pub sectors: Vec<SectorRing>,
    pub total_dimension: usize,
}

impl SectorDecomposition {
    pub fn sector_of(&self, v: &BoxElement) -> &SectorRing {
        self.sectors
            .iter()
            .find(|s| s.v.element == v.element)
            .expect("box element indexes a sector")
    }
}

/// The Chen-Ruan cohomology presentation: a single global quotient plus the
/// sector decomposition.
#[derive(Clone, Debug)]
pub struct CrRing {
    pub global: RingPresentation,
    /// Global variable index of each ray class `y_i`.
    pub y_vars: Vec<usize>,
    /// Global variable index of each nonzero box element's sector class,
    /// aligned with `box_legend`.
    pub t_vars: Vec<usize>,
    pub box_legend: Vec<BoxElement>,
    pub base_vars: Vec<usize>,
    pub decomposition: SectorDecomposition,
    /// Set when the fan is not complete (dimensions may be infinite).
    pub completeness_warning: bool,
}

/// Build the Chen-Ruan presentation and its sector decomposition.
pub fn cr_ring(sf: &StackyFan, twist: &TwistSpec) -> Result<CrRing> {
    cr_ring_capped(sf, twist, crate::polyring::DEFAULT_PAIR_CAP)
}

pub fn cr_ring_capped(sf: &StackyFan, twist: &TwistSpec, max_pairs: usize) -> Result<CrRing> {
    sf.validate()?;
    let d = sf.group().free_rank;
    if twist.rank() != d {
        return Err(Error::invalid(format!(
            "twist carries {} distinguished classes but the free rank is {}",
            twist.rank(),
            d
        )));
    }
    let field = CycField::rational();
    let (thetas, _) = relation_functionals(sf, twist)?;
    let n = sf.num_rays();
    let boxes = sf.box_total();

    // sectors first
    let mut sectors = Vec::new();
    for v in &boxes {
        sectors.push(build_sector(sf, twist, &thetas, v, max_pairs)?);
    }
    let mut total = 0usize;
    for s in &sectors {
        total += s
            .presentation
            .dimension()
            .ok_or_else(|| Error::invalid("sector presentation is infinite-dimensional"))?;
    }

    // global presentation
    let two = BigRational::from_integer(BigInt::from(2));
    let mut b = VarTableBuilder::new();
    let base_vars = b.append_table(&twist.h_table);
    let mut y_vars = Vec::new();
    for j in 0..n {
        y_vars.push(b.add(format!("y{}", j + 1), Some(two.clone())));
    }
    let mut t_vars = Vec::new();
    let mut box_legend = Vec::new();
    for (idx, v) in boxes.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        t_vars.push(b.add(format!("t{}", idx), Some(v.degree_shift())));
        box_legend.push(v.clone());
    }
    let table = b.build();
    let embed_base = |p: &Poly| p.remap(&table, &field, &base_vars);

    let t_poly = |legend_idx: usize| Poly::var(&table, &field, t_vars[legend_idx]);
    let t_of_box = |v: &BoxElement| -> Poly {
        if v.is_zero() {
            Poly::one(&table, &field)
        } else {
            let k = box_legend
                .iter()
                .position(|w| w.element == v.element)
                .expect("box element in legend");
            t_poly(k)
        }
    };

    let mut relations = Vec::new();
    for r in &twist.h_relations {
        relations.push(embed_base(r));
    }
    // Stanley-Reisner products over primitive non-faces
    for nf in sf.fan().primitive_nonfaces() {
        let mut prod = Poly::one(&table, &field);
        for i in nf {
            prod = prod.mul(&Poly::var(&table, &field, y_vars[i]));
        }
        relations.push(prod);
    }
    // linear relations c1(xi_theta) + sum theta(b_i) y_i
    for k in 0..d {
        let mut rel = Poly::zero(&table, &field);
        if !twist.is_trivial_twist() {
            // c1(xi_theta) = sum_l <theta_k, v_l> c1_l; theta_k is the l-th
            // dual functional, so the pairing matrix is the identity here
            rel = rel.add(&embed_base(&twist.c1[k]));
        }
        for j in 0..n {
            let mut acc = BigInt::zero();
            let free = sf.generator(j).free_part();
            for c in 0..d {
                acc += thetas.at(k, c) * &free[c];
            }
            let coeff = field.from_rational(BigRational::from_integer(acc));
            rel = rel.add(&Poly::var(&table, &field, y_vars[j]).mul_scalar(&coeff));
        }
        relations.push(rel);
    }
    // sector-class structure relations
    for (a, v) in boxes.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        // incompatible rays annihilate the sector class
        let star = sf.fan().star_rays(&v.cone);
        for j in 0..n {
            if !star.contains(&j) {
                relations.push(t_of_box(v).mul(&Poly::var(&table, &field, y_vars[j])));
            }
        }
        for w in boxes.iter().skip(a) {
            if w.is_zero() {
                continue;
            }
            let pts = vec![
                sf.free_part_q(&v.element),
                sf.free_part_q(&w.element),
            ];
            let rel = match sf.fan().minimal_cone_containing(&pts) {
                Err(_) => t_of_box(v).mul(&t_of_box(w)),
                Ok(_) => {
                    let sum = v.element.add(&w.element);
                    let (u, mult) = sf.box_reduce(&sum)?;
                    let mut rhs = t_of_box(&u);
                    for (&i, m) in &mult {
                        let e = m.to_u32().expect("multiplicity fits");
                        rhs = rhs.mul(&Poly::var(&table, &field, y_vars[i]).pow(e));
                    }
                    t_of_box(v).mul(&t_of_box(w)).sub(&rhs)
                }
            };
            relations.push(rel);
        }
    }
    let global = RingPresentation::new(table, field, relations, MonomialOrder::GrevLex, max_pairs)?;
    Ok(CrRing {
        global,
        y_vars,
        t_vars,
        box_legend,
        base_vars,
        decomposition: SectorDecomposition { sectors, total_dimension: total },
        completeness_warning: !sf.fan().is_complete(),
    })
}

/// Build one sector's presentation and ray restriction classes.
fn build_sector(
    sf: &StackyFan,
    twist: &TwistSpec,
    thetas: &IntMatrix,
    v: &BoxElement,
    max_pairs: usize,
) -> Result<SectorRing> {
    let field = CycField::rational();
    let d = sf.group().free_rank;
    let quotient = sf.quotient(&v.cone)?;
    let two = BigRational::from_integer(BigInt::from(2));

    let mut b = VarTableBuilder::new();
    let base_vars = b.append_table(&twist.h_table);
    let mut z_of_ray = BTreeMap::new();
    for (new_idx, &parent) in quotient.parent_ray_of.iter().enumerate() {
        let var = b.add(format!("y{}", parent + 1), Some(two.clone()));
        z_of_ray.insert(parent, var);
        let _ = new_idx;
    }
    let table = b.build();
    let embed_base = |p: &Poly| p.remap(&table, &field, &base_vars);

    let mut relations = Vec::new();
    for r in &twist.h_relations {
        relations.push(embed_base(r));
    }
    // Stanley-Reisner ideal of the quotient fan
    for nf in quotient.stacky_fan.fan().primitive_nonfaces() {
        let mut prod = Poly::one(&table, &field);
        for i in nf {
            let parent = quotient.parent_ray_of[i];
            prod = prod.mul(&Poly::var(&table, &field, z_of_ray[&parent]));
        }
        relations.push(prod);
    }
    // linear relations from functionals of the local quotient group, lifted
    // through the projection
    let proj_free = quotient.projection.free_part_matrix(); // rows: free coords of N(sigma)
    let d_q = quotient.stacky_fan.group().free_rank;
    for k in 0..d_q {
        let mut rel = Poly::zero(&table, &field);
        // theta on N = k-th free coordinate of the projection
        for (&parent, &var) in &z_of_ray {
            let coeff_int = {
                let img = quotient.projection.apply(sf.generator(parent));
                img.coords[k].clone()
            };
            rel = rel.add(
                &Poly::var(&table, &field, var)
                    .mul_scalar(&field.from_rational(BigRational::from_integer(coeff_int))),
            );
        }
        if !twist.is_trivial_twist() {
            // c1 of the lifted functional: express theta = sum_l r_l theta_l
            // against the distinguished dual basis and combine the c1 classes
            let row: Vec<BigRational> = (0..d)
                .map(|c| BigRational::from_integer(proj_free.at(k, c).clone()))
                .collect();
            let coeffs = express_in_functional_basis(thetas, &row);
            for (l, r) in coeffs.iter().enumerate() {
                if !r.is_zero() {
                    rel = rel.add(&embed_base(&twist.c1[l]).mul_scalar(&field.from_rational(r.clone())));
                }
            }
        }
        relations.push(rel);
    }
    let presentation = RingPresentation::new(table.clone(), field.clone(), relations, MonomialOrder::GrevLex, max_pairs)?;

    // restriction classes of all parent rays
    let star = sf.fan().star_rays(&v.cone);
    let mut ray_classes: Vec<Option<Poly>> = Vec::new();
    for j in 0..sf.num_rays() {
        if let Some(&var) = z_of_ray.get(&j) {
            ray_classes.push(Some(Poly::var(&table, &field, var)));
        } else if v.cone.contains(&j) {
            // eliminate via a rational functional dual to the cone's vectors
            let theta = dual_functional_on_cone(sf, &v.cone, j);
            let mut class = Poly::zero(&table, &field);
            for (&parent, &var) in &z_of_ray {
                let free = sf.generator(parent).free_part();
                let mut pairing = BigRational::zero();
                for c in 0..d {
                    pairing = pairing + &theta[c] * BigRational::from_integer(free[c].clone());
                }
                if !pairing.is_zero() {
                    class = class.sub(&Poly::var(&table, &field, var).mul_scalar(&field.from_rational(pairing)));
                }
            }
            if !twist.is_trivial_twist() {
                let coeffs = express_in_functional_basis(thetas, &theta);
                for (l, r) in coeffs.iter().enumerate() {
                    if !r.is_zero() {
                        class = class.sub(&embed_base(&twist.c1[l]).mul_scalar(&field.from_rational(r.clone())));
                    }
                }
            }
            ray_classes.push(Some(presentation.nf(&class)));
        } else if star.contains(&j) {
            unreachable!("star rays outside the cone are link rays");
        } else {
            ray_classes.push(None);
        }
    }

    Ok(SectorRing {
        v: v.clone(),
        quotient,
        presentation,
        z_of_ray,
        base_vars,
        ray_classes,
        shift: v.degree_shift(),
    })
}

/// A rational functional `theta` with `theta(b_k) = delta_{jk}` on the
/// stacky vectors of the cone, deterministic among the valid choices.
fn dual_functional_on_cone(sf: &StackyFan, cone: &Cone, j: usize) -> Vec<BigRational> {
    let d = sf.group().free_rank;
    let members: Vec<usize> = cone.iter().copied().collect();
    // columns: b_i for i in cone, then standard vectors completing the basis
    let mut cols: Vec<Vec<BigRational>> = members
        .iter()
        .map(|&i| {
            sf.generator(i)
                .free_part()
                .into_iter()
                .map(BigRational::from_integer)
                .collect()
        })
        .collect();
    for s in 0..d {
        if cols.len() == d {
            break;
        }
        let mut candidate: Vec<BigRational> = vec![BigRational::zero(); d];
        candidate[s] = BigRational::one();
        let mut trial = cols.clone();
        trial.push(candidate.clone());
        if rational_rank(&trial) == trial.len() {
            cols.push(candidate);
        }
    }
    assert_eq!(cols.len(), d, "completed to a rational basis");
    // invert: theta is the row of the inverse matrix matching position of j
    let pos = members.iter().position(|&i| i == j).unwrap();
    let mut m = QMatrix::zeros(d, d);
    for (c, col) in cols.iter().enumerate() {
        for r in 0..d {
            m.set(r, c, col[r].clone());
        }
    }
    // solve theta * M = e_pos  <=>  M^T theta^T = e_pos
    let mut mt = QMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            mt.set(r, c, m.at(c, r).clone());
        }
    }
    let mut e = vec![BigRational::zero(); d];
    e[pos] = BigRational::one();
    mt.solve_independent(&e).expect("basis matrix invertible")
}

fn rational_rank(cols: &[Vec<BigRational>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let rows = cols[0].len();
    let mut m: Vec<Vec<BigRational>> = cols.to_vec();
    let mut rank = 0;
    for r in 0..rows {
        let pivot = (rank..m.len()).find(|&c| !m[c][r].is_zero());
        if let Some(p) = pivot {
            m.swap(rank, p);
            let inv = m[rank][r].recip();
            for x in m[rank].iter_mut() {
                *x = x.clone() * &inv;
            }
            for c in 0..m.len() {
                if c != rank && !m[c][r].is_zero() {
                    let f = m[c][r].clone();
                    for i in 0..rows {
                        let delta = &f * &m[rank][i];
                        m[c][i] = m[c][i].clone() - delta;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Express a rational functional (row vector on the free lattice) in the
/// basis of relation functionals (rows of `thetas`).
fn express_in_functional_basis(thetas: &IntMatrix, row: &[BigRational]) -> Vec<BigRational> {
    let d = thetas.rows();
    if d == 0 {
        return Vec::new();
    }
    // solve  coeffs * thetas = row  <=>  thetas^T coeffs^T = row^T
    let mut mt = QMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            mt.set(r, c, BigRational::from_integer(thetas.at(c, r).clone()));
        }
    }
    mt.solve_independent(row).expect("functional basis is invertible")
}

/// The presentations of a finite abelian gerbe in the shape the structure
/// theorem produces: one generator per cyclic factor with `t^q = 1`.
#[derive(Clone, Debug)]
pub struct GerbePresentations {
    pub k: RingPresentation,
    pub cr: RingPresentation,
    /// The literal relations `t_i^{q_i}` (without the `-1`), for strict
    /// side-by-side reporting.
    pub k_strict_literal: Vec<Poly>,
    pub dual: GaleDual,
    /// Canonical display of the dual map (free rows sign-normalized).
    pub alpha_display: IntMatrix,
}

/// Build the gerbe stacky fan for cyclic factors `q_1, ..., q_s` (prime
/// powers in the intended use) and return its presentations over the base.
///
/// The stacky fan has the finite group, an empty fan, and the single extra
/// vector `(1, ..., 1)`.
pub fn gerbe_presentations(factors: &[u32], twist: &TwistSpec) -> Result<GerbePresentations> {
    if factors.iter().any(|&q| q < 2) {
        return Err(Error::invalid("gerbe factors must be at least 2"));
    }
    let field = CycField::rational();
    // the K presentation: base_K[t_1..t_s] / (t_i^{q_i} - 1)
    let mut kb = VarTableBuilder::new();
    let base_k_vars = kb.append_table(&twist.k_table);
    let mut kt_vars = Vec::new();
    for i in 0..factors.len() {
        kt_vars.push(kb.add(format!("t{}", i + 1), None));
    }
    let k_table = kb.build();
    let mut k_relations: Vec<Poly> = twist
        .k_relations
        .iter()
        .map(|p| p.remap(&k_table, &field, &base_k_vars))
        .collect();
    k_relations = with_unit_relations(&k_table, &field, k_relations);
    let mut k_strict_literal = Vec::new();
    for (i, &q) in factors.iter().enumerate() {
        let t = Poly::var(&k_table, &field, kt_vars[i]);
        k_relations.push(t.pow(q).sub(&Poly::one(&k_table, &field)));
        k_strict_literal.push(t.pow(q));
    }
    let k = RingPresentation::new(k_table, field.clone(), k_relations, MonomialOrder::GrevLex, crate::polyring::DEFAULT_PAIR_CAP)?;

    // the CR presentation: base_H[t_1..t_s] / (t_i^{q_i} - 1)
    let mut hb = VarTableBuilder::new();
    let base_h_vars = hb.append_table(&twist.h_table);
    let mut ht_vars = Vec::new();
    for i in 0..factors.len() {
        ht_vars.push(hb.add(format!("t{}", i + 1), Some(BigRational::zero())));
    }
    let h_table = hb.build();
    let mut h_relations: Vec<Poly> = twist
        .h_relations
        .iter()
        .map(|p| p.remap(&h_table, &field, &base_h_vars))
        .collect();
    for (i, &q) in factors.iter().enumerate() {
        let t = Poly::var(&h_table, &field, ht_vars[i]);
        h_relations.push(t.pow(q).sub(&Poly::one(&h_table, &field)));
    }
    let cr = RingPresentation::new(h_table, field.clone(), h_relations, MonomialOrder::GrevLex, crate::polyring::DEFAULT_PAIR_CAP)?;

    // the Gale dual of the one-column map (1, ..., 1)
    let group = invariant_form_of_cyclic_factors(factors)?;
    let ones = IntMatrix::from_columns(
        group.num_coords(),
        &[vec![BigInt::one(); group.num_coords()]],
    );
    let beta = GroupHom::new(FgAbelianGroup::free(1), group, ones)?;
    let dual = crate::lattice::gale_dual(&beta)?;
    let mut alpha_display = dual.dual_map.matrix.clone();
    for r in 0..dual.group.free_rank {
        if alpha_display.at(r, 0).is_negative() {
            for c in 0..alpha_display.cols() {
                let e = -alpha_display.at(r, c);
                alpha_display.set(r, c, e);
            }
        }
    }
    Ok(GerbePresentations { k, cr, k_strict_literal, dual, alpha_display })
}

/// Rewrite a list of cyclic factors in invariant-factor form.
pub fn invariant_form_of_cyclic_factors(factors: &[u32]) -> Result<FgAbelianGroup> {
    let n = factors.len();
    let mut diag = IntMatrix::zeros(n, n);
    for (i, &q) in factors.iter().enumerate() {
        diag.set(i, i, BigInt::from(q));
    }
    let (_, d, _) = diag.smith_normal_form();
    let torsion: Vec<BigInt> = (0..n)
        .map(|i| d.at(i, i).clone())
        .filter(|q| *q > BigInt::one())
        .collect();
    FgAbelianGroup::new(0, torsion)
}

/// The gerbe stacky fan of a finite group in invariant-factor form.
pub fn gerbe_stacky_fan(factors: &[u32]) -> Result<StackyFan> {
    let group = invariant_form_of_cyclic_factors(factors)?;
    let fan = crate::fan::Fan::new(0, vec![], &[])?;
    let b = vec![group.element(vec![BigInt::one(); group.num_coords()])];
    StackyFan::new(group, fan, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::Fan;

    fn line_fan() -> Fan {
        Fan::new(1, vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]], &[vec![0], vec![1]]).unwrap()
    }

    fn weighted_line(w: i64) -> StackyFan {
        let group = FgAbelianGroup::free(1);
        let b = vec![group.element_from_i64(&[1]), group.element_from_i64(&[-w])];
        StackyFan::new(group, line_fan(), b).unwrap()
    }

    #[test]
    fn character_ring_p1() {
        let sf = weighted_line(1);
        let chr = character_ring(&sf).unwrap();
        assert_eq!(chr.dual.group, FgAbelianGroup::free(1));
        // both rays map to the same generator monomial (up to the sign choice)
        assert_eq!(chr.x_monomials[0], chr.x_monomials[1]);
    }

    #[test]
    fn character_ring_p12() {
        let sf = weighted_line(2);
        let chr = character_ring(&sf).unwrap();
        assert_eq!(chr.dual.group, FgAbelianGroup::free(1));
        // x1 = u^2 and x2 = u (in some orientation): x1 = x2^2
        let sq = chr.x_monomials[1].mul(&chr.x_monomials[1]);
        assert_eq!(chr.x_monomials[0], sq);
    }

    #[test]
    fn character_ring_gerbe() {
        let sf = gerbe_stacky_fan(&[5]).unwrap();
        let chr = character_ring(&sf).unwrap();
        assert_eq!(chr.dual.group, FgAbelianGroup::new(0, vec![BigInt::from(5)]).unwrap());
        assert_eq!(chr.relations.len(), 1); // w^5 - 1
    }

    #[test]
    fn k_ring_dimensions_over_point() {
        for (w, expect) in [(1i64, 2usize), (2, 3), (3, 4)] {
            let sf = weighted_line(w);
            let twist = TwistSpec::point(1);
            let k = k_ring(&sf, &twist).unwrap();
            assert_eq!(k.presentation.dimension(), Some(expect), "weight {}", w);
        }
    }

    #[test]
    fn k_ring_gerbe_z2z4() {
        let sf = gerbe_stacky_fan(&[2, 4]).unwrap();
        let twist = TwistSpec::point(0);
        let k = k_ring(&sf, &twist).unwrap();
        assert_eq!(k.presentation.dimension(), Some(8));
        match &k.variables {
            KVariables::General { u_pairs, w_vars } => {
                assert!(u_pairs.is_empty());
                assert_eq!(w_vars.len(), 2);
            }
            _ => panic!("gerbe is not reduced"),
        }
    }

    #[test]
    fn k_ring_twisted_p1_over_p1() {
        let sf = weighted_line(1);
        let twist = TwistSpec::projective(1, &[1]);
        twist.validate(crate::polyring::DEFAULT_PAIR_CAP).unwrap();
        let k = k_ring(&sf, &twist).unwrap();
        assert_eq!(k.presentation.dimension(), Some(4));
        let aug: Vec<i64> = k.base_vars.iter().map(|_| 1).collect();
        let rank = k
            .presentation
            .free_rank_over_local_base(&k.base_vars, &aug, 2, crate::polyring::DEFAULT_PAIR_CAP)
            .unwrap();
        assert_eq!(rank, Some(2));
    }

    #[test]
    fn cr_ring_p12_sectors() {
        let sf = weighted_line(2);
        let twist = TwistSpec::point(1);
        let cr = cr_ring(&sf, &twist).unwrap();
        assert_eq!(cr.decomposition.total_dimension, 3);
        let dims: Vec<usize> = cr
            .decomposition
            .sectors
            .iter()
            .map(|s| s.presentation.dimension().unwrap())
            .collect();
        assert_eq!(dims, vec![2, 1]);
        assert_eq!(cr.global.dimension(), Some(3));
        // the twisted class squares to the ray class y2
        let t = Poly::var(&cr.global.table, &cr.global.field, cr.t_vars[0]);
        let y2 = Poly::var(&cr.global.table, &cr.global.field, cr.y_vars[1]);
        assert_eq!(cr.global.nf(&t.mul(&t)), cr.global.nf(&y2));
        // degree shifts: 0 for the untwisted sector, 1 for the twisted one
        let shifts: Vec<BigRational> = cr.decomposition.sectors.iter().map(|s| s.shift.clone()).collect();
        assert!(shifts.contains(&BigRational::zero()));
        assert!(shifts.contains(&BigRational::one()));
    }

    #[test]
    fn cr_sector_zero_is_stanley_reisner() {
        let sf = weighted_line(2);
        let twist = TwistSpec::point(1);
        let cr = cr_ring(&sf, &twist).unwrap();
        let zero_sector = cr
            .decomposition
            .sectors
            .iter()
            .find(|s| s.v.is_zero())
            .unwrap();
        // untwisted sector has one variable per ray and dimension 2
        assert_eq!(zero_sector.z_of_ray.len(), 2);
        assert_eq!(zero_sector.presentation.dimension(), Some(2));
    }

    #[test]
    fn cr_ring_gerbe() {
        let sf = gerbe_stacky_fan(&[2, 4]).unwrap();
        let twist = TwistSpec::point(0);
        let cr = cr_ring(&sf, &twist).unwrap();
        assert_eq!(cr.decomposition.total_dimension, 8);
        assert_eq!(cr.global.dimension(), Some(8));
        assert_eq!(cr.decomposition.sectors.len(), 8);
    }

    #[test]
    fn gerbe_presentations_z2z4() {
        let twist = TwistSpec::point(0);
        let g = gerbe_presentations(&[2, 4], &twist).unwrap();
        assert_eq!(g.k.dimension(), Some(8));
        assert_eq!(g.cr.dimension(), Some(8));
        assert_eq!(g.dual.group, FgAbelianGroup::new(1, vec![BigInt::from(2)]).unwrap());
        assert_eq!(g.alpha_display.at(0, 0), &BigInt::from(4));
        assert!(g.alpha_display.at(1, 0).is_zero());
        assert_eq!(g.k_strict_literal.len(), 2);
    }

    #[test]
    fn extra_data_invariance_of_presentations() {
        let group = FgAbelianGroup::free(1);
        let b = vec![
            group.element_from_i64(&[1]),
            group.element_from_i64(&[-2]),
            group.element_from_i64(&[5]),
        ];
        let sf = StackyFan::new(group, line_fan(), b).unwrap();
        let twist = TwistSpec::point(1);
        let k_full = k_ring(&sf, &twist).unwrap();
        let k_min = k_ring(&sf.minimal(), &twist).unwrap();
        assert_eq!(k_full.presentation.gb.polys, k_min.presentation.gb.polys);
        let cr_full = cr_ring(&sf, &twist).unwrap();
        let cr_min = cr_ring(&sf.minimal(), &twist).unwrap();
        assert_eq!(cr_full.global.gb.polys, cr_min.global.gb.polys);
    }

    #[test]
    fn laurent_inverses_do_not_change_k_dimensions() {
        // rebuild each suite K-ideal with positive exponents only (clear the
        // inverse variables from the circle binomials); the ray classes are
        // units in these quotients, so the dimensions must agree
        use crate::polyring::groebner::{groebner, quotient_basis, Ideal};
        use crate::polyring::poly::parse_poly;
        let field = CycField::rational();
        let cases: Vec<(StackyFan, Vec<&str>, usize)> = vec![
            (weighted_line(1), vec!["(1 - a)*(1 - b)", "a - b"], 2),
            (weighted_line(2), vec!["(1 - a)*(1 - b)", "a - b^2"], 3),
            (weighted_line(3), vec!["(1 - a)*(1 - b)", "a - b^3"], 4),
        ];
        for (sf, plain_relations, expected) in cases {
            let twist = TwistSpec::point(1);
            let k = k_ring(&sf, &twist).unwrap();
            assert_eq!(k.presentation.dimension(), Some(expected));
            let mut b = VarTableBuilder::new();
            b.add("a", None);
            b.add("b", None);
            let t = b.build();
            let gens: Vec<Poly> = plain_relations
                .iter()
                .map(|r| parse_poly(&t, &field, r).unwrap())
                .collect();
            let gb = groebner(&Ideal::new(gens, MonomialOrder::GrevLex)).unwrap();
            let dim = quotient_basis(&gb, 2).unwrap().len();
            assert_eq!(dim, expected, "positive-exponent form has the same dimension");
            // and the ray classes really are units: an inverse polynomial exists
            let pres = RingPresentation::new(t.clone(), field.clone(), gb.polys.clone(), MonomialOrder::GrevLex, crate::polyring::DEFAULT_PAIR_CAP).unwrap();
            for name in ["a", "b"] {
                let var = Poly::var(&t, &field, t.index_of(name).unwrap());
                let inverse = invert_in_quotient(&pres, &var)
                    .unwrap_or_else(|| panic!("{} is a unit in the plain quotient", name));
                // the normal form certifies the inverse exactly
                let check = pres.nf(&var.mul(&inverse).sub(&Poly::one(&t, &field)));
                assert!(check.is_zero());
            }
        }
    }

    /// Solve `x * g = 1` in a finite-dimensional quotient by linear algebra
    /// on the multiplication operator.
    fn invert_in_quotient(pres: &RingPresentation, x: &Poly) -> Option<Poly> {
        use crate::polyring::groebner::scalar_matrix_solve;
        let basis = pres.qbasis.as_ref()?;
        let field = &pres.field;
        let columns: Vec<Vec<crate::polyring::scalar::Scalar>> = basis
            .iter()
            .map(|m| {
                let mono = Poly::monomial(&pres.table, field, m.clone(), field.one());
                pres.coordinates(&mono.mul(x))
            })
            .collect();
        let one = pres.coordinates(&Poly::one(&pres.table, field));
        let g = scalar_matrix_solve(&columns, &one)?;
        let mut inverse = Poly::zero(&pres.table, field);
        for (m, c) in basis.iter().zip(g) {
            inverse = inverse.add(&Poly::monomial(&pres.table, field, m.clone(), c));
        }
        Some(inverse)
    }

    #[test]
    fn non_complete_fan_warns_but_computes() {
        // a single quadrant: the linear relations collapse everything onto
        // the base, dimensions stay finite, and the warning flag is set
        let group = FgAbelianGroup::free(2);
        let fan = Fan::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
            ],
            &[vec![0, 1]],
        )
        .unwrap();
        let b = vec![group.element_from_i64(&[1, 0]), group.element_from_i64(&[0, 1])];
        let sf = StackyFan::new(group, fan, b).unwrap();
        let cr = cr_ring(&sf, &TwistSpec::point(2)).unwrap();
        assert!(cr.completeness_warning);
        assert_eq!(cr.decomposition.total_dimension, 1);
    }

    #[test]
    fn nontrivial_twist_needs_unimodular_top_cone() {
        // a single non-unimodular top cone: rays (1,0) and (1,2)
        let group = FgAbelianGroup::free(2);
        let fan = Fan::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(1), BigInt::from(2)],
            ],
            &[vec![0, 1]],
        )
        .unwrap();
        let b = vec![group.element_from_i64(&[1, 0]), group.element_from_i64(&[1, 2])];
        let sf = StackyFan::new(group, fan, b).unwrap();
        let twisted = TwistSpec::projective(1, &[1, 0]);
        assert_eq!(k_ring(&sf, &twisted).unwrap_err(), crate::error::Error::NoUnimodularTopCone);
        // the trivial twist does not need the distinguished basis
        let trivial = TwistSpec::point(2);
        assert!(k_ring(&sf, &trivial).is_ok());
    }

    #[test]
    fn trivial_twist_circle_ideal_matches_untwisted_shape() {
        // with all xi = 1 the circle relations are monomial-minus-one
        let sf = weighted_line(2);
        let twist = TwistSpec::point(1);
        let k = k_ring(&sf, &twist).unwrap();
        let field = CycField::rational();
        let one = Poly::one(&k.presentation.table, &field);
        let found = k
            .presentation
            .relations
            .iter()
            .any(|r| r.num_terms() == 2 && r.terms().any(|(m, c)| m.is_one() && c.add(&field.one()).is_zero()));
        assert!(found, "expected a monomial - 1 circle relation");
        let _ = one;
    }
}
