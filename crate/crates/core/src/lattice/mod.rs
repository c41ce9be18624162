//! Finitely generated abelian groups in invariant-factor coordinates,
//! homomorphisms between them, cokernels and Gale duals.
//!
//! A group is stored as `Z^free_rank + Z/q_1 + ... + Z/q_s` with
//! `2 <= q_1 | q_2 | ... | q_s`. Coordinates list the free part first,
//! then one residue per invariant factor. Every homomorphism is a plain
//! integer matrix in these coordinates, checked for well-definedness at
//! construction.

pub mod matrix;

pub use matrix::{primitive_vector, same_column_span, IntMatrix, QMatrix};

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::{Integer, One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A finitely generated abelian group in invariant-factor form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    /// Invariant factors `q_1 | q_2 | ... | q_s`, each at least 2.
    pub torsion: Vec<BigInt>,
}

impl fmt::Debug for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z^{}", self.free_rank)?;
        for q in &self.torsion {
            write!(f, " + Z/{}", q)?;
        }
        Ok(())
    }
}

impl FgAbelianGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        for (i, q) in torsion.iter().enumerate() {
            if *q < BigInt::from(2) {
                return Err(Error::invalid("invariant factors must be >= 2"));
            }
            if i > 0 && !(q % &torsion[i - 1]).is_zero() {
                return Err(Error::invalid("invariant factors must form a divisibility chain"));
            }
        }
        Ok(FgAbelianGroup { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Number of coordinates (free + torsion).
    pub fn num_coords(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().fold(BigInt::one(), |a, q| a * q)
    }

    /// Exponent of the torsion subgroup (largest invariant factor).
    pub fn torsion_exponent(&self) -> BigInt {
        self.torsion.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.is_finite() {
            Some(self.torsion_order())
        } else {
            None
        }
    }

    /// The free quotient `Z^free_rank` (torsion killed).
    pub fn free_quotient(&self) -> FgAbelianGroup {
        Self::free(self.free_rank)
    }

    /// Relation matrix presenting the group as `coker(Z^s -> Z^{num_coords})`:
    /// one column `q_j * e_{free_rank + j}` per invariant factor.
    pub fn relation_matrix(&self) -> IntMatrix {
        let n = self.num_coords();
        let s = self.torsion.len();
        let mut m = IntMatrix::zeros(n, s);
        for (j, q) in self.torsion.iter().enumerate() {
            m.set(self.free_rank + j, j, q.clone());
        }
        m
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            parent: self.clone(),
            coords: vec![BigInt::zero(); self.num_coords()],
        }
    }

    pub fn element(&self, coords: Vec<BigInt>) -> GroupElement {
        assert_eq!(coords.len(), self.num_coords(), "coordinate length mismatch");
        let mut e = GroupElement { parent: self.clone(), coords };
        e.reduce();
        e
    }

    pub fn element_from_i64(&self, coords: &[i64]) -> GroupElement {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut coords = vec![BigInt::zero(); self.num_coords()];
        coords[i] = BigInt::one();
        self.element(coords)
    }

    /// All torsion elements: coordinates with zero free part, one per
    /// residue tuple. Deterministic lexicographic order.
    pub fn torsion_elements(&self) -> Vec<GroupElement> {
        let mut out = vec![self.zero()];
        for (j, q) in self.torsion.iter().enumerate() {
            let mut next = Vec::new();
            for e in &out {
                let mut r = BigInt::zero();
                while &r < q {
                    let mut coords = e.coords.clone();
                    coords[self.free_rank + j] = r.clone();
                    next.push(GroupElement { parent: self.clone(), coords });
                    r += 1;
                }
            }
            out = next;
        }
        out
    }

    /// Hom(A, Z): the free part survives, torsion dies.
    pub fn dual_group(&self) -> FgAbelianGroup {
        Self::free(self.free_rank)
    }

    /// Character data Hom(A, Q/Z)-style: the finite part is self-dual and a
    /// rank-r free part contributes a rank-r character lattice.
    pub fn character_group(&self) -> FgAbelianGroup {
        self.clone()
    }
}

/// An element of an [`FgAbelianGroup`], torsion residues reduced into `[0, q_j)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElement {
    pub parent: FgAbelianGroup,
    /// Free coordinates followed by torsion residues.
    pub coords: Vec<BigInt>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", strs.join(", "))
    }
}

impl GroupElement {
    fn reduce(&mut self) {
        let fr = self.parent.free_rank;
        for (j, q) in self.parent.torsion.iter().enumerate() {
            let r = self.coords[fr + j].mod_floor(q);
            self.coords[fr + j] = r;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.parent, other.parent, "elements of different groups");
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        self.parent.element(coords)
    }

    pub fn neg(&self) -> GroupElement {
        self.parent.element(self.coords.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &GroupElement) -> GroupElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> GroupElement {
        self.parent.element(self.coords.iter().map(|c| c * k).collect())
    }

    /// Free coordinates (image in the free quotient).
    pub fn free_part(&self) -> Vec<BigInt> {
        self.coords[..self.parent.free_rank].to_vec()
    }

    pub fn is_torsion(&self) -> bool {
        self.free_part().iter().all(|c| c.is_zero())
    }
}

/// A homomorphism of finitely generated abelian groups given by an integer
/// matrix in invariant-factor coordinates (columns are generator images).
#[derive(Clone, PartialEq, Eq)]
pub struct GroupHom {
    pub domain: FgAbelianGroup,
    pub codomain: FgAbelianGroup,
    pub matrix: IntMatrix,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom {:?} -> {:?} via {:?}", self.domain, self.codomain, self.matrix)
    }
}

impl GroupHom {
    /// Build a homomorphism, checking well-definedness: for each torsion
    /// generator of order `q`, `q` times its image must vanish in the codomain.
    /// Torsion rows are reduced into `[0, q_j)` so equal homs compare equal.
    pub fn new(domain: FgAbelianGroup, codomain: FgAbelianGroup, mut matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != codomain.num_coords() || matrix.cols() != domain.num_coords() {
            return Err(Error::invalid("hom matrix shape mismatch"));
        }
        for (j, q) in codomain.torsion.iter().enumerate() {
            let r = codomain.free_rank + j;
            for c in 0..matrix.cols() {
                let e = matrix.at(r, c).mod_floor(q);
                matrix.set(r, c, e);
            }
        }
        for (j, q) in domain.torsion.iter().enumerate() {
            let col = matrix.column(domain.free_rank + j);
            let image = codomain.element(col).scale(q);
            if !image.is_zero() {
                return Err(Error::invalid(format!(
                    "matrix does not respect torsion relation q_{} = {}",
                    j + 1,
                    q
                )));
            }
        }
        Ok(GroupHom { domain, codomain, matrix })
    }

    pub fn from_columns(domain: FgAbelianGroup, codomain: FgAbelianGroup, cols: &[GroupElement]) -> Result<Self> {
        let data: Vec<Vec<BigInt>> = cols.iter().map(|e| e.coords.clone()).collect();
        let matrix = IntMatrix::from_columns(codomain.num_coords(), &data);
        Self::new(domain, codomain, matrix)
    }

    pub fn identity(group: &FgAbelianGroup) -> Self {
        GroupHom {
            domain: group.clone(),
            codomain: group.clone(),
            matrix: IntMatrix::identity(group.num_coords()),
        }
    }

    pub fn zero(domain: FgAbelianGroup, codomain: FgAbelianGroup) -> Self {
        let matrix = IntMatrix::zeros(codomain.num_coords(), domain.num_coords());
        GroupHom { domain, codomain, matrix }
    }

    pub fn apply(&self, e: &GroupElement) -> GroupElement {
        assert_eq!(e.parent, self.domain, "element not in hom domain");
        self.codomain.element(self.matrix.mul_vec(&e.coords))
    }

    pub fn compose_after(&self, first: &GroupHom) -> GroupHom {
        assert_eq!(first.codomain, self.domain, "composition mismatch");
        GroupHom {
            domain: first.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.mul(&first.matrix),
        }
    }

    /// Columns as codomain elements.
    pub fn column_elements(&self) -> Vec<GroupElement> {
        (0..self.matrix.cols())
            .map(|c| self.codomain.element(self.matrix.column(c)))
            .collect()
    }

    /// The induced map on free quotients as a plain integer matrix
    /// (free rows, all columns of a free domain; for a domain with torsion
    /// the torsion columns are dropped since they die in the free quotient
    /// of the codomain only when... they always land in torsion, so free
    /// rows of torsion columns are zero by well-definedness).
    pub fn free_part_matrix(&self) -> IntMatrix {
        let rows: Vec<usize> = (0..self.codomain.free_rank).collect();
        self.matrix.select_rows(&rows)
    }

    /// Does every element of the codomain have a preimage?
    pub fn is_surjective(&self) -> bool {
        let coker = cokernel(self);
        coker.0.is_trivial()
    }

    /// Kernel of the hom as a sublattice of `Z^domain` -- only supported for
    /// free domains (which is all the exactness oracle needs). Returns
    /// generating columns.
    pub fn kernel_sublattice(&self) -> IntMatrix {
        assert!(self.domain.is_free(), "kernel_sublattice needs a free domain");
        let m = self.domain.num_coords();
        // x in ker  <=>  exists y with  M x = R y  where R runs over the
        // codomain relations, i.e. (x, -y) in ker [M | R].
        let rel = self.codomain.relation_matrix();
        let block = self.matrix.hstack(&rel);
        let basis = block.kernel_basis();
        let cols: Vec<Vec<BigInt>> = basis.iter().map(|v| v[..m].to_vec()).collect();
        IntMatrix::from_columns(m, &cols)
    }
}

/// Cokernel of a homomorphism in invariant-factor form, together with the
/// projection from the codomain.
pub fn cokernel(f: &GroupHom) -> (FgAbelianGroup, GroupHom) {
    quotient_by_columns(&f.codomain, &f.matrix)
}

/// Quotient of `ambient` by the subgroup generated by the columns of `gens`
/// (columns given in ambient coordinates). Returns the quotient and the
/// projection hom.
pub fn quotient_by_columns(ambient: &FgAbelianGroup, gens: &IntMatrix) -> (FgAbelianGroup, GroupHom) {
    let n = ambient.num_coords();
    // present the quotient as Z^n / (gens + ambient relations)
    let combined = gens.hstack(&ambient.relation_matrix());
    let (u, d, _) = combined.smith_normal_form();
    let k = d.rows().min(d.cols());
    let mut torsion = Vec::new();
    let mut torsion_rows = Vec::new();
    let mut free_rows = Vec::new();
    for i in 0..n {
        let di = if i < k { d.at(i, i).clone() } else { BigInt::zero() };
        if di.is_zero() {
            free_rows.push(i);
        } else if !di.is_one() {
            torsion.push(di);
            torsion_rows.push(i);
        }
    }
    let group = FgAbelianGroup { free_rank: free_rows.len(), torsion };
    // projection: free coordinates first, then torsion residues
    let mut rows = free_rows;
    rows.extend(torsion_rows);
    let proj_matrix = u.select_rows(&rows);
    let proj = GroupHom::new(ambient.clone(), group.clone(), proj_matrix)
        .expect("quotient projection is well defined");
    (group, proj)
}

/// Result of the Gale dual construction.
#[derive(Clone, Debug)]
pub struct GaleDual {
    pub group: FgAbelianGroup,
    /// The dual map from `Z^m` to the dual group.
    pub dual_map: GroupHom,
}

/// Gale dual of `beta : Z^m -> N`.
///
/// `N` is presented as `coker(Q)` for its diagonal relation matrix `Q`; the
/// map lifts to `B : Z^m -> Z^{d+s}`, and the dual group is the cokernel of
/// the transpose of `[B | Q]`, with the dual map induced by the inclusion of
/// the first `m` dual coordinates.
pub fn gale_dual(beta: &GroupHom) -> Result<GaleDual> {
    if !beta.domain.is_free() {
        return Err(Error::invalid("gale dual requires a free domain"));
    }
    let n_group = &beta.codomain;
    let d = n_group.free_rank;
    // finite cokernel <=> the free-part matrix has full rank d
    if beta.free_part_matrix().rank() < d {
        return Err(Error::NonFiniteCokernel);
    }
    let m = beta.domain.num_coords();
    let combined = beta.matrix.hstack(&n_group.relation_matrix()); // (d+s) x (m+s)
    let dual_presentation = combined.transpose(); // (m+s) x (d+s)
    let ambient = FgAbelianGroup::free(m + n_group.torsion.len());
    let (group, proj) = quotient_by_columns(&ambient, &dual_presentation);
    // dual map: e_i in Z^m -> class of (e_i, 0)
    let cols: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            let mut v = vec![BigInt::zero(); m + n_group.torsion.len()];
            v[i] = BigInt::one();
            proj.matrix.mul_vec(&v)
        })
        .collect();
    let matrix = IntMatrix::from_columns(group.num_coords(), &cols);
    let dual_map = GroupHom::new(FgAbelianGroup::free(m), group.clone(), matrix)?;
    Ok(GaleDual { group, dual_map })
}

/// The map `N^* -> Z^m` dual to `beta` (a functional pairs with the columns).
pub fn dual_inclusion(beta: &GroupHom) -> IntMatrix {
    beta.free_part_matrix().transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Signed;

    fn zmod(n: i64) -> FgAbelianGroup {
        FgAbelianGroup::new(0, vec![BigInt::from(n)]).unwrap()
    }

    #[test]
    fn invariant_factor_validation() {
        assert!(FgAbelianGroup::new(1, vec![BigInt::from(2), BigInt::from(4)]).is_ok());
        assert!(FgAbelianGroup::new(0, vec![BigInt::from(2), BigInt::from(3)]).is_err());
        assert!(FgAbelianGroup::new(0, vec![BigInt::from(1)]).is_err());
    }

    #[test]
    fn element_reduction_and_arithmetic() {
        let g = FgAbelianGroup::new(1, vec![BigInt::from(4)]).unwrap();
        let e = g.element_from_i64(&[3, 7]);
        assert_eq!(e.coords[1], BigInt::from(3));
        let f = e.add(&e);
        assert_eq!(f.coords, vec![BigInt::from(6), BigInt::from(2)]);
        assert!(e.sub(&e).is_zero());
        let neg = e.neg();
        assert_eq!(neg.coords, vec![BigInt::from(-3), BigInt::from(1)]);
    }

    #[test]
    fn hom_well_definedness() {
        let z2 = zmod(2);
        let z = FgAbelianGroup::free(1);
        // Z/2 -> Z cannot send the generator to 1
        assert!(GroupHom::new(z2.clone(), z.clone(), IntMatrix::from_i64_rows(&[vec![1]])).is_err());
        // Z/2 -> Z/4 sending 1 -> 2 is fine, 1 -> 1 is not
        let z4 = zmod(4);
        assert!(GroupHom::new(z2.clone(), z4.clone(), IntMatrix::from_i64_rows(&[vec![2]])).is_ok());
        assert!(GroupHom::new(z2, z4, IntMatrix::from_i64_rows(&[vec![1]])).is_err());
    }

    #[test]
    fn cokernel_times_one_and_n() {
        let z = FgAbelianGroup::free(1);
        let f = GroupHom::new(z.clone(), z.clone(), IntMatrix::from_i64_rows(&[vec![1]])).unwrap();
        let (c, _) = cokernel(&f);
        assert!(c.is_trivial());

        let f = GroupHom::new(z.clone(), z.clone(), IntMatrix::from_i64_rows(&[vec![5]])).unwrap();
        let (c, p) = cokernel(&f);
        assert_eq!(c, zmod(5));
        // projection composed with f is zero
        let comp = p.compose_after(&f);
        assert!(comp.matrix.is_zero() || comp.column_elements().iter().all(|e| e.is_zero()));
    }

    #[test]
    fn cokernel_diag_2_3() {
        let z2 = FgAbelianGroup::free(2);
        let f = GroupHom::new(z2.clone(), z2.clone(), IntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]])).unwrap();
        let (c, p) = cokernel(&f);
        assert_eq!(c, zmod(6));
        let comp = p.compose_after(&f);
        assert!(comp.column_elements().iter().all(|e| e.is_zero()));
    }

    #[test]
    fn dual_groups() {
        let g = FgAbelianGroup::new(2, vec![BigInt::from(2)]).unwrap();
        assert_eq!(g.dual_group(), FgAbelianGroup::free(2));
        assert_eq!(zmod(5).dual_group(), FgAbelianGroup::trivial());
        assert_eq!(zmod(5).character_group(), zmod(5));
    }

    #[test]
    fn gale_dual_identity() {
        let z3 = FgAbelianGroup::free(3);
        let beta = GroupHom::identity(&z3);
        let gd = gale_dual(&beta).unwrap();
        assert!(gd.group.is_trivial());
    }

    #[test]
    fn gale_dual_p12() {
        // columns (1, -2) in Z
        let z = FgAbelianGroup::free(1);
        let beta = GroupHom::new(
            FgAbelianGroup::free(2),
            z,
            IntMatrix::from_i64_rows(&[vec![1, -2]]),
        )
        .unwrap();
        let gd = gale_dual(&beta).unwrap();
        assert_eq!(gd.group, FgAbelianGroup::free(1));
        // dual map is (2, 1) up to sign
        let a = gd.dual_map.matrix.at(0, 0).clone();
        let b = gd.dual_map.matrix.at(0, 1).clone();
        assert!(
            (a == BigInt::from(2) && b == BigInt::from(1))
                || (a == BigInt::from(-2) && b == BigInt::from(-1)),
            "unexpected dual map ({}, {})",
            a,
            b
        );
    }

    #[test]
    fn gale_dual_gerbe_z2_z4() {
        // beta : Z -> Z/2 + Z/4, 1 -> (1,1)
        let n = FgAbelianGroup::new(0, vec![BigInt::from(2), BigInt::from(4)]).unwrap();
        let beta = GroupHom::new(
            FgAbelianGroup::free(1),
            n,
            IntMatrix::from_i64_rows(&[vec![1], vec![1]]),
        )
        .unwrap();
        let gd = gale_dual(&beta).unwrap();
        assert_eq!(gd.group, FgAbelianGroup::new(1, vec![BigInt::from(2)]).unwrap());
        // dual map equivalent to (4, 0)^t up to automorphism of Z + Z/2:
        // free coordinate +-4, torsion coordinate 0
        assert_eq!(gd.dual_map.matrix.at(0, 0).abs(), BigInt::from(4));
        assert!(gd.dual_map.matrix.at(1, 0).is_zero());
    }

    #[test]
    fn gale_dual_non_finite_cokernel() {
        let z2 = FgAbelianGroup::free(2);
        let beta = GroupHom::new(
            FgAbelianGroup::free(1),
            z2,
            IntMatrix::from_i64_rows(&[vec![1], vec![0]]),
        )
        .unwrap();
        assert_eq!(gale_dual(&beta).unwrap_err(), Error::NonFiniteCokernel);
    }

    #[test]
    fn gale_dual_block_projection() {
        // the projection Z^m -> trivial group has dual Z^m with the identity map
        let m = 3;
        let beta = GroupHom::zero(FgAbelianGroup::free(m), FgAbelianGroup::trivial());
        let gd = gale_dual(&beta).unwrap();
        assert_eq!(gd.group, FgAbelianGroup::free(m));
        assert!(gd.dual_map.matrix.is_unimodular());
    }
}
