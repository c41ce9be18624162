//! Stacky fans: a finitely generated abelian group `N`, a simplicial fan in
//! the free quotient of `N`, and lattice data `b_1, ..., b_m` in `N` whose
//! first `n` entries sit on the fan's rays. Derived objects: local groups,
//! box elements, inertia sectors and quotient stacky fans.

use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::lattice::{
    cokernel, gale_dual, primitive_vector, quotient_by_columns, FgAbelianGroup, GaleDual,
    GroupElement, GroupHom, IntMatrix,
};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};
use std::collections::BTreeMap;

/// The triple `(N, fan, b)` plus optional extra data columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    group: FgAbelianGroup,
    fan: Fan,
    generators: Vec<GroupElement>,
}

/// An element `v` of `N` whose image in the free quotient has fractional
/// ray coordinates in `[0, 1)`; indexes a twisted sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxElement {
    /// The lattice element itself.
    pub element: GroupElement,
    /// The minimal cone containing its image (alphas are positive exactly here).
    pub cone: Cone,
    /// Fractional coordinates on the rays of `cone`.
    pub alphas: BTreeMap<usize, BigRational>,
}

impl BoxElement {
    pub fn is_zero(&self) -> bool {
        self.element.is_zero()
    }

    pub fn alpha(&self, ray: usize) -> BigRational {
        self.alphas.get(&ray).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Twice the sum of the fractional coordinates: the rational cohomological
    /// degree shift of the sector indexed by this element.
    pub fn degree_shift(&self) -> BigRational {
        let two = BigRational::from_integer(BigInt::from(2));
        self.alphas.values().fold(BigRational::zero(), |a, b| a + b) * two
    }
}

impl PartialOrd for BoxElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BoxElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.cone.len(), &self.cone, &self.element.coords).cmp(&(
            other.cone.len(),
            &other.cone,
            &other.element.coords,
        ))
    }
}

/// A quotient stacky fan together with the bookkeeping back to its parent.
#[derive(Clone, Debug)]
pub struct QuotientStackyFan {
    /// The stacky fan `(N(sigma), fan/sigma, images of b)`.
    pub stacky_fan: StackyFan,
    /// The cone that was quotiented out (parent ray indices).
    pub sigma: Cone,
    /// Parent ray index of each quotient ray.
    pub parent_ray_of: Vec<usize>,
    /// The projection `N -> N(sigma)`.
    pub projection: GroupHom,
}

impl StackyFan {
    pub fn new(group: FgAbelianGroup, fan: Fan, generators: Vec<GroupElement>) -> Result<Self> {
        let sf = StackyFan { group, fan, generators };
        sf.validate()?;
        Ok(sf)
    }

    /// Check the stacky-fan axioms; returns the first violation.
    pub fn validate(&self) -> Result<()> {
        let report = self.validation_report();
        match report.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// All violations: ray mismatches (1-based index) and cokernel finiteness.
    pub fn validation_report(&self) -> Vec<Error> {
        let mut errors = Vec::new();
        let n = self.fan.num_rays();
        if self.generators.len() < n {
            errors.push(Error::invalid(format!(
                "need at least {} lattice vectors, got {}",
                n,
                self.generators.len()
            )));
            return errors;
        }
        if self.fan.ambient_rank() != self.group.free_rank {
            errors.push(Error::invalid("fan ambient rank differs from the free rank of N"));
            return errors;
        }
        for (i, b) in self.generators.iter().enumerate() {
            if b.parent != self.group {
                errors.push(Error::invalid(format!("vector {} lies in the wrong group", i + 1)));
                return errors;
            }
        }
        for i in 0..n {
            let free = self.generators[i].free_part();
            let ray = &self.fan.rays()[i];
            if !positive_multiple_of_same_primitive(&free, ray) {
                errors.push(Error::RayMismatch(i + 1));
            }
        }
        // finite cokernel: the free parts must span rationally
        if self.beta().free_part_matrix().rank() < self.group.free_rank {
            errors.push(Error::NonFiniteCokernel);
        }
        errors
    }

    pub fn group(&self) -> &FgAbelianGroup {
        &self.group
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &GroupElement {
        &self.generators[i]
    }

    /// Number of rays.
    pub fn num_rays(&self) -> usize {
        self.fan.num_rays()
    }

    /// Number of lattice vectors (rays plus extra data).
    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn has_extra_data(&self) -> bool {
        self.num_generators() > self.num_rays()
    }

    /// Is the lattice torsion-free?
    pub fn is_reduced(&self) -> bool {
        self.group.is_free()
    }

    /// The map `Z^m -> N` with all columns.
    pub fn beta(&self) -> GroupHom {
        GroupHom::from_columns(
            FgAbelianGroup::free(self.num_generators()),
            self.group.clone(),
            &self.generators,
        )
        .expect("columns are genuine elements")
    }

    /// The map `Z^n -> N` with the ray columns only.
    pub fn beta_min(&self) -> GroupHom {
        GroupHom::from_columns(
            FgAbelianGroup::free(self.num_rays()),
            self.group.clone(),
            &self.generators[..self.num_rays()],
        )
        .expect("columns are genuine elements")
    }

    /// Gale dual of the minimal map.
    pub fn gale_dual_min(&self) -> Result<GaleDual> {
        gale_dual(&self.beta_min())
    }

    /// Drop the extra data.
    pub fn minimal(&self) -> StackyFan {
        StackyFan {
            group: self.group.clone(),
            fan: self.fan.clone(),
            generators: self.generators[..self.num_rays()].to_vec(),
        }
    }

    /// Kill the torsion of `N` (and drop extra data): the underlying reduced
    /// stacky fan.
    pub fn reduced(&self) -> StackyFan {
        let free = self.group.free_quotient();
        let generators: Vec<GroupElement> = self.generators[..self.num_rays()]
            .iter()
            .map(|b| free.element(b.free_part()))
            .collect();
        StackyFan {
            group: free,
            fan: self.fan.clone(),
            generators,
        }
    }

    /// The local group `N(sigma) = N / <b_i : i in sigma>` with its projection.
    pub fn local_group(&self, sigma: &Cone) -> (FgAbelianGroup, GroupHom) {
        if sigma.is_empty() {
            return (self.group.clone(), GroupHom::identity(&self.group));
        }
        let cols: Vec<Vec<BigInt>> = sigma.iter().map(|&i| self.generators[i].coords.clone()).collect();
        let gens = IntMatrix::from_columns(self.group.num_coords(), &cols);
        quotient_by_columns(&self.group, &gens)
    }

    /// Free part of an element as a rational vector.
    pub fn free_part_q(&self, e: &GroupElement) -> Vec<BigRational> {
        e.free_part().into_iter().map(BigRational::from_integer).collect()
    }

    /// Minimal cone of an element's image and its exact ray coordinates there.
    pub fn element_cone_coordinates(&self, e: &GroupElement) -> Result<(Cone, BTreeMap<usize, BigRational>)> {
        let point = self.free_part_q(e);
        let cone = self.fan.minimal_cone_containing(std::slice::from_ref(&point))?;
        // coordinates on the stacky vectors (not the fan's primitive rays)
        let cols: Vec<Vec<BigRational>> = cone
            .iter()
            .map(|&i| self.free_part_q(&self.generators[i]))
            .collect();
        let coords = solve_in_cone(&cols, &point).ok_or(Error::NotInSupport)?;
        let map: BTreeMap<usize, BigRational> = cone.iter().copied().zip(coords).collect();
        Ok((cone, map))
    }

    /// Lift the class `t` of `N(sigma)` to its unique representative with
    /// fractional coordinates in `[0, 1)` on the rays of `sigma`.
    fn box_lift(&self, sigma: &Cone, nsigma: &FgAbelianGroup, proj: &GroupHom, t: &GroupElement) -> BoxElement {
        // solve proj(v) = t over the integers
        let relations = nsigma.relation_matrix();
        let block = proj.matrix.hstack(&relations);
        let sol = block.solve(&t.coords).expect("projection is surjective");
        let v0 = self.group.element(sol[..self.group.num_coords()].to_vec());
        // ray coordinates of the free image inside the span of sigma
        let point = self.free_part_q(&v0);
        let cols: Vec<Vec<BigRational>> = sigma
            .iter()
            .map(|&i| self.free_part_q(&self.generators[i]))
            .collect();
        let coords = solve_in_span(&cols, &point)
            .expect("torsion classes lie in the rational span of the cone");
        // shift by integer multiples of the stacky vectors into the box window
        let mut v = v0;
        let mut alphas = BTreeMap::new();
        for (&i, x) in sigma.iter().zip(coords.iter()) {
            let fl = x.floor();
            let frac = x - &fl;
            if !fl.is_zero() {
                v = v.sub(&self.generators[i].scale(fl.numer()));
            }
            if !frac.is_zero() {
                alphas.insert(i, frac);
            }
        }
        debug_assert_eq!(proj.apply(&v), *t);
        let cone: Cone = alphas.keys().copied().collect();
        debug_assert!(self.fan.is_cone(&cone));
        BoxElement { element: v, cone, alphas }
    }

    /// All box elements of a cone: one per torsion class of the local group
    /// (the whole local group when `sigma` is top-dimensional).
    pub fn box_elements(&self, sigma: &Cone) -> Vec<BoxElement> {
        assert!(self.fan.is_cone(sigma), "box of a non-cone");
        let (nsigma, proj) = self.local_group(sigma);
        let mut out: Vec<BoxElement> = nsigma
            .torsion_elements()
            .iter()
            .map(|t| self.box_lift(sigma, &nsigma, &proj, t))
            .collect();
        out.sort();
        out
    }

    /// The box of the whole stacky fan: union over top-dimensional cones,
    /// falling back to the zero cone when the fan has no rays.
    pub fn box_total(&self) -> Vec<BoxElement> {
        let mut cones = if self.fan.num_rays() == 0 {
            vec![Cone::new()]
        } else {
            self.fan.top_cones()
        };
        if cones.is_empty() {
            cones = self.fan.maximal_cones();
        }
        let mut out: Vec<BoxElement> = Vec::new();
        for sigma in cones {
            for b in self.box_elements(&sigma) {
                if !out.iter().any(|o| o.element == b.element) {
                    out.push(b);
                }
            }
        }
        out.sort();
        out
    }

    /// The inverse of a box element: the unique `w` in the box of the same
    /// cone with `v + w = 0` in the local group.
    pub fn box_inverse(&self, v: &BoxElement) -> BoxElement {
        let (nsigma, proj) = self.local_group(&v.cone);
        let target = proj.apply(&v.element).neg();
        self.box_lift(&v.cone, &nsigma, &proj, &target)
    }

    /// Write `c = v + sum m_i b_i` with `v` a box element and `m_i >= 0`
    /// supported on the minimal cone of `c`. Fails when the image of `c`
    /// lies outside the fan's support.
    pub fn box_reduce(&self, c: &GroupElement) -> Result<(BoxElement, BTreeMap<usize, BigInt>)> {
        let (cone, coords) = self.element_cone_coordinates(c)?;
        let mut v = c.clone();
        let mut multiplicities = BTreeMap::new();
        let mut alphas = BTreeMap::new();
        for (&i, x) in cone.iter().zip(coords.values()) {
            let fl = x.floor();
            let frac = x - &fl;
            if !fl.is_zero() {
                v = v.sub(&self.generators[i].scale(fl.numer()));
                multiplicities.insert(i, fl.numer().clone());
            }
            if !frac.is_zero() {
                alphas.insert(i, frac);
            }
        }
        let vcone: Cone = alphas.keys().copied().collect();
        Ok((
            BoxElement { element: v, cone: vcone, alphas },
            multiplicities,
        ))
    }

    /// The quotient stacky fan by a cone.
    pub fn quotient(&self, sigma: &Cone) -> Result<QuotientStackyFan> {
        assert!(self.fan.is_cone(sigma), "quotient by a non-cone");
        if sigma.is_empty() {
            return Ok(QuotientStackyFan {
                stacky_fan: self.clone(),
                sigma: Cone::new(),
                parent_ray_of: (0..self.fan.num_rays()).collect(),
                projection: GroupHom::identity(&self.group),
            });
        }
        let (nsigma, proj) = self.local_group(sigma);
        let link_rays = self.fan.link_rays(sigma);
        let images: Vec<GroupElement> = link_rays.iter().map(|&i| proj.apply(&self.generators[i])).collect();
        let new_rays: Vec<Vec<BigInt>> = images.iter().map(|e| primitive_vector(&e.free_part())).collect();
        let index_of = |parent: usize| link_rays.iter().position(|&i| i == parent).unwrap();
        let new_max: Vec<Vec<usize>> = self
            .fan
            .link(sigma)
            .into_iter()
            .map(|tau| tau.iter().map(|&i| index_of(i)).collect())
            .collect();
        let qfan = Fan::new(nsigma.free_rank, new_rays, &new_max)?;
        // generators: link images then extra data images
        let mut generators = images;
        for b in &self.generators[self.num_rays()..] {
            generators.push(proj.apply(b));
        }
        let stacky_fan = StackyFan::new(nsigma, qfan, generators)?;
        Ok(QuotientStackyFan {
            stacky_fan,
            sigma: sigma.clone(),
            parent_ray_of: link_rays,
            projection: proj,
        })
    }

    /// The twisted sectors: one quotient stacky fan per box element.
    pub fn sectors(&self) -> Result<Vec<(BoxElement, QuotientStackyFan)>> {
        self.box_total()
            .into_iter()
            .map(|v| {
                let q = self.quotient(&v.cone)?;
                Ok((v, q))
            })
            .collect()
    }

    /// Coefficients `a_i` with `v1 + v2 + v3 = sum a_i b_i` over the minimal
    /// common cone. Valid exactly when the images share a cone and the sum
    /// vanishes in the local group of that cone; then each `a_i` lies in
    /// `{0, 1, 2}`.
    pub fn triple_coefficients(
        &self,
        v1: &BoxElement,
        v2: &BoxElement,
        v3: &BoxElement,
    ) -> Result<BTreeMap<usize, u32>> {
        let points: Vec<Vec<BigRational>> = [v1, v2, v3]
            .iter()
            .map(|v| self.free_part_q(&v.element))
            .collect();
        let sigma = self.fan.minimal_cone_containing(&points)?;
        let (_, proj) = self.local_group(&sigma);
        let total = v1.element.add(&v2.element).add(&v3.element);
        if !proj.apply(&total).is_zero() {
            return Err(Error::NonIntegral);
        }
        let mut out = BTreeMap::new();
        for &i in &sigma {
            let sum = v1.alpha(i) + v2.alpha(i) + v3.alpha(i);
            debug_assert!(sum.is_integer());
            let a = sum.to_integer();
            debug_assert!(a >= BigInt::zero() && a <= BigInt::from(2));
            out.insert(i, u32::try_from(a).expect("coefficient in 0..=2"));
        }
        Ok(out)
    }
}

/// Is `v` a positive multiple of the primitive vector of `ray` (same ray,
/// same direction)?
fn positive_multiple_of_same_primitive(v: &[BigInt], ray: &[BigInt]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return false;
    }
    let pv = primitive_vector(v);
    let pr = primitive_vector(ray);
    // primitive vectors on the same ray with the same orientation are equal
    pv == pr
}

/// Solve `point = sum x_j cols_j` requiring nonnegative coordinates.
fn solve_in_cone(cols: &[Vec<BigRational>], point: &[BigRational]) -> Option<Vec<BigRational>> {
    let x = solve_in_span(cols, point)?;
    if x.iter().all(|c| !c.is_negative()) {
        Some(x)
    } else {
        None
    }
}

/// Solve `point = sum x_j cols_j` exactly (columns linearly independent).
fn solve_in_span(cols: &[Vec<BigRational>], point: &[BigRational]) -> Option<Vec<BigRational>> {
    if cols.is_empty() {
        return if point.iter().all(|x| x.is_zero()) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let rows = cols[0].len();
    let mut m = crate::lattice::QMatrix::zeros(rows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    m.solve_independent(point)
}

/// Cokernel of the full map `beta`, for validation reports.
pub fn beta_cokernel(sf: &StackyFan) -> FgAbelianGroup {
    cokernel(&sf.beta()).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::cone_from;
    use num::One;

    pub fn p1() -> StackyFan {
        let group = FgAbelianGroup::free(1);
        let fan = Fan::new(1, vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]], &[vec![0], vec![1]]).unwrap();
        let b = vec![group.element_from_i64(&[1]), group.element_from_i64(&[-1])];
        StackyFan::new(group, fan, b).unwrap()
    }

    pub fn p_1_2() -> StackyFan {
        let group = FgAbelianGroup::free(1);
        let fan = Fan::new(1, vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]], &[vec![0], vec![1]]).unwrap();
        let b = vec![group.element_from_i64(&[1]), group.element_from_i64(&[-2])];
        StackyFan::new(group, fan, b).unwrap()
    }

    pub fn p_1_3() -> StackyFan {
        let group = FgAbelianGroup::free(1);
        let fan = Fan::new(1, vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]], &[vec![0], vec![1]]).unwrap();
        let b = vec![group.element_from_i64(&[1]), group.element_from_i64(&[-3])];
        StackyFan::new(group, fan, b).unwrap()
    }

    pub fn p112() -> StackyFan {
        let group = FgAbelianGroup::free(2);
        let fan = Fan::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
                vec![BigInt::from(-1), BigInt::from(-2)],
            ],
            &[vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let b = vec![
            group.element_from_i64(&[1, 0]),
            group.element_from_i64(&[0, 1]),
            group.element_from_i64(&[-1, -2]),
        ];
        StackyFan::new(group, fan, b).unwrap()
    }

    pub fn gerbe_z2_z4() -> StackyFan {
        let group = FgAbelianGroup::new(0, vec![BigInt::from(2), BigInt::from(4)]).unwrap();
        let fan = Fan::new(0, vec![], &[]).unwrap();
        let b = vec![group.element_from_i64(&[1, 1])];
        StackyFan::new(group, fan, b).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(p1().validate().is_ok());
        assert!(gerbe_z2_z4().validate().is_ok());

        // b_2 = 2 lies on the ray +1, not on ray -1
        let group = FgAbelianGroup::free(1);
        let fan = Fan::new(1, vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]], &[vec![0], vec![1]]).unwrap();
        let b = vec![group.element_from_i64(&[1]), group.element_from_i64(&[2])];
        let sf = StackyFan { group, fan, generators: b };
        assert_eq!(sf.validation_report(), vec![Error::RayMismatch(2)]);
    }

    #[test]
    fn gerbe_cokernel_is_finite() {
        let sf = gerbe_z2_z4();
        assert_eq!(
            beta_cokernel(&sf),
            FgAbelianGroup::new(0, vec![BigInt::from(2)]).unwrap()
        );
    }

    #[test]
    fn minimal_and_reduced() {
        // P(1,2) with one extra vector
        let group = FgAbelianGroup::free(1);
        let fan = Fan::new(1, vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]], &[vec![0], vec![1]]).unwrap();
        let b = vec![
            group.element_from_i64(&[1]),
            group.element_from_i64(&[-2]),
            group.element_from_i64(&[5]),
        ];
        let sf = StackyFan::new(group, fan, b).unwrap();
        let min = sf.minimal();
        assert_eq!(min, p_1_2());
        assert_eq!(min.minimal(), min);

        // gerbe: reduced stacky fan is a point
        let red = gerbe_z2_z4().reduced();
        assert!(red.group().is_trivial());
        assert_eq!(red.num_generators(), 0);

        // torsion example: N = Z + Z/2 over the line fan
        let group = FgAbelianGroup::new(1, vec![BigInt::from(2)]).unwrap();
        let fan = Fan::new(1, vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]], &[vec![0], vec![1]]).unwrap();
        let b = vec![group.element_from_i64(&[1, 0]), group.element_from_i64(&[-1, 1])];
        let sf = StackyFan::new(group, fan, b).unwrap();
        assert_eq!(sf.reduced(), p1());
    }

    #[test]
    fn box_smooth_is_trivial() {
        let sf = p1();
        let total = sf.box_total();
        assert_eq!(total.len(), 1);
        assert!(total[0].is_zero());
    }

    #[test]
    fn box_p12() {
        let sf = p_1_2();
        let sigma = cone_from(&[1]);
        let elems = sf.box_elements(&sigma);
        assert_eq!(elems.len(), 2);
        let v = elems.iter().find(|e| !e.is_zero()).unwrap();
        assert_eq!(v.element.coords, vec![BigInt::from(-1)]);
        assert_eq!(v.alpha(1), BigRational::new(BigInt::from(1), BigInt::from(2)));
        assert_eq!(sf.box_total().len(), 2);
    }

    #[test]
    fn box_p13() {
        let sf = p_1_3();
        let total = sf.box_total();
        assert_eq!(total.len(), 3);
        let mut alphas: Vec<BigRational> = total.iter().map(|v| v.alpha(1)).collect();
        alphas.sort();
        assert_eq!(
            alphas,
            vec![
                BigRational::zero(),
                BigRational::new(BigInt::from(1), BigInt::from(3)),
                BigRational::new(BigInt::from(2), BigInt::from(3)),
            ]
        );
    }

    #[test]
    fn box_gerbe_is_whole_group() {
        let sf = gerbe_z2_z4();
        let total = sf.box_total();
        assert_eq!(total.len(), 8);
        assert!(total.iter().all(|v| v.cone.is_empty()));
    }

    #[test]
    fn box_count_matches_local_group_index() {
        // |box(sigma)| equals the product of the invariant factors of the
        // local group, computed independently from the raw relation matrix
        for sf in [p1(), p_1_2(), p_1_3(), p112(), gerbe_z2_z4()] {
            for sigma in sf.fan().cones().cloned().collect::<Vec<_>>() {
                let cols: Vec<Vec<BigInt>> = sigma.iter().map(|&i| sf.generator(i).coords.clone()).collect();
                let gens = IntMatrix::from_columns(sf.group().num_coords(), &cols);
                let block = gens.hstack(&sf.group().relation_matrix());
                let (_, d, _) = block.smith_normal_form();
                let mut index = BigInt::one();
                for i in 0..d.rows().min(d.cols()) {
                    if !d.at(i, i).is_zero() {
                        index *= d.at(i, i);
                    }
                }
                assert_eq!(BigInt::from(sf.box_elements(&sigma).len()), index);
            }
        }
    }

    #[test]
    fn box_inverse_involution() {
        for sf in [p1(), p_1_2(), p_1_3(), p112(), gerbe_z2_z4()] {
            for v in sf.box_total() {
                let w = sf.box_inverse(&v);
                assert_eq!(w.cone, v.cone);
                let ww = sf.box_inverse(&w);
                assert_eq!(ww.element, v.element);
                if v.is_zero() {
                    assert!(w.is_zero());
                }
            }
        }
        // P(1,2): the order-two element is its own inverse
        let sf = p_1_2();
        let v = sf.box_total().into_iter().find(|v| !v.is_zero()).unwrap();
        assert_eq!(sf.box_inverse(&v).element, v.element);
        // P(1,3): the two twisted elements swap
        let sf = p_1_3();
        let tw: Vec<BoxElement> = sf.box_total().into_iter().filter(|v| !v.is_zero()).collect();
        assert_eq!(sf.box_inverse(&tw[0]).element, tw[1].element);
    }

    #[test]
    fn quotient_examples() {
        let sf = p_1_2();
        let q = sf.quotient(&Cone::new()).unwrap();
        assert_eq!(q.stacky_fan, sf);

        // P(1,2) by the stacky ray: local group Z/2, empty fan
        let q = sf.quotient(&cone_from(&[1])).unwrap();
        assert_eq!(
            q.stacky_fan.group(),
            &FgAbelianGroup::new(0, vec![BigInt::from(2)]).unwrap()
        );
        assert_eq!(q.stacky_fan.num_rays(), 0);
        assert_eq!(q.stacky_fan.num_generators(), 0);

        // P(1,1,2)-style: quotient the plane fan by a ray
        let sf = p112();
        let q = sf.quotient(&cone_from(&[0])).unwrap();
        assert_eq!(q.stacky_fan.group(), &FgAbelianGroup::free(1));
        assert_eq!(q.stacky_fan.num_rays(), 2);
        assert!(q.stacky_fan.fan().is_complete());
    }

    #[test]
    fn sectors_examples() {
        let sf = p1();
        let s = sf.sectors().unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].1.stacky_fan, sf);

        let sf = p_1_2();
        let s = sf.sectors().unwrap();
        assert_eq!(s.len(), 2);
        let twisted = s.iter().find(|(v, _)| !v.is_zero()).unwrap();
        assert!(twisted.1.stacky_fan.group().is_finite());

        let sf = gerbe_z2_z4();
        let s = sf.sectors().unwrap();
        assert_eq!(s.len(), 8);
        for (_, q) in &s {
            assert_eq!(q.stacky_fan.group(), sf.group());
        }
    }

    #[test]
    fn triple_coefficients_examples() {
        let sf = p_1_2();
        let total = sf.box_total();
        let zero = total.iter().find(|v| v.is_zero()).unwrap().clone();
        let v = total.iter().find(|v| !v.is_zero()).unwrap().clone();

        let a = sf.triple_coefficients(&zero, &zero, &zero).unwrap();
        assert!(a.values().all(|&x| x == 0));

        let a = sf.triple_coefficients(&v, &v, &zero).unwrap();
        assert_eq!(a.get(&1), Some(&1));

        assert_eq!(sf.triple_coefficients(&v, &v, &v).unwrap_err(), Error::NonIntegral);

        let sf = p_1_3();
        let v2 = sf
            .box_total()
            .into_iter()
            .find(|v| v.alpha(1) == BigRational::new(BigInt::from(2), BigInt::from(3)))
            .unwrap();
        let a = sf.triple_coefficients(&v2, &v2, &v2).unwrap();
        assert_eq!(a.get(&1), Some(&2));
    }

    #[test]
    fn triple_with_inverse_of_sum_is_valid() {
        for sf in [p1(), p_1_2(), p_1_3(), p112(), gerbe_z2_z4()] {
            let total = sf.box_total();
            for v1 in &total {
                for v2 in &total {
                    let sum = v1.element.add(&v2.element);
                    let reduced = sf.box_reduce(&sum);
                    let Ok((u, _)) = reduced else { continue };
                    // the fractional parts must sit in a cone compatible with both
                    let pts = vec![
                        sf.free_part_q(&v1.element),
                        sf.free_part_q(&v2.element),
                    ];
                    if sf.fan().minimal_cone_containing(&pts).is_err() {
                        continue;
                    }
                    let v3 = sf.box_inverse(&u);
                    let coeffs = sf.triple_coefficients(v1, v2, &v3);
                    assert!(
                        coeffs.is_ok(),
                        "triple ({:?}, {:?}, {:?}) should be valid",
                        v1.element,
                        v2.element,
                        v3.element
                    );
                }
            }
        }
    }

    #[test]
    fn extra_data_does_not_change_box() {
        let group = FgAbelianGroup::free(1);
        let fan = Fan::new(1, vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]], &[vec![0], vec![1]]).unwrap();
        let b = vec![
            group.element_from_i64(&[1]),
            group.element_from_i64(&[-2]),
            group.element_from_i64(&[5]),
        ];
        let sf = StackyFan::new(group, fan, b).unwrap();
        let with_extra: Vec<_> = sf.box_total().into_iter().map(|v| v.element).collect();
        let without: Vec<_> = sf.minimal().box_total().into_iter().map(|v| v.element).collect();
        assert_eq!(with_extra, without);
    }

    #[test]
    fn box_reduce_roundtrip() {
        let sf = p_1_3();
        let v2 = sf
            .box_total()
            .into_iter()
            .find(|v| v.alpha(1) == BigRational::new(BigInt::from(2), BigInt::from(3)))
            .unwrap();
        let sum = v2.element.add(&v2.element.clone());
        let (u, mult) = sf.box_reduce(&sum).unwrap();
        assert_eq!(u.alpha(1), BigRational::new(BigInt::from(1), BigInt::from(3)));
        assert_eq!(mult.get(&1), Some(&BigInt::from(1)));
        // reassemble
        let mut back = u.element.clone();
        for (&i, k) in &mult {
            back = back.add(&sf.generator(i).scale(k));
        }
        assert_eq!(back, sum);
    }
}
