//! Simplicial fan combinatorics in a fixed lattice `Z^d`.
//!
//! Cones are sets of ray indices; the fan stores every face explicitly.
//! All geometry (membership, intersections, completeness) runs in exact
//! rational arithmetic.

use crate::error::{Error, Result};
use crate::lattice::{primitive_vector, IntMatrix, QMatrix};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeSet;

/// A cone of a fan, as the set of indices of its spanning rays.
pub type Cone = BTreeSet<usize>;

pub fn cone_from(indices: &[usize]) -> Cone {
    indices.iter().copied().collect()
}

/// A finite simplicial fan. Rays are integer direction vectors; every cone
/// is listed (faces included), and the usual fan axioms are checked at
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    ambient_rank: usize,
    rays: Vec<Vec<BigInt>>,
    cones: BTreeSet<Cone>,
}

impl Fan {
    /// Build a fan from rays and its maximal cones; lower faces are added
    /// automatically. Validates simpliciality and pairwise face intersections.
    pub fn new(ambient_rank: usize, rays: Vec<Vec<BigInt>>, max_cones: &[Vec<usize>]) -> Result<Self> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != ambient_rank {
                return Err(Error::invalid(format!("ray {} has wrong dimension", i)));
            }
            if r.iter().all(|x| x.is_zero()) {
                return Err(Error::invalid(format!("ray {} is the zero vector", i)));
            }
        }
        let mut cones: BTreeSet<Cone> = BTreeSet::new();
        cones.insert(Cone::new());
        for mc in max_cones {
            for &i in mc {
                if i >= rays.len() {
                    return Err(Error::invalid(format!("cone references missing ray {}", i)));
                }
            }
            let cone: Cone = mc.iter().copied().collect();
            if cone.len() != mc.len() {
                return Err(Error::invalid("cone lists a ray twice"));
            }
            // all subsets are faces
            let items: Vec<usize> = cone.iter().copied().collect();
            for mask in 0..(1u64 << items.len()) {
                let face: Cone = items
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                cones.insert(face);
            }
        }
        // every ray must appear in some cone
        for i in 0..rays.len() {
            if !cones.contains(&cone_from(&[i])) {
                return Err(Error::invalid(format!("ray {} appears in no cone", i)));
            }
        }
        let fan = Fan { ambient_rank, rays, cones };
        fan.check_simplicial()?;
        fan.check_intersections()?;
        Ok(fan)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn cones(&self) -> impl Iterator<Item = &Cone> {
        self.cones.iter()
    }

    pub fn is_cone(&self, c: &Cone) -> bool {
        self.cones.contains(c)
    }

    /// Cones of exactly the ambient dimension.
    pub fn top_cones(&self) -> Vec<Cone> {
        self.cones.iter().filter(|c| c.len() == self.ambient_rank).cloned().collect()
    }

    /// Maximal cones under inclusion.
    pub fn maximal_cones(&self) -> Vec<Cone> {
        self.cones
            .iter()
            .filter(|c| !self.cones.iter().any(|d| *c != d && c.is_subset(d)))
            .cloned()
            .collect()
    }

    fn ray_columns(&self, cone: &Cone) -> Vec<Vec<BigInt>> {
        cone.iter().map(|&i| self.rays[i].clone()).collect()
    }

    fn check_simplicial(&self) -> Result<()> {
        for cone in &self.cones {
            if cone.is_empty() {
                continue;
            }
            let m = IntMatrix::from_columns(self.ambient_rank, &self.ray_columns(cone));
            if m.rank() != cone.len() {
                return Err(Error::invalid(format!(
                    "cone {:?} is not simplicial (rays linearly dependent)",
                    cone
                )));
            }
        }
        Ok(())
    }

    /// The coordinates of `point` in the rays of `cone`, when `point` lies in
    /// the cone (all coordinates nonnegative); `None` otherwise.
    pub fn cone_coordinates(&self, cone: &Cone, point: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(point.len(), self.ambient_rank);
        if cone.is_empty() {
            return if point.iter().all(|x| x.is_zero()) {
                Some(Vec::new())
            } else {
                None
            };
        }
        let m = QMatrix::from_int_columns(self.ambient_rank, &self.ray_columns(cone));
        let coords = m.solve_independent(point)?;
        if coords.iter().all(|x| !x.is_negative()) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn cone_contains(&self, cone: &Cone, point: &[BigRational]) -> bool {
        self.cone_coordinates(cone, point).is_some()
    }

    /// The unique minimal cone containing all the given points.
    pub fn minimal_cone_containing(&self, points: &[Vec<BigRational>]) -> Result<Cone> {
        let candidates: Vec<&Cone> = self
            .cones
            .iter()
            .filter(|c| points.iter().all(|p| self.cone_contains(c, p)))
            .collect();
        if let Some(min) = candidates.iter().min_by_key(|c| c.len()) {
            return Ok((*min).clone());
        }
        // distinguish "outside the support" from "no common cone"
        for p in points {
            if !self.cones.iter().any(|c| self.cone_contains(c, p)) {
                return Err(Error::NotInSupport);
            }
        }
        Err(Error::NoCommonCone)
    }

    /// All cones `tau` with `tau` disjoint from `sigma` and `tau + sigma` a cone.
    pub fn link(&self, sigma: &Cone) -> Vec<Cone> {
        assert!(self.is_cone(sigma), "link of a non-cone");
        self.cones
            .iter()
            .filter(|tau| {
                tau.is_disjoint(sigma) && self.cones.contains(&tau.union(sigma).copied().collect())
            })
            .cloned()
            .collect()
    }

    /// Ray indices appearing in the link of `sigma`, in increasing order.
    pub fn link_rays(&self, sigma: &Cone) -> Vec<usize> {
        self.link(sigma)
            .into_iter()
            .filter(|t| t.len() == 1)
            .map(|t| *t.iter().next().unwrap())
            .collect()
    }

    /// Rays compatible with `sigma`: those in `sigma` or in its link.
    pub fn star_rays(&self, sigma: &Cone) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = sigma.clone();
        s.extend(self.link_rays(sigma));
        s
    }

    /// The quotient fan by `sigma`: rays are the primitive images of the
    /// link rays under the projection along `sigma`'s span. Returns the fan,
    /// the list of parent ray indices (position = new ray index), and the
    /// integer projection matrix.
    pub fn quotient_fan(&self, sigma: &Cone) -> Result<(Fan, Vec<usize>, IntMatrix)> {
        assert!(self.is_cone(sigma), "quotient by a non-cone");
        if sigma.is_empty() {
            return Ok((
                self.clone(),
                (0..self.rays.len()).collect(),
                IntMatrix::identity(self.ambient_rank),
            ));
        }
        let span = IntMatrix::from_columns(self.ambient_rank, &self.ray_columns(sigma));
        let (u, d, _) = span.smith_normal_form();
        let k = (0..d.rows().min(d.cols())).filter(|&i| !d.at(i, i).is_zero()).count();
        // rows of u past the rank project onto Z^d / saturation(span)
        let rows: Vec<usize> = (k..self.ambient_rank).collect();
        let projection = u.select_rows(&rows);
        let link_rays = self.link_rays(sigma);
        let new_rays: Vec<Vec<BigInt>> = link_rays
            .iter()
            .map(|&i| primitive_vector(&projection.mul_vec(&self.rays[i])))
            .collect();
        let index_of = |parent: usize| link_rays.iter().position(|&i| i == parent).unwrap();
        let new_max: Vec<Vec<usize>> = self
            .link(sigma)
            .into_iter()
            .map(|tau| tau.iter().map(|&i| index_of(i)).collect())
            .collect();
        let fan = Fan::new(self.ambient_rank - k, new_rays, &new_max)?;
        Ok((fan, link_rays, projection))
    }

    /// Minimal subsets of ray indices that do not span a cone. Every
    /// non-cone subset contains one of these.
    pub fn primitive_nonfaces(&self) -> Vec<Vec<usize>> {
        let n = self.rays.len();
        assert!(n <= 20, "too many rays for subset enumeration");
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut subsets: Vec<Cone> = Vec::new();
        for mask in 0u64..(1 << n) {
            let s: Cone = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            subsets.push(s);
        }
        subsets.sort_by_key(|s| (s.len(), s.iter().copied().collect::<Vec<_>>()));
        for s in &subsets {
            if s.is_empty() || self.cones.contains(s) {
                continue;
            }
            if out.iter().any(|m| m.iter().all(|i| s.contains(i))) {
                continue; // contains a smaller non-face
            }
            out.push(s.iter().copied().collect());
        }
        out
    }

    /// Exact completeness test: the support covers all of `Q^d` iff every
    /// maximal cone is top-dimensional and every wall (codimension-one face
    /// of a top cone) bounds exactly two top cones.
    pub fn is_complete(&self) -> bool {
        let d = self.ambient_rank;
        if d == 0 {
            return true;
        }
        let tops = self.top_cones();
        if tops.is_empty() {
            return false;
        }
        // purity: every cone lies in a top cone
        for c in &self.cones {
            if !tops.iter().any(|t| c.is_subset(t)) {
                return false;
            }
        }
        // wall pairing
        let mut walls: BTreeSet<Cone> = BTreeSet::new();
        for t in &tops {
            for &drop in t {
                let mut w = t.clone();
                w.remove(&drop);
                walls.insert(w);
            }
        }
        walls.iter().all(|w| tops.iter().filter(|t| w.is_subset(t)).count() == 2)
    }

    /// Pairwise cones must intersect in the common face: the point set
    /// `cone(sigma) /\ cone(tau)` has to equal `cone(sigma /\ tau)`.
    fn check_intersections(&self) -> Result<()> {
        let all: Vec<&Cone> = self.cones.iter().filter(|c| !c.is_empty()).collect();
        for (a, sigma) in all.iter().enumerate() {
            for tau in all.iter().skip(a + 1) {
                if sigma.is_subset(tau) || tau.is_subset(sigma) {
                    continue;
                }
                let common: Cone = sigma.intersection(tau).copied().collect();
                for gen in self.intersection_generators(sigma, tau) {
                    if !self.cone_contains(&common, &gen) {
                        return Err(Error::invalid(format!(
                            "cones {:?} and {:?} do not meet in a common face",
                            sigma, tau
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Generators of the cone `cone(sigma) /\ cone(tau)`, found by support
    /// enumeration on `{(l, m) >= 0 : R_sigma l = R_tau m}`.
    fn intersection_generators(&self, sigma: &Cone, tau: &Cone) -> Vec<Vec<BigRational>> {
        let s_cols = self.ray_columns(sigma);
        let t_cols = self.ray_columns(tau);
        let ns = s_cols.len();
        let total = ns + t_cols.len();
        assert!(total <= 16, "cones too large for intersection enumeration");
        // rows: ambient equations; columns: lambda then mu (mu negated)
        let mut a = QMatrix::zeros(self.ambient_rank, total);
        for (j, col) in s_cols.iter().enumerate() {
            for i in 0..self.ambient_rank {
                a.set(i, j, BigRational::from_integer(col[i].clone()));
            }
        }
        for (j, col) in t_cols.iter().enumerate() {
            for i in 0..self.ambient_rank {
                a.set(i, ns + j, BigRational::from_integer(-col[i].clone()));
            }
        }
        let mut gens = Vec::new();
        for mask in 1u64..(1 << total) {
            let support: Vec<usize> = (0..total).filter(|&i| mask & (1 << i) != 0).collect();
            let kernel = qmatrix_kernel(&a, &support);
            if kernel.len() != 1 {
                continue;
            }
            let v = &kernel[0];
            let positive = v.iter().all(|x| x.is_positive());
            let negative = v.iter().all(|x| x.is_negative());
            if !(positive || negative) {
                continue;
            }
            let sign = if positive { BigRational::one() } else { -BigRational::one() };
            // lambda part gives a point of the intersection
            let mut point = vec![BigRational::zero(); self.ambient_rank];
            for (pos, &col) in support.iter().enumerate() {
                if col < ns {
                    let coeff = &v[pos] * &sign;
                    let ray = &s_cols[col];
                    for i in 0..self.ambient_rank {
                        point[i] = &point[i] + &coeff * BigRational::from_integer(ray[i].clone());
                    }
                }
            }
            if point.iter().any(|x| !x.is_zero()) {
                gens.push(point);
            }
        }
        gens
    }
}

/// Kernel basis of the submatrix of `a` on the given columns (exact
/// Gauss-Jordan over the rationals).
fn qmatrix_kernel(a: &QMatrix, cols: &[usize]) -> Vec<Vec<BigRational>> {
    let rows = a.rows();
    let n = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| cols.iter().map(|&c| a.at(r, c).clone()).collect())
        .collect();
    let mut pivot_col_of_row: Vec<Option<usize>> = vec![None; rows];
    let mut is_pivot_col = vec![false; n];
    let mut rank = 0usize;
    for c in 0..n {
        let pivot = (rank..rows).find(|&r| !m[r][c].is_zero());
        if let Some(p) = pivot {
            m.swap(rank, p);
            let inv = m[rank][c].recip();
            for cc in 0..n {
                m[rank][cc] = &m[rank][cc] * &inv;
            }
            for r in 0..rows {
                if r != rank && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for cc in 0..n {
                        m[r][cc] = &m[r][cc] - &f * &m[rank][cc];
                    }
                }
            }
            pivot_col_of_row[rank] = Some(c);
            is_pivot_col[c] = true;
            rank += 1;
        }
    }
    let mut basis = Vec::new();
    for free in 0..n {
        if is_pivot_col[free] {
            continue;
        }
        let mut v = vec![BigRational::zero(); n];
        v[free] = BigRational::one();
        for r in 0..rank {
            let pc = pivot_col_of_row[r].unwrap();
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Convenience: rational vector from integers.
pub fn qvec(coords: &[i64]) -> Vec<BigRational> {
    coords.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect()
}

/// Rational vector from (numerator, denominator) pairs.
pub fn qvec_frac(coords: &[(i64, i64)]) -> Vec<BigRational> {
    coords
        .iter()
        .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1_fan() -> Fan {
        Fan::new(
            1,
            vec![vec![BigInt::from(1)], vec![BigInt::from(-1)]],
            &[vec![0], vec![1]],
        )
        .unwrap()
    }

    fn p2_fan() -> Fan {
        Fan::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
                vec![BigInt::from(-1), BigInt::from(-1)],
            ],
            &[vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    fn p112_fan() -> Fan {
        Fan::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
                vec![BigInt::from(-1), BigInt::from(-2)],
            ],
            &[vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap()
    }

    fn p1xp1_fan() -> Fan {
        Fan::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(-1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
                vec![BigInt::from(0), BigInt::from(-1)],
            ],
            &[vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
        )
        .unwrap()
    }

    #[test]
    fn rejects_overlapping_cones() {
        // two 2-dimensional cones overlapping in a full-dimensional region
        let bad = Fan::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
                vec![BigInt::from(1), BigInt::from(1)],
            ],
            &[vec![0, 1], vec![0, 2]],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn minimal_cone_examples() {
        let p1 = p1_fan();
        assert_eq!(p1.minimal_cone_containing(&[qvec(&[0])]).unwrap(), Cone::new());
        assert_eq!(
            p1.minimal_cone_containing(&[qvec_frac(&[(-3, 2)])]).unwrap(),
            cone_from(&[1])
        );
        let p112 = p112_fan();
        assert_eq!(
            p112.minimal_cone_containing(&[qvec_frac(&[(-1, 2), (-3, 2)])]).unwrap(),
            cone_from(&[0, 2])
        );
        // brute-force cross check: no smaller cone contains the point
        let pt = qvec_frac(&[(-1, 2), (-3, 2)]);
        let containing: Vec<&Cone> = p112.cones().filter(|c| p112.cone_contains(c, &pt)).collect();
        assert!(containing.iter().all(|c| c.len() >= 2));
    }

    #[test]
    fn not_in_support_and_no_common_cone() {
        let half = Fan::new(1, vec![vec![BigInt::from(1)]], &[vec![0]]).unwrap();
        assert_eq!(
            half.minimal_cone_containing(&[qvec(&[-1])]).unwrap_err(),
            Error::NotInSupport
        );
        let p1 = p1_fan();
        assert_eq!(
            p1.minimal_cone_containing(&[qvec(&[1]), qvec(&[-1])]).unwrap_err(),
            Error::NoCommonCone
        );
    }

    #[test]
    fn link_examples() {
        let p2 = p2_fan();
        let all: Vec<Cone> = p2.cones().cloned().collect();
        assert_eq!(p2.link(&Cone::new()), all);
        let link1 = p2.link(&cone_from(&[0]));
        assert_eq!(link1, vec![Cone::new(), cone_from(&[1]), cone_from(&[2])]);
        let p1 = p1_fan();
        assert_eq!(p1.link(&cone_from(&[0])), vec![Cone::new()]);
    }

    #[test]
    fn quotient_fan_examples() {
        let p2 = p2_fan();
        let (same, rays, proj) = p2.quotient_fan(&Cone::new()).unwrap();
        assert_eq!(&same, &p2);
        assert_eq!(rays, vec![0, 1, 2]);
        assert_eq!(proj, IntMatrix::identity(2));

        // quotient of the plane fan by one ray is the line fan
        let (q, link, _) = p2.quotient_fan(&cone_from(&[0])).unwrap();
        assert_eq!(q.ambient_rank(), 1);
        assert_eq!(link, vec![1, 2]);
        assert_eq!(q.num_rays(), 2);
        assert!(q.is_complete());
        let r0 = &q.rays()[0];
        let r1 = &q.rays()[1];
        assert_eq!(r0[0].clone() + r1[0].clone(), BigInt::from(0));

        // quotient by a top cone is the zero fan
        let p112 = p112_fan();
        let (point, link, _) = p112.quotient_fan(&cone_from(&[0, 2])).unwrap();
        assert_eq!(point.ambient_rank(), 0);
        assert!(link.is_empty());
        assert!(point.is_complete());
    }

    #[test]
    fn primitive_nonfaces_examples() {
        assert_eq!(p1_fan().primitive_nonfaces(), vec![vec![0, 1]]);
        assert_eq!(p2_fan().primitive_nonfaces(), vec![vec![0, 1, 2]]);
        assert_eq!(p1xp1_fan().primitive_nonfaces(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn nonfaces_avoid_cones() {
        for fan in [p1_fan(), p2_fan(), p112_fan(), p1xp1_fan()] {
            for nf in fan.primitive_nonfaces() {
                for c in fan.cones() {
                    assert!(!nf.iter().all(|i| c.contains(i)));
                }
            }
        }
    }

    #[test]
    fn completeness() {
        assert!(p1_fan().is_complete());
        assert!(p2_fan().is_complete());
        assert!(p112_fan().is_complete());
        assert!(p1xp1_fan().is_complete());
        let half = Fan::new(1, vec![vec![BigInt::from(1)]], &[vec![0]]).unwrap();
        assert!(!half.is_complete());
        let quadrant = Fan::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
            ],
            &[vec![0, 1]],
        )
        .unwrap();
        assert!(!quadrant.is_complete());
    }

    #[test]
    fn monotone_minimal_cone() {
        let p2 = p2_fan();
        let a = p2.minimal_cone_containing(&[qvec(&[1, 0])]).unwrap();
        let b = p2.minimal_cone_containing(&[qvec(&[1, 0]), qvec(&[1, 1])]).unwrap();
        assert!(a.is_subset(&b));
    }

    #[test]
    fn link_quotient_ray_bijection() {
        let p2 = p2_fan();
        for sigma in p2.cones().cloned().collect::<Vec<_>>() {
            let (q, link, _) = p2.quotient_fan(&sigma).unwrap();
            assert_eq!(q.num_rays(), link.len());
            assert_eq!(link, p2.link_rays(&sigma));
        }
    }
}
