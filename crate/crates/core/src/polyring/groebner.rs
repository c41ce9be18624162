//! Buchberger's algorithm with sugar-strategy pair selection, normal forms,
//! standard monomial bases of finite quotients, and ring-map verification.

use crate::error::{Error, Result};
use crate::polyring::poly::{Monomial, MonomialOrder, Poly};
use crate::polyring::scalar::Scalar;
use std::collections::BTreeSet;

/// Hard cap on processed S-pairs; generously above anything desk scale needs.
pub const DEFAULT_PAIR_CAP: usize = 20_000;

/// A finitely generated ideal with a chosen monomial order.
#[derive(Clone, Debug)]
pub struct Ideal {
    pub generators: Vec<Poly>,
    pub order: MonomialOrder,
}

impl Ideal {
    pub fn new(generators: Vec<Poly>, order: MonomialOrder) -> Self {
        Ideal { generators, order }
    }
}

/// A reduced Groebner basis: monic generators, no leading monomial divides
/// another, every generator fully reduced against the rest.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub polys: Vec<Poly>,
    pub order: MonomialOrder,
    leading: Vec<Monomial>,
}

impl GroebnerBasis {
    pub fn leading_monomials(&self) -> &[Monomial] {
        &self.leading
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Is the polynomial in the ideal?
    pub fn contains(&self, p: &Poly) -> bool {
        normal_form(p, self).is_zero()
    }
}

/// Fully reduce `p` against the basis: no term of the result is divisible by
/// any leading monomial. Idempotent and linear over the coefficient field.
pub fn normal_form(p: &Poly, gb: &GroebnerBasis) -> Poly {
    let table = p.table().clone();
    let field = p.field().clone();
    let mut rem = Poly::zero(&table, &field);
    let mut work = p.clone();
    while !work.is_zero() {
        let (lm, lc) = {
            let (m, c) = work.leading(gb.order).unwrap();
            (m.clone(), c.clone())
        };
        let reducer = gb
            .leading
            .iter()
            .position(|g| g.divides(&lm));
        match reducer {
            Some(k) => {
                let g = &gb.polys[k];
                let (glm, glc) = g.leading(gb.order).unwrap();
                let factor_m = glm.quotient_into(&lm);
                let factor_c = lc.mul(&glc.inv());
                work = work.sub(&g.mul_monomial(&factor_m, &factor_c));
            }
            None => {
                // move the irreducible leading term to the remainder
                let mono = Poly::monomial(&table, &field, lm.clone(), lc.clone());
                rem = rem.add(&mono);
                work = work.sub(&mono);
            }
        }
    }
    rem
}

fn s_poly(f: &Poly, g: &Poly, order: MonomialOrder) -> Poly {
    let (fm, fc) = f.leading(order).unwrap();
    let (gm, gc) = g.leading(order).unwrap();
    let l = fm.lcm(gm);
    let a = f.mul_monomial(&fm.quotient_into(&l), &fc.inv());
    let b = g.mul_monomial(&gm.quotient_into(&l), &gc.inv());
    a.sub(&b)
}

/// Reduced Groebner basis via Buchberger with the sugar selection strategy.
/// Fails with [`Error::ResourceLimit`] past `max_pairs` processed pairs.
pub fn groebner_capped(ideal: &Ideal, max_pairs: usize) -> Result<GroebnerBasis> {
    let order = ideal.order;
    let mut basis: Vec<Poly> = Vec::new();
    let mut sugars: Vec<u64> = Vec::new();
    for g in &ideal.generators {
        if !g.is_zero() {
            basis.push(g.monic(order));
            sugars.push(g.leading(order).unwrap().0.total_degree());
        }
    }
    // pair queue entries: (sugar, lcm, i, j)
    let mut queue: BTreeSet<(u64, Monomial, usize, usize)> = BTreeSet::new();
    let add_pairs = |queue: &mut BTreeSet<(u64, Monomial, usize, usize)>,
                     basis: &[Poly],
                     sugars: &[u64],
                     j: usize| {
        let (jm, _) = basis[j].leading(order).unwrap();
        for i in 0..j {
            let (im, _) = basis[i].leading(order).unwrap();
            let l = im.lcm(jm);
            if im.gcd_is_one(jm) {
                continue; // coprime leading terms reduce to zero
            }
            let sugar = (sugars[i] + l.total_degree() - im.total_degree())
                .max(sugars[j] + l.total_degree() - jm.total_degree());
            queue.insert((sugar, l, i, j));
        }
    };
    for j in 0..basis.len() {
        add_pairs(&mut queue, &basis, &sugars, j);
    }
    let mut processed = 0usize;
    while let Some(entry) = queue.iter().next().cloned() {
        queue.remove(&entry);
        let (pair_sugar, _, i, j) = entry;
        processed += 1;
        if processed > max_pairs {
            return Err(Error::ResourceLimit {
                processed,
                basis_len: basis.len(),
            });
        }
        let s = s_poly(&basis[i], &basis[j], order);
        let interim = GroebnerBasis {
            leading: basis
                .iter()
                .map(|p| p.leading(order).unwrap().0.clone())
                .collect(),
            polys: basis.clone(),
            order,
        };
        let r = normal_form(&s, &interim);
        if !r.is_zero() {
            let sugar = pair_sugar.max(r.leading(order).unwrap().0.total_degree());
            basis.push(r.monic(order));
            sugars.push(sugar);
            add_pairs(&mut queue, &basis, &sugars, basis.len() - 1);
        }
    }
    Ok(reduce_basis(basis, order))
}

pub fn groebner(ideal: &Ideal) -> Result<GroebnerBasis> {
    groebner_capped(ideal, DEFAULT_PAIR_CAP)
}

fn reduce_basis(mut basis: Vec<Poly>, order: MonomialOrder) -> GroebnerBasis {
    // drop generators whose leading monomial is divisible by another's
    let mut keep: Vec<bool> = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let (mi, _) = basis[i].leading(order).unwrap();
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (mj, _) = basis[j].leading(order).unwrap();
            if mj.divides(mi) && (mj != mi || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut kept: Vec<Poly> = basis
        .drain(..)
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p)
        .collect();
    // fully inter-reduce
    loop {
        let mut changed = false;
        for i in 0..kept.len() {
            let others = GroebnerBasis {
                leading: kept
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, p)| p.leading(order).unwrap().0.clone())
                    .collect(),
                polys: kept
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, p)| p.clone())
                    .collect(),
                order,
            };
            let r = normal_form(&kept[i], &others).monic(order);
            if r != kept[i] {
                kept[i] = r;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    kept.retain(|p| !p.is_zero());
    kept.sort_by(|a, b| {
        let (ma, _) = a.leading(order).unwrap();
        let (mb, _) = b.leading(order).unwrap();
        order.cmp(ma, mb)
    });
    let leading = kept.iter().map(|p| p.leading(order).unwrap().0.clone()).collect();
    GroebnerBasis { polys: kept, order, leading }
}

/// Standard monomials of the quotient ring: those divisible by no leading
/// monomial. `None` when the quotient is infinite-dimensional.
pub fn quotient_basis(gb: &GroebnerBasis, nvars: usize) -> Option<Vec<Monomial>> {
    if gb.leading.iter().any(|m| m.is_one()) {
        return Some(Vec::new()); // the unit ideal
    }
    // finite dimension iff every variable has a pure power among the leads
    for v in 0..nvars {
        let has_pure = gb
            .leading
            .iter()
            .any(|m| m.0.iter().enumerate().all(|(i, &e)| (i == v) == (e > 0)));
        if !has_pure {
            return None;
        }
    }
    let mut out: BTreeSet<Monomial> = BTreeSet::new();
    let mut frontier = vec![Monomial::one(nvars)];
    out.insert(Monomial::one(nvars));
    while let Some(m) = frontier.pop() {
        for v in 0..nvars {
            let mut next = m.clone();
            next.0[v] += 1;
            if out.contains(&next) {
                continue;
            }
            if gb.leading.iter().any(|l| l.divides(&next)) {
                continue;
            }
            out.insert(next.clone());
            frontier.push(next);
        }
    }
    let mut sorted: Vec<Monomial> = out.into_iter().collect();
    sorted.sort_by(|a, b| gb.order.cmp(a, b));
    Some(sorted)
}

/// Outcome of checking a candidate ring map between two presented quotients.
#[derive(Clone, Debug)]
pub struct MapCheckReport {
    /// First source relation that does not map into the target ideal.
    pub failing_relation: Option<(usize, Poly)>,
    /// Quotient dimensions over the coefficient field, when finite.
    pub source_dimension: Option<usize>,
    pub target_dimension: Option<usize>,
    /// Whether the induced linear map is bijective (only when both finite).
    pub bijective: Option<bool>,
}

impl MapCheckReport {
    pub fn is_homomorphism(&self) -> bool {
        self.failing_relation.is_none()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_homomorphism() && self.bijective == Some(true)
    }
}

/// Check that sending the source generators to `images` defines a ring map
/// of quotients, and whether the induced linear map is bijective.
pub fn ring_map_check(
    source_relations: &[Poly],
    images: &[Poly],
    target: &GroebnerBasis,
    order: MonomialOrder,
    max_pairs: usize,
) -> Result<MapCheckReport> {
    let mut failing = None;
    for (k, rel) in source_relations.iter().enumerate() {
        let mapped = rel.substitute(images);
        let nf = normal_form(&mapped, target);
        if !nf.is_zero() {
            failing = Some((k, nf));
            break;
        }
    }
    let source_gb = groebner_capped(
        &Ideal::new(source_relations.to_vec(), order),
        max_pairs,
    )?;
    let src_nvars = source_relations
        .first()
        .map(|p| p.table().len())
        .unwrap_or_else(|| images.len());
    let tgt_nvars = images.first().map(|p| p.table().len()).unwrap_or(0);
    let source_basis = quotient_basis(&source_gb, src_nvars);
    let target_basis = quotient_basis(target, tgt_nvars);
    let source_dimension = source_basis.as_ref().map(|b| b.len());
    let target_dimension = target_basis.as_ref().map(|b| b.len());
    let mut bijective = None;
    if failing.is_none() {
        if let (Some(sb), Some(tb)) = (&source_basis, &target_basis) {
            if sb.len() != tb.len() {
                bijective = Some(false);
            } else if sb.is_empty() {
                bijective = Some(true);
            } else {
                // matrix of the induced linear map in the standard bases
                let field = images
                    .first()
                    .map(|p| p.field().clone())
                    .expect("images required for the linear check");
                let table = images[0].table().clone();
                let mut columns: Vec<Vec<Scalar>> = Vec::new();
                for m in sb {
                    let src_mono = Poly::monomial(
                        source_relations
                            .first()
                            .map(|p| p.table())
                            .unwrap_or(&table),
                        &field,
                        m.clone(),
                        field.one(),
                    );
                    let img = normal_form(&src_mono.substitute(images), target);
                    let col: Vec<Scalar> = tb.iter().map(|t| img.coefficient(t)).collect();
                    columns.push(col);
                }
                bijective = Some(scalar_matrix_invertible(&columns));
            }
        }
    }
    Ok(MapCheckReport {
        failing_relation: failing,
        source_dimension,
        target_dimension,
        bijective,
    })
}

/// Rank of a square scalar matrix given by columns; exact Gauss elimination.
pub fn scalar_matrix_rank(columns: &[Vec<Scalar>]) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let rows = columns[0].len();
    let mut m: Vec<Vec<Scalar>> = columns.to_vec();
    let mut rank = 0;
    for r in 0..rows {
        let pivot = (rank..m.len()).find(|&c| !m[c][r].is_zero());
        if let Some(pc) = pivot {
            m.swap(rank, pc);
            let inv = m[rank][r].inv();
            for x in m[rank].iter_mut() {
                *x = x.mul(&inv);
            }
            for c in 0..m.len() {
                if c != rank && !m[c][r].is_zero() {
                    let f = m[c][r].clone();
                    for i in 0..rows {
                        let delta = f.mul(&m[rank][i]);
                        m[c][i] = m[c][i].sub(&delta);
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Solve `M g = rhs` for a square column-major scalar matrix, if possible.
pub fn scalar_matrix_solve(columns: &[Vec<Scalar>], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = columns.len();
    if n == 0 {
        return if rhs.is_empty() { Some(Vec::new()) } else { None };
    }
    assert_eq!(columns[0].len(), rhs.len());
    // augmented gaussian elimination on rows
    let rows = rhs.len();
    let mut m: Vec<Vec<Scalar>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Scalar> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivot_col_of_row = Vec::new();
    let mut rank = 0usize;
    for c in 0..n {
        let pivot = (rank..rows).find(|&r| !m[r][c].is_zero());
        if let Some(p) = pivot {
            m.swap(rank, p);
            let inv = m[rank][c].inv();
            for x in m[rank].iter_mut() {
                *x = x.mul(&inv);
            }
            for r in 0..rows {
                if r != rank && !m[r][c].is_zero() {
                    let f = m[r][c].clone();
                    for i in 0..=n {
                        let delta = f.mul(&m[rank][i]);
                        m[r][i] = m[r][i].sub(&delta);
                    }
                }
            }
            pivot_col_of_row.push(c);
            rank += 1;
        }
    }
    // consistency
    for r in rank..rows {
        if !m[r][n].is_zero() {
            return None;
        }
    }
    let field = rhs[0].field().clone();
    let mut g = vec![field.zero(); n];
    for (r, &c) in pivot_col_of_row.iter().enumerate() {
        g[c] = m[r][n].clone();
    }
    Some(g)
}

pub fn scalar_matrix_invertible(columns: &[Vec<Scalar>]) -> bool {
    if columns.is_empty() {
        return true;
    }
    columns.len() == columns[0].len() && scalar_matrix_rank(columns) == columns.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::poly::{parse_poly, Table, VarTableBuilder};
    use crate::polyring::scalar::{CycField, Field};

    fn ring_xy() -> (Table, Field) {
        let mut b = VarTableBuilder::new();
        b.add("x", None);
        b.add("y", None);
        (b.build(), CycField::rational())
    }

    #[test]
    fn principal_ideal_is_its_own_basis() {
        let (t, f) = ring_xy();
        let p = parse_poly(&t, &f, "x").unwrap();
        let gb = groebner(&Ideal::new(vec![p.clone()], MonomialOrder::GrevLex)).unwrap();
        assert_eq!(gb.polys, vec![p]);

        let q = parse_poly(&t, &f, "(1 - x^2)*(1 - x)").unwrap();
        let gb = groebner(&Ideal::new(vec![q.clone()], MonomialOrder::GrevLex)).unwrap();
        assert_eq!(gb.len(), 1);
        assert!(gb.contains(&q));
    }

    #[test]
    fn lex_elimination_example() {
        // <x^2 - 1, x*y - 1> under lex with x > y contains y - x
        let (t, f) = ring_xy();
        let gens = vec![
            parse_poly(&t, &f, "x^2 - 1").unwrap(),
            parse_poly(&t, &f, "x*y - 1").unwrap(),
        ];
        let gb = groebner(&Ideal::new(gens, MonomialOrder::Lex)).unwrap();
        let y_minus_x = parse_poly(&t, &f, "y - x").unwrap();
        let x2_minus_1 = parse_poly(&t, &f, "x^2 - 1").unwrap();
        assert!(gb.contains(&y_minus_x));
        assert!(gb.contains(&x2_minus_1));
        assert_eq!(gb.len(), 2);
    }

    #[test]
    fn normal_form_examples() {
        let (t, f) = ring_xy();
        let gb = groebner(&Ideal::new(
            vec![parse_poly(&t, &f, "x^2 - 1").unwrap()],
            MonomialOrder::GrevLex,
        ))
        .unwrap();
        let x3 = parse_poly(&t, &f, "x^3").unwrap();
        assert_eq!(normal_form(&x3, &gb), parse_poly(&t, &f, "x").unwrap());
        let zero = Poly::zero(&t, &f);
        assert!(normal_form(&zero, &gb).is_zero());
        // idempotence
        let p = parse_poly(&t, &f, "x^5 + x^2*y - 3").unwrap();
        let n1 = normal_form(&p, &gb);
        assert_eq!(normal_form(&n1, &gb), n1);
    }

    #[test]
    fn confluence_two_paths() {
        // reduce (1-x)(1-y) against <y - x^2, (1-x^2)(1-x)>: the result is
        // independent of reduction order because the basis is a GB
        let (t, f) = ring_xy();
        let gens = vec![
            parse_poly(&t, &f, "y - x^2").unwrap(),
            parse_poly(&t, &f, "(1 - x^2)*(1 - x)").unwrap(),
        ];
        let gb = groebner(&Ideal::new(gens.clone(), MonomialOrder::GrevLex)).unwrap();
        let p = parse_poly(&t, &f, "(1 - x)*(1 - y)").unwrap();
        let nf = normal_form(&p, &gb);
        // manual alternative route: substitute y = x^2 first, then reduce
        let y_to_x2 = p.substitute(&[
            Poly::var(&t, &f, 0),
            parse_poly(&t, &f, "x^2").unwrap(),
        ]);
        assert_eq!(normal_form(&y_to_x2, &gb), nf);
        // buchberger criterion: all s-polynomials reduce to zero
        for i in 0..gb.polys.len() {
            for j in i + 1..gb.polys.len() {
                let s = s_poly(&gb.polys[i], &gb.polys[j], MonomialOrder::GrevLex);
                assert!(normal_form(&s, &gb).is_zero());
            }
        }
    }

    #[test]
    fn quotient_basis_examples() {
        let (t, f) = ring_xy();
        // <x^2 - 1, y>: basis {1, x}
        let gb = groebner(&Ideal::new(
            vec![
                parse_poly(&t, &f, "x^2 - 1").unwrap(),
                parse_poly(&t, &f, "y").unwrap(),
            ],
            MonomialOrder::GrevLex,
        ))
        .unwrap();
        let qb = quotient_basis(&gb, 2).unwrap();
        assert_eq!(qb.len(), 2);

        // <x> in two variables: infinite (y is free)
        let gb = groebner(&Ideal::new(
            vec![parse_poly(&t, &f, "x").unwrap()],
            MonomialOrder::GrevLex,
        ))
        .unwrap();
        assert!(quotient_basis(&gb, 2).is_none());

        // one variable: <x> has basis {1}
        let mut b = VarTableBuilder::new();
        b.add("x", None);
        let t1 = b.build();
        let gb = groebner(&Ideal::new(
            vec![parse_poly(&t1, &f, "x").unwrap()],
            MonomialOrder::GrevLex,
        ))
        .unwrap();
        assert_eq!(quotient_basis(&gb, 1).unwrap().len(), 1);
    }

    #[test]
    fn laurent_encoded_quotient() {
        // P(1,2) K-theory shape: x1*x1i = 1, x2*x2i = 1, x1 = x2^2,
        // (1-x1)(1-x2) = 0 has dimension 3
        let mut b = VarTableBuilder::new();
        let (x1, x1i) = b.add_unit("x1", None);
        let (x2, x2i) = b.add_unit("x2", None);
        let t = b.build();
        let f = CycField::rational();
        let mk = |s: &str| parse_poly(&t, &f, s).unwrap();
        let gens = vec![
            mk("x1*x1_inv - 1"),
            mk("x2*x2_inv - 1"),
            mk("x1*x2_inv^2 - 1"),
            mk("(1 - x1)*(1 - x2)"),
        ];
        let gb = groebner(&Ideal::new(gens, MonomialOrder::GrevLex)).unwrap();
        let qb = quotient_basis(&gb, t.len()).unwrap();
        assert_eq!(qb.len(), 3);
        let _ = (x1, x1i, x2, x2i);
    }

    #[test]
    fn quotient_basis_cardinality_order_independent() {
        let (t, f) = ring_xy();
        let gens = vec![
            parse_poly(&t, &f, "x^2 + y - 1").unwrap(),
            parse_poly(&t, &f, "y^2 - x").unwrap(),
        ];
        let g1 = groebner(&Ideal::new(gens.clone(), MonomialOrder::GrevLex)).unwrap();
        let g2 = groebner(&Ideal::new(gens, MonomialOrder::Lex)).unwrap();
        let b1 = quotient_basis(&g1, 2).unwrap();
        let b2 = quotient_basis(&g2, 2).unwrap();
        assert_eq!(b1.len(), b2.len());
    }

    #[test]
    fn ring_map_checks() {
        let f = CycField::rational();
        let mut b = VarTableBuilder::new();
        b.add("t", None);
        let ts = b.build();
        let mut b = VarTableBuilder::new();
        b.add("u", None);
        let us = b.build();

        // identity-style map Q[t]/(t^2-1) -> Q[u]/(u^2-1), t -> -u
        let source = vec![parse_poly(&ts, &f, "t^2 - 1").unwrap()];
        let target = groebner(&Ideal::new(
            vec![parse_poly(&us, &f, "u^2 - 1").unwrap()],
            MonomialOrder::GrevLex,
        ))
        .unwrap();
        let images = vec![parse_poly(&us, &f, "-u").unwrap()];
        let rep = ring_map_check(&source, &images, &target, MonomialOrder::GrevLex, DEFAULT_PAIR_CAP).unwrap();
        assert!(rep.is_isomorphism());

        // Q[t]/(t^2) -> Q[u]/(u^2-1), t -> u - 1 is not a ring map:
        // t^2 maps to u^2 - 2u + 1 = 2 - 2u != 0
        let source = vec![parse_poly(&ts, &f, "t^2").unwrap()];
        let images = vec![parse_poly(&us, &f, "u - 1").unwrap()];
        let rep = ring_map_check(&source, &images, &target, MonomialOrder::GrevLex, DEFAULT_PAIR_CAP).unwrap();
        let (idx, nf) = rep.failing_relation.clone().unwrap();
        assert_eq!(idx, 0);
        assert_eq!(nf, parse_poly(&us, &f, "2 - 2*u").unwrap());
    }

    #[test]
    fn laurent_inverse_variable_soundness() {
        // adjoining the inverse variable does not change the dimension when
        // the variable is already invertible in the quotient
        let f = CycField::rational();
        let mut b = VarTableBuilder::new();
        b.add("x", None);
        let plain = b.build();
        // x^3 = 1 makes x invertible with inverse x^2
        let gb_plain = groebner(&Ideal::new(
            vec![parse_poly(&plain, &f, "x^3 - 1").unwrap()],
            MonomialOrder::GrevLex,
        ))
        .unwrap();
        let dim_plain = quotient_basis(&gb_plain, 1).unwrap().len();

        let mut b = VarTableBuilder::new();
        b.add_unit("x", None);
        let laurent = b.build();
        let gb_laurent = groebner(&Ideal::new(
            vec![
                parse_poly(&laurent, &f, "x^3 - 1").unwrap(),
                parse_poly(&laurent, &f, "x*x_inv - 1").unwrap(),
            ],
            MonomialOrder::GrevLex,
        ))
        .unwrap();
        let dim_laurent = quotient_basis(&gb_laurent, 2).unwrap().len();
        assert_eq!(dim_plain, dim_laurent);
        // and the inverse is certified: x * x^2 - 1 reduces to zero
        assert!(gb_plain.contains(&parse_poly(&plain, &f, "x*x^2 - 1").unwrap()));
    }

    #[test]
    fn pair_cap_reports_progress() {
        let (t, f) = ring_xy();
        let gens = vec![
            parse_poly(&t, &f, "x^3*y - x").unwrap(),
            parse_poly(&t, &f, "x*y^3 - y").unwrap(),
            parse_poly(&t, &f, "x^2 + y^2 - 1").unwrap(),
        ];
        let err = groebner_capped(&Ideal::new(gens, MonomialOrder::GrevLex), 1).unwrap_err();
        match err {
            Error::ResourceLimit { processed, basis_len } => {
                assert!(processed >= 1);
                assert!(basis_len >= 3);
            }
            other => panic!("unexpected error {:?}", other),
        }
    }
}
