//! Exact integer and rational matrices.
//!
//! Everything here is arbitrary precision: Smith normal form, integer
//! kernels, exact linear solves and lattice membership. These back all
//! Gale-dual and cokernel computations, so correctness beats speed.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::fmt;

/// Dense integer matrix in row-major order with arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(data: Vec<Vec<BigInt>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        assert!(data.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows,
            cols,
            entries: data.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(data: &[Vec<i64>]) -> Self {
        Self::from_rows(
            data.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols_data: &[Vec<BigInt>]) -> Self {
        let cols = cols_data.len();
        let mut m = Self::zeros(rows, cols);
        for (j, col) in cols_data.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.at(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.at(r, k) * other.at(k, c);
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.at(r, k) * &v[k];
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.at(r, c).clone());
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.at(r, c).clone());
            }
        }
        m
    }

    /// Keep only the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut m = Self::zeros(idx.len(), self.cols);
        for (r_new, &r) in idx.iter().enumerate() {
            for c in 0..self.cols {
                m.set(r_new, c, self.at(r, c).clone());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Determinant by fraction-free Bareiss elimination. Square matrices only.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let pivot = (k + 1..n).find(|&r| !a[r * n + k].is_zero());
                match pivot {
                    Some(r) => {
                        for c in 0..n {
                            a.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = &num / &prev;
                }
                a[i * n + k] = BigInt::zero();
            }
            prev = a[k * n + k].clone();
        }
        sign * a[(n - 1) * n + (n - 1)].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    fn is_smith_form(&self) -> bool {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c && !self.at(r, c).is_zero() {
                    return false;
                }
            }
        }
        let diag: Vec<&BigInt> = (0..self.rows.min(self.cols)).map(|i| self.at(i, i)).collect();
        let mut seen_zero = false;
        for w in 0..diag.len() {
            if diag[w].is_negative() {
                return false;
            }
            if diag[w].is_zero() {
                seen_zero = true;
            } else {
                if seen_zero {
                    return false;
                }
                if w > 0 && !diag[w - 1].is_zero() && !(diag[w] % diag[w - 1]).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Rank over the rationals (via the Smith form diagonal).
    pub fn rank(&self) -> usize {
        let (_, d, _) = self.smith_normal_form();
        (0..d.rows.min(d.cols)).filter(|&i| !d.at(i, i).is_zero()).count()
    }

    /// Smith normal form: returns `(u, d, v)` with `u * self * v = d`,
    /// `u` and `v` unimodular, `d` diagonal with nonnegative entries and
    /// `d_1 | d_2 | ...`. Pivoting picks the minimal-absolute-value nonzero
    /// entry with a row-then-column sweep, so the transforms are reproducible.
    /// A matrix already in Smith form comes back with identity transforms.
    pub fn smith_normal_form(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        if self.is_smith_form() {
            return (
                IntMatrix::identity(self.rows),
                self.clone(),
                IntMatrix::identity(self.cols),
            );
        }
        let mut d = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let limit = self.rows.min(self.cols);

        for t in 0..limit {
            // locate the minimal-absolute-value nonzero entry in the block
            let mut best: Option<(usize, usize)> = None;
            for r in t..d.rows {
                for c in t..d.cols {
                    if !d.at(r, c).is_zero() {
                        let better = match best {
                            None => true,
                            Some((br, bc)) => d.at(r, c).abs() < d.at(br, bc).abs(),
                        };
                        if better {
                            best = Some((r, c));
                        }
                    }
                }
            }
            let (pr, pc) = match best {
                Some(p) => p,
                None => break, // remaining block is zero
            };
            d.swap_rows(t, pr, &mut u);
            d.swap_cols(t, pc, &mut v);

            loop {
                // kill column t below the pivot with gcd transforms
                let mut col_dirty = false;
                for r in t + 1..d.rows {
                    if !d.at(r, t).is_zero() {
                        d.gcd_rows(t, r, &mut u);
                    }
                }
                // kill row t right of the pivot; gcd steps there may
                // reintroduce entries below the pivot in column t
                for c in t + 1..d.cols {
                    if !d.at(t, c).is_zero() {
                        if d.gcd_cols(t, c, &mut v) {
                            col_dirty = true;
                        }
                    }
                }
                if col_dirty {
                    continue;
                }
                // pivot must divide the rest of the block
                let mut offender = None;
                'search: for r in t + 1..d.rows {
                    for c in t + 1..d.cols {
                        if !(d.at(r, c) % d.at(t, t)).is_zero() {
                            offender = Some(r);
                            break 'search;
                        }
                    }
                }
                match offender {
                    Some(r) => {
                        d.add_row_multiple(t, r, &BigInt::one(), &mut u);
                    }
                    None => break,
                }
            }
            if d.at(t, t).is_negative() {
                d.negate_row(t, &mut u);
            }
        }
        (u, d, v)
    }

    /// Replace `(d[t][t], d[r][t])` by `(gcd, 0)` with a unimodular 2x2 row
    /// transform (plain elimination when the pivot already divides).
    fn gcd_rows(&mut self, t: usize, r: usize, u: &mut IntMatrix) {
        let a = self.at(t, t).clone();
        let b = self.at(r, t).clone();
        if (&b % &a).is_zero() {
            let q = -(&b / &a);
            self.add_row_multiple(r, t, &q, u);
            return;
        }
        let e = a.extended_gcd(&b);
        let (g, x, y) = (e.gcd, e.x, e.y);
        let c = -(&b / &g);
        let w = &a / &g;
        self.two_inv_rows(t, r, &x, &y, &c, &w, u);
    }

    /// Replace `(d[t][t], d[t][c])` by `(gcd, 0)` with a unimodular 2x2
    /// column transform. Returns true when column t picked up new entries
    /// below the pivot (only possible in the genuine gcd case).
    fn gcd_cols(&mut self, t: usize, c: usize, v: &mut IntMatrix) -> bool {
        let a = self.at(t, t).clone();
        let b = self.at(t, c).clone();
        if (&b % &a).is_zero() {
            let q = -(&b / &a);
            self.add_col_multiple(c, t, &q, v);
            return false;
        }
        let e = a.extended_gcd(&b);
        let (g, x, y) = (e.gcd, e.x, e.y);
        let cc = -(&b / &g);
        let w = &a / &g;
        self.two_inv_cols(t, c, &x, &y, &cc, &w, v);
        (t + 1..self.rows).any(|r| !self.at(r, t).is_zero())
    }

    /// `[row_a; row_b] := [[x, y], [c, d]] * [row_a; row_b]` applied to self
    /// and the row transform (the 2x2 block must be unimodular).
    fn two_inv_rows(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, c: &BigInt, d: &BigInt, u: &mut IntMatrix) {
        for m in [&mut *self, u] {
            for col in 0..m.cols {
                let ea = m.at(a, col).clone();
                let eb = m.at(b, col).clone();
                m.set(a, col, x * &ea + y * &eb);
                m.set(b, col, c * &ea + d * &eb);
            }
        }
    }

    /// `[col_a | col_b] := [col_a | col_b] * [[x, c], [y, d]]` applied to
    /// self and the column transform.
    fn two_inv_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, c: &BigInt, d: &BigInt, v: &mut IntMatrix) {
        for m in [&mut *self, v] {
            for row in 0..m.rows {
                let ea = m.at(row, a).clone();
                let eb = m.at(row, b).clone();
                m.set(row, a, x * &ea + y * &eb);
                m.set(row, b, c * &ea + d * &eb);
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize, u: &mut IntMatrix) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let i = a * self.cols + c;
            let j = b * self.cols + c;
            self.entries.swap(i, j);
        }
        for c in 0..u.cols {
            let i = a * u.cols + c;
            let j = b * u.cols + c;
            u.entries.swap(i, j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize, v: &mut IntMatrix) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let i = r * self.cols + a;
            let j = r * self.cols + b;
            self.entries.swap(i, j);
        }
        for r in 0..v.rows {
            let i = r * v.cols + a;
            let j = r * v.cols + b;
            v.entries.swap(i, j);
        }
    }

    /// row a += q * row b (applied to self and the row transform).
    fn add_row_multiple(&mut self, a: usize, b: usize, q: &BigInt, u: &mut IntMatrix) {
        for c in 0..self.cols {
            let add = q * self.at(b, c);
            let e = self.at(a, c) + add;
            self.set(a, c, e);
        }
        for c in 0..u.cols {
            let add = q * u.at(b, c);
            let e = u.at(a, c) + add;
            u.set(a, c, e);
        }
    }

    /// col a += q * col b (applied to self and the column transform).
    fn add_col_multiple(&mut self, a: usize, b: usize, q: &BigInt, v: &mut IntMatrix) {
        for r in 0..self.rows {
            let add = q * self.at(r, b);
            let e = self.at(r, a) + add;
            self.set(r, a, e);
        }
        for r in 0..v.rows {
            let add = q * v.at(r, b);
            let e = v.at(r, a) + add;
            v.set(r, a, e);
        }
    }

    fn negate_row(&mut self, r: usize, u: &mut IntMatrix) {
        for c in 0..self.cols {
            let e = -self.at(r, c);
            self.set(r, c, e);
        }
        for c in 0..u.cols {
            let e = -u.at(r, c);
            u.set(r, c, e);
        }
    }

    /// Basis of the integer kernel `{x : self * x = 0}` as columns.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let (_, d, v) = self.smith_normal_form();
        let rank = (0..d.rows.min(d.cols)).filter(|&i| !d.at(i, i).is_zero()).count();
        (rank..self.cols).map(|c| v.column(c)).collect()
    }

    /// One integer solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let (u, d, v) = self.smith_normal_form();
        let ub = u.mul_vec(b);
        let mut y = vec![BigInt::zero(); self.cols];
        for i in 0..self.rows {
            let di = if i < self.cols { d.at(i, i).clone() } else { BigInt::zero() };
            if di.is_zero() {
                if !ub[i].is_zero() {
                    return None;
                }
            } else {
                let (q, r) = ub[i].div_rem(&di);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
        }
        Some(v.mul_vec(&y))
    }

    /// Does `b` lie in the lattice spanned by the columns of `self`?
    pub fn column_span_contains(&self, b: &[BigInt]) -> bool {
        self.solve(b).is_some()
    }
}

/// Do two families of integer vectors generate the same sublattice of Z^n?
pub fn same_column_span(a: &IntMatrix, b: &IntMatrix) -> bool {
    assert_eq!(a.rows(), b.rows(), "ambient rank mismatch");
    (0..b.cols()).all(|c| a.column_span_contains(&b.column(c)))
        && (0..a.cols()).all(|c| b.column_span_contains(&a.column(c)))
}

/// Dense rational matrix, used for cone membership and coordinate solves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_int_columns(rows: usize, cols_data: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols_data.len());
        for (j, col) in cols_data.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, BigRational::from_integer(v.clone()));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.entries[r * self.cols + c] = v;
    }

    /// Unique solution of `self * x = b` when the columns are linearly
    /// independent; `None` when the system is inconsistent.
    ///
    /// Panics if the columns are linearly dependent (callers work with
    /// simplicial cones, whose generators are independent by definition).
    pub fn solve_independent(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let mut a = self.clone();
        let mut rhs: Vec<BigRational> = b.to_vec();
        let mut pivot_of_col: Vec<usize> = Vec::new();
        let mut used = vec![false; self.rows];
        for c in 0..self.cols {
            let pivot = (0..self.rows).find(|&r| !used[r] && !a.at(r, c).is_zero());
            let p = pivot.expect("columns are linearly dependent");
            used[p] = true;
            pivot_of_col.push(p);
            let inv = a.at(p, c).recip();
            for cc in 0..self.cols {
                let e = a.at(p, cc) * &inv;
                a.set(p, cc, e);
            }
            rhs[p] = &rhs[p] * &inv;
            for r in 0..self.rows {
                if r != p && !a.at(r, c).is_zero() {
                    let f = a.at(r, c).clone();
                    for cc in 0..self.cols {
                        let e = a.at(r, cc) - &f * a.at(p, cc);
                        a.set(r, cc, e);
                    }
                    rhs[r] = &rhs[r] - &f * &rhs[p];
                }
            }
        }
        // consistency on the non-pivot rows
        for r in 0..self.rows {
            if !used[r] && !rhs[r].is_zero() {
                return None;
            }
        }
        Some(pivot_of_col.iter().map(|&p| rhs[p].clone()).collect())
    }
}

pub fn gcd_of(values: &[BigInt]) -> BigInt {
    values
        .iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// Divide an integer vector by the gcd of its entries (zero vector unchanged).
pub fn primitive_vector(v: &[BigInt]) -> Vec<BigInt> {
    let g = gcd_of(v);
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}
