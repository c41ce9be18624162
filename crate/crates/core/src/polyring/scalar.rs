//! Exact coefficient fields: the rationals and cyclotomic extensions.
//!
//! An element of `Q(zeta_m)` is a dense polynomial in `zeta_m` reduced
//! modulo the m-th cyclotomic polynomial. `m = 1` recovers the rationals.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;

/// A coefficient field `Q(zeta_m)`, shared by all scalars of a computation.
#[derive(Debug, PartialEq, Eq)]
pub struct CycField {
    m: u64,
    /// Monic coefficients of the m-th cyclotomic polynomial, constant first.
    modulus: Vec<BigRational>,
}

pub type Field = Arc<CycField>;

impl CycField {
    /// The rationals, as the degenerate case `m = 1`.
    pub fn rational() -> Field {
        Self::cyclotomic(1)
    }

    pub fn cyclotomic(m: u64) -> Field {
        assert!(m >= 1, "cyclotomic order must be positive");
        Arc::new(CycField { m, modulus: cyclotomic_polynomial(m) })
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    /// Degree of the extension over the rationals (Euler phi of m).
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1 && self.m == 1
    }

    pub fn zero(self: &Field) -> Scalar {
        Scalar {
            field: self.clone(),
            coeffs: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(self: &Field) -> Scalar {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(self: &Field, q: BigRational) -> Scalar {
        let mut coeffs = vec![BigRational::zero(); self.degree()];
        coeffs[0] = q;
        Scalar { field: self.clone(), coeffs }
    }

    pub fn from_int(self: &Field, n: i64) -> Scalar {
        self.from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `zeta_m^k` as a field element.
    pub fn root_of_unity_pow(self: &Field, k: i64) -> Scalar {
        let m = self.m as i64;
        let k = k.rem_euclid(m) as usize;
        let mut raw = vec![BigRational::zero(); k + 1];
        raw[k] = BigRational::one();
        Scalar::reduce_raw(self.clone(), raw)
    }

    /// The exact value `e^{2 pi i q}` for a rational `q` whose denominator
    /// divides `m`.
    pub fn exp_turn(self: &Field, q: &BigRational) -> Result<Scalar> {
        let scaled = q * BigRational::from_integer(BigInt::from(self.m));
        if !scaled.is_integer() {
            return Err(Error::invalid(format!(
                "phase {} is not an m-th root of unity for m = {}",
                q, self.m
            )));
        }
        let k = scaled
            .to_integer()
            .mod_floor_u64(self.m);
        Ok(self.root_of_unity_pow(k as i64))
    }
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, m: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, m: u64) -> u64 {
        use num::Integer;
        self.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits")
    }
}

/// An element of the active coefficient field.
#[derive(Clone, PartialEq, Eq)]
pub struct Scalar {
    field: Field,
    /// Dense coefficients in `zeta^0 .. zeta^{degree-1}`.
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Scalar {
    fn reduce_raw(field: Field, mut raw: Vec<BigRational>) -> Scalar {
        let deg = field.degree();
        let modulus = &field.modulus;
        while raw.len() > deg {
            let top = raw.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = raw.len() - deg; // subtract top * x^k * modulus
            for (i, c) in modulus.iter().enumerate().take(deg) {
                raw[k + i] = &raw[k + i] - &top * c;
            }
        }
        raw.resize(deg, BigRational::zero());
        Scalar { field, coeffs: raw }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value, if this scalar has no root-of-unity part.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        assert_eq!(self.field, other.field, "scalars from different fields");
        Scalar {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        assert_eq!(self.field, other.field, "scalars from different fields");
        let deg = self.field.degree();
        let mut raw = vec![BigRational::zero(); 2 * deg];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] = &raw[i + j] + a * b;
            }
        }
        Scalar::reduce_raw(self.field.clone(), raw)
    }

    pub fn scale(&self, q: &BigRational) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse; the modulus is irreducible, so every nonzero
    /// element is a unit.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        // extended euclid in Q[x] against the modulus
        let mut r0 = self.field.modulus.clone();
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        let mut t0: Vec<BigRational> = vec![];
        let mut t1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 {
            let (q, r) = poly_divmod(&r0, &r1);
            let t = poly_sub(&t0, &poly_mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t);
        }
        assert!(!r1.is_empty(), "modulus and element not coprime");
        let c = r1[0].recip();
        let inv_coeffs: Vec<BigRational> = t1.iter().map(|x| x * &c).collect();
        Scalar::reduce_raw(self.field.clone(), inv_coeffs)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = self.field.one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Complex embedding at the principal root, for floating-point sanity
    /// checks only.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let m = self.field.m as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().expect("coefficient fits in f64");
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / m;
            re += v * theta.cos();
            im += v * theta.sin();
        }
        (re, im)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            if k == 0 {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                if k == 1 {
                    write!(f, "zeta{}", self.field.m)?;
                } else {
                    write!(f, "zeta{}^{}", self.field.m, k)?;
                }
            }
        }
        Ok(())
    }
}

// dense Q[x] helpers (constant-first coefficient vectors)

fn trim(p: &mut Vec<BigRational>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = &out[i] - y;
    }
    let mut out = out;
    trim(&mut out);
    out
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let mut bb = b.to_vec();
    trim(&mut bb);
    assert!(!bb.is_empty(), "division by zero polynomial");
    if rem.len() < bb.len() {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - bb.len() + 1];
    let lead = bb.last().unwrap().clone();
    while rem.len() >= bb.len() && !rem.is_empty() {
        let shift = rem.len() - bb.len();
        let factor = rem.last().unwrap() / &lead;
        quot[shift] = factor.clone();
        for (i, c) in bb.iter().enumerate() {
            rem[shift + i] = &rem[shift + i] - &factor * c;
        }
        trim(&mut rem);
        if rem.len() < bb.len() {
            break;
        }
    }
    (quot, rem)
}

/// Monic coefficients (constant first) of the m-th cyclotomic polynomial.
fn cyclotomic_polynomial(m: u64) -> Vec<BigRational> {
    // Phi_m = (x^m - 1) / prod_{d | m, d < m} Phi_d
    let one = BigRational::one();
    if m == 1 {
        return vec![-one.clone(), one];
    }
    let mut num = vec![BigRational::zero(); (m + 1) as usize];
    num[0] = -one.clone();
    num[m as usize] = one;
    let mut den = vec![BigRational::one()];
    for d in 1..m {
        if m % d == 0 {
            den = poly_mul(&den, &cyclotomic_polynomial(d));
        }
    }
    let (q, r) = poly_divmod(&num, &den);
    assert!(r.is_empty(), "cyclotomic division must be exact");
    q
}
