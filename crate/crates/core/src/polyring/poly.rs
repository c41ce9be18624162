//! Multivariate polynomials over a shared variable table.
//!
//! Laurent behaviour comes from paired inverse variables: a unit variable
//! `x` has a partner `x_inv` and the relation `x * x_inv - 1` is added to
//! whatever ideal the ring uses. Exponents themselves stay nonnegative.

use crate::error::{Error, Result};
use crate::polyring::scalar::{Field, Scalar};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    /// Grading degree used for reporting (rational; cohomological degrees).
    pub degree: Option<BigRational>,
    /// Partner index for unit pairs (`x` points to `x_inv` and back).
    pub partner: Option<usize>,
    /// Is this variable the declared inverse of its partner?
    pub is_inverse: bool,
}

/// An ordered table of variables shared by the polynomials of one ring.
#[derive(Debug, PartialEq, Eq)]
pub struct VarTable {
    vars: Vec<VarInfo>,
}

pub type Table = Arc<VarTable>;

impl VarTable {
    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn info(&self, i: usize) -> &VarInfo {
        &self.vars[i]
    }

    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Indices of unit primaries with their inverse partners.
    pub fn unit_pairs(&self) -> Vec<(usize, usize)> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_inverse && v.partner.is_some())
            .map(|(i, v)| (i, v.partner.unwrap()))
            .collect()
    }
}

/// Builder keeping inverse variables immediately after their primaries.
#[derive(Default)]
pub struct VarTableBuilder {
    vars: Vec<VarInfo>,
}

impl VarTableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, degree: Option<BigRational>) -> usize {
        let idx = self.vars.len();
        self.vars.push(VarInfo {
            name: name.into(),
            degree,
            partner: None,
            is_inverse: false,
        });
        idx
    }

    /// Copy another table's variables (names, degrees, unit pairings) into
    /// this one; returns the new index of each copied variable.
    pub fn append_table(&mut self, other: &VarTable) -> Vec<usize> {
        let offset = self.vars.len();
        for v in &other.vars {
            self.vars.push(VarInfo {
                name: v.name.clone(),
                degree: v.degree.clone(),
                partner: v.partner.map(|p| p + offset),
                is_inverse: v.is_inverse,
            });
        }
        (offset..self.vars.len()).collect()
    }

    /// Add a unit variable and its inverse; returns (primary, inverse).
    pub fn add_unit(&mut self, name: impl Into<String>, degree: Option<BigRational>) -> (usize, usize) {
        let name = name.into();
        let inv_name = format!("{}_inv", name);
        let i = self.vars.len();
        self.vars.push(VarInfo {
            name,
            degree: degree.clone(),
            partner: Some(i + 1),
            is_inverse: false,
        });
        self.vars.push(VarInfo {
            name: inv_name,
            degree: degree.map(|d| -d),
            partner: Some(i),
            is_inverse: true,
        });
        (i, i + 1)
    }

    pub fn build(self) -> Table {
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.vars {
            assert!(seen.insert(v.name.clone()), "duplicate variable name {}", v.name);
        }
        Arc::new(VarTable { vars: self.vars })
    }
}

/// Exponent vector over the table's variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{:?}", self.0)
    }
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut v = vec![0; nvars];
        v[i] = 1;
        Monomial(v)
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_into(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd_is_one(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Monomial orders; grevlex is the working default, lex is available for
/// elimination-flavoured checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum MonomialOrder {
    GrevLex,
    Lex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::GrevLex => {
                let da = a.total_degree();
                let db = b.total_degree();
                if da != db {
                    return da.cmp(&db);
                }
                // reverse lexicographic on reversed exponents
                for (x, y) in a.0.iter().rev().zip(b.0.iter().rev()) {
                    match x.cmp(y) {
                        Ordering::Equal => continue,
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                    }
                }
                Ordering::Equal
            }
        }
    }
}

/// A polynomial: scalar coefficients over monomials in a shared table.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    table: Table,
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(table: &Table, field: &Field) -> Poly {
        Poly {
            table: table.clone(),
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &Table, field: &Field, c: Scalar) -> Poly {
        let mut p = Poly::zero(table, field);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(table.len()), c);
        }
        p
    }

    pub fn one(table: &Table, field: &Field) -> Poly {
        Poly::constant(table, field, field.one())
    }

    pub fn from_int(table: &Table, field: &Field, n: i64) -> Poly {
        Poly::constant(table, field, field.from_int(n))
    }

    pub fn var(table: &Table, field: &Field, i: usize) -> Poly {
        let mut p = Poly::zero(table, field);
        p.terms.insert(Monomial::var(table.len(), i), field.one());
        p
    }

    pub fn monomial(table: &Table, field: &Field, m: Monomial, c: Scalar) -> Poly {
        let mut p = Poly::zero(table, field);
        if !c.is_zero() {
            assert_eq!(m.0.len(), table.len());
            p.terms.insert(m, c);
        }
        p
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn insert(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.table, other.table);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            table: self.table.clone(),
            field: self.field.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.table, other.table);
        let mut out = Poly::zero(&self.table, &self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.table, &self.field);
        }
        Poly {
            table: self.table.clone(),
            field: self.field.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.table, &self.field);
        }
        Poly {
            table: self.table.clone(),
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(mm, x)| (mm.mul(m), x.mul(c)))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.table, &self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading monomial and coefficient for the given order.
    pub fn leading(&self, order: MonomialOrder) -> Option<(&Monomial, &Scalar)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self, order: MonomialOrder) -> Poly {
        match self.leading(order) {
            None => self.clone(),
            Some((_, c)) => self.mul_scalar(&c.inv()),
        }
    }

    /// Substitute each variable by the given polynomial (in a possibly
    /// different ring); images must live in a common table.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.table.len(), "one image per variable");
        let (t, f) = if images.is_empty() {
            (self.table.clone(), self.field.clone())
        } else {
            (images[0].table.clone(), images[0].field.clone())
        };
        let mut out = Poly::zero(&t, &f);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(&t, &f, convert_scalar(c, &f));
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluate at scalar values, one per variable.
    pub fn eval(&self, values: &[Scalar]) -> Scalar {
        assert_eq!(values.len(), self.table.len());
        let mut out = self.field.zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&values[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Re-express the polynomial in another table via an index map
    /// (`map[i]` = index of our variable `i` in the new table).
    pub fn remap(&self, table: &Table, field: &Field, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.table.len());
        let mut out = Poly::zero(table, field);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; table.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    exps[map[i]] += e;
                }
            }
            out.insert(Monomial(exps), convert_scalar(c, field));
        }
        out
    }

    /// Move the polynomial into a larger coefficient field.
    pub fn extend_field(&self, field: &Field) -> Poly {
        Poly {
            table: self.table.clone(),
            field: field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), convert_scalar(c, field)))
                .collect(),
        }
    }

    /// Weighted degree under the table's grading, when every variable with a
    /// nonzero exponent carries one.
    pub fn graded_degree(&self) -> Option<BigRational> {
        let mut best: Option<BigRational> = None;
        for (m, _) in &self.terms {
            let mut d = BigRational::zero();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let w = self.table.info(i).degree.clone()?;
                    d = d + w * BigRational::from_integer(BigInt::from(e));
                }
            }
            best = Some(match best {
                None => d,
                Some(b) => {
                    if d > b {
                        d
                    } else {
                        b
                    }
                }
            });
        }
        best
    }
}

/// Rational scalars move into any field; cyclotomic scalars must already
/// live there.
pub fn convert_scalar(c: &Scalar, field: &Field) -> Scalar {
    if c.field() == field {
        return c.clone();
    }
    match c.as_rational() {
        Some(q) => field.from_rational(q),
        None => panic!("cannot move a cyclotomic scalar into a different field"),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut monos: Vec<&Monomial> = self.terms.keys().collect();
        monos.sort_by(|a, b| MonomialOrder::GrevLex.cmp(b, a));
        let mut first = true;
        for m in monos {
            let c = &self.terms[m];
            let (sign, mag) = match c.as_rational() {
                Some(q) => {
                    if q.is_negative() {
                        ("-", self.field.from_rational(q.abs()))
                    } else {
                        ("+", c.clone())
                    }
                }
                None => ("+", c.clone()),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let names: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.table.name(i).to_string()
                    } else {
                        format!("{}^{}", self.table.name(i), e)
                    }
                })
                .collect();
            let coeff_str = format!("{}", mag);
            let needs_parens = !c.as_rational().is_some() && names.len() > 0;
            if names.is_empty() {
                write!(f, "{}", coeff_str)?;
            } else if mag.is_one() {
                write!(f, "{}", names.join("*"))?;
            } else if needs_parens {
                write!(f, "({})*{}", coeff_str, names.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff_str, names.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parse a polynomial in the text format: rational coefficients, `^` powers,
/// `*` products, parentheses, variables by declared name.
pub fn parse_poly(table: &Table, field: &Field, text: &str) -> Result<Poly> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { table, field, tokens, pos: 0 };
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::invalid(format!("trailing input in polynomial '{}'", text)));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(BigRational),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let numer: BigInt = chars[start..i].iter().collect::<String>().parse().unwrap();
                let mut denom = BigInt::one();
                if i < chars.len() && chars[i] == '/' {
                    i += 1;
                    let dstart = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if dstart == i {
                        return Err(Error::invalid("missing denominator"));
                    }
                    denom = chars[dstart..i].iter().collect::<String>().parse().unwrap();
                    if denom.is_zero() {
                        return Err(Error::invalid("zero denominator"));
                    }
                }
                out.push(Token::Number(BigRational::new(numer, denom)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
            other => return Err(Error::invalid(format!("unexpected character '{}'", other))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    table: &'a Table,
    field: &'a Field,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.next();
                self.term()?.neg()
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Token::Minus) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Token::Star)) {
            self.next();
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.next();
            match self.next() {
                Some(Token::Number(q)) if q.is_integer() && !q.is_negative() => {
                    let e = u32::try_from(q.to_integer())
                        .map_err(|_| Error::invalid("exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::invalid("exponent must be a nonnegative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.next() {
            Some(Token::Number(q)) => Ok(Poly::constant(self.table, self.field, self.field.from_rational(q))),
            Some(Token::Name(name)) => {
                let i = self
                    .table
                    .index_of(&name)
                    .ok_or_else(|| Error::invalid(format!("unknown variable '{}'", name)))?;
                Ok(Poly::var(self.table, self.field, i))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::invalid("missing closing parenthesis")),
                }
            }
            Some(Token::Minus) => Ok(self.atom()?.neg()),
            other => Err(Error::invalid(format!("unexpected token {:?}", other))),
        }
    }
}
