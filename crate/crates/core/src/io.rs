//! JSON input and output formats.
//!
//! Stacky fans arrive as
//! `{"N": {"free_rank": r, "torsion": [q, ...]}, "rays_b": [[...], ...],
//!   "extra_b": [[...], ...], "fan": {"rays": [[...], ...],
//!   "max_cones": [[i, ...], ...]}}`
//! with lattice vectors listing free coordinates first, then torsion
//! residues. Twists are `"point"`, `"Pn:r"`, or a custom pair of presented
//! base rings with polynomial text relations.

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::lattice::FgAbelianGroup;
use crate::polyring::poly::{parse_poly, Poly, VarTableBuilder};
use crate::polyring::scalar::CycField;
use crate::presentations::{BaseKind, RingPresentation, TwistSpec};
use crate::stackyfan::StackyFan;
use num::bigint::BigInt;
use num::rational::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupJson {
    pub free_rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FanJson {
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StackyFanJson {
    #[serde(rename = "N")]
    pub group: GroupJson,
    pub rays_b: Vec<Vec<i64>>,
    #[serde(default)]
    pub extra_b: Vec<Vec<i64>>,
    pub fan: FanJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VarJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<String>,
    /// Declare the variable invertible; an inverse partner is added.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unit: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PresentationJson {
    pub vars: Vec<VarJson>,
    pub relations: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum BaseJson {
    Named(String),
    Custom {
        #[serde(rename = "K")]
        k: PresentationJson,
        #[serde(rename = "H")]
        h: PresentationJson,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TwistJson {
    pub base: BaseJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<Vec<String>>,
}

/// A job input: either a bare stacky fan or a stacky fan plus a twist.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum InputJson {
    Wrapped {
        stacky_fan: StackyFanJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        twist: Option<TwistJson>,
    },
    Bare(StackyFanJson),
}

impl InputJson {
    pub fn stacky_fan_json(&self) -> &StackyFanJson {
        match self {
            InputJson::Wrapped { stacky_fan, .. } => stacky_fan,
            InputJson::Bare(sf) => sf,
        }
    }

    pub fn twist_json(&self) -> Option<&TwistJson> {
        match self {
            InputJson::Wrapped { twist, .. } => twist.as_ref(),
            InputJson::Bare(_) => None,
        }
    }
}

pub fn group_from_json(g: &GroupJson) -> Result<FgAbelianGroup> {
    FgAbelianGroup::new(g.free_rank, g.torsion.iter().map(|&q| BigInt::from(q)).collect())
}

pub fn group_to_json(g: &FgAbelianGroup) -> GroupJson {
    GroupJson {
        free_rank: g.free_rank,
        torsion: g
            .torsion
            .iter()
            .map(|q| q.try_into().expect("torsion order fits in u64"))
            .collect(),
    }
}

pub fn fan_from_json(f: &FanJson, ambient_rank: usize) -> Result<Fan> {
    let rays: Vec<Vec<BigInt>> = f
        .rays
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    Fan::new(ambient_rank, rays, &f.max_cones)
}

/// Parse and validate a stacky fan.
pub fn stacky_fan_from_json(j: &StackyFanJson) -> Result<StackyFan> {
    let group = group_from_json(&j.group)?;
    let fan = fan_from_json(&j.fan, group.free_rank)?;
    let mut generators = Vec::new();
    for (i, coords) in j.rays_b.iter().chain(j.extra_b.iter()).enumerate() {
        if coords.len() != group.num_coords() {
            return Err(Error::invalid(format!(
                "lattice vector {} has {} coordinates, expected {}",
                i + 1,
                coords.len(),
                group.num_coords()
            )));
        }
        generators.push(group.element(coords.iter().map(|&x| BigInt::from(x)).collect()));
    }
    if j.rays_b.len() != fan.num_rays() {
        return Err(Error::invalid(format!(
            "{} ray vectors for {} fan rays",
            j.rays_b.len(),
            fan.num_rays()
        )));
    }
    StackyFan::new(group, fan, generators)
}

pub fn stacky_fan_to_json(sf: &StackyFan) -> StackyFanJson {
    let to_i64 = |e: &crate::lattice::GroupElement| -> Vec<i64> {
        e.coords
            .iter()
            .map(|c| c.try_into().expect("coordinate fits in i64"))
            .collect()
    };
    StackyFanJson {
        group: group_to_json(sf.group()),
        rays_b: sf.generators()[..sf.num_rays()].iter().map(to_i64).collect(),
        extra_b: sf.generators()[sf.num_rays()..].iter().map(to_i64).collect(),
        fan: FanJson {
            rays: sf
                .fan()
                .rays()
                .iter()
                .map(|r| r.iter().map(|c| c.try_into().expect("ray fits in i64")).collect())
                .collect(),
            max_cones: sf
                .fan()
                .maximal_cones()
                .into_iter()
                .map(|c| c.into_iter().collect())
                .collect(),
        },
    }
}

fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let numer: BigInt = n.trim().parse().map_err(|_| Error::invalid("bad rational"))?;
        let denom: BigInt = d.trim().parse().map_err(|_| Error::invalid("bad rational"))?;
        Ok(BigRational::new(numer, denom))
    } else {
        let numer: BigInt = t.parse().map_err(|_| Error::invalid("bad rational"))?;
        Ok(BigRational::from_integer(numer))
    }
}

fn presentation_tables_from_json(p: &PresentationJson) -> Result<(crate::polyring::poly::Table, Vec<Poly>)> {
    let field = CycField::rational();
    let mut b = VarTableBuilder::new();
    for v in &p.vars {
        let degree = v.degree.as_deref().map(parse_rational).transpose()?;
        if v.unit {
            b.add_unit(v.name.clone(), degree);
        } else {
            b.add(v.name.clone(), degree);
        }
    }
    let table = b.build();
    let relations = p
        .relations
        .iter()
        .map(|r| parse_poly(&table, &field, r))
        .collect::<Result<Vec<_>>>()?;
    Ok((table, relations))
}

/// Resolve a twist description against the stacky fan's free rank.
pub fn twist_from_json(t: &TwistJson, free_rank: usize) -> Result<TwistSpec> {
    let mut twist = match &t.base {
        BaseJson::Named(name) => base_from_name(name, free_rank)?,
        BaseJson::Custom { k, h } => {
            let (k_table, k_relations) = presentation_tables_from_json(k)?;
            let (h_table, h_relations) = presentation_tables_from_json(h)?;
            let field = CycField::rational();
            let one = Poly::one(&k_table, &field);
            let zero = Poly::zero(&h_table, &field);
            TwistSpec {
                kind: BaseKind::Custom,
                k_table,
                k_relations,
                h_table,
                h_relations,
                xi: vec![one.clone(); free_rank],
                xi_inv: vec![one; free_rank],
                c1: vec![zero; free_rank],
            }
        }
    };
    let field = CycField::rational();
    if let Some(xi) = &t.xi {
        if xi.len() != free_rank {
            return Err(Error::invalid(format!(
                "{} xi classes for free rank {}",
                xi.len(),
                free_rank
            )));
        }
        let mut parsed = Vec::new();
        let mut inverses = Vec::new();
        for s in xi {
            let p = parse_poly(&twist.k_table, &field, s)?;
            let inv = invert_unit_monomial(&p)?;
            parsed.push(p);
            inverses.push(inv);
        }
        twist.xi = parsed;
        twist.xi_inv = inverses;
    }
    if let Some(c1) = &t.c1 {
        if c1.len() != free_rank {
            return Err(Error::invalid(format!(
                "{} c1 classes for free rank {}",
                c1.len(),
                free_rank
            )));
        }
        twist.c1 = c1
            .iter()
            .map(|s| parse_poly(&twist.h_table, &field, s))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(twist)
}

/// Parse `"point"` or `"Pn:r"` into a built-in base (first class `O(1)`,
/// the rest trivial).
pub fn base_from_name(name: &str, free_rank: usize) -> Result<TwistSpec> {
    if name == "point" {
        return Ok(TwistSpec::point(free_rank));
    }
    if let Some(r) = name.strip_prefix("Pn:") {
        let r: u32 = r
            .parse()
            .map_err(|_| Error::invalid(format!("bad projective dimension in '{}'", name)))?;
        let mut powers = vec![0i64; free_rank];
        if free_rank > 0 {
            powers[0] = 1;
        }
        return Ok(TwistSpec::projective(r, &powers));
    }
    Err(Error::invalid(format!("unknown base '{}'", name)))
}

/// Invert a unit monomial by swapping each variable with its declared
/// inverse partner.
fn invert_unit_monomial(p: &Poly) -> Result<Poly> {
    if p.is_one() {
        return Ok(p.clone());
    }
    let terms: Vec<_> = p.terms().collect();
    if terms.len() != 1 {
        return Err(Error::invalid("xi classes must be unit monomials"));
    }
    let (mono, coeff) = terms[0];
    if !coeff.is_one() {
        return Err(Error::invalid("xi classes must be monic unit monomials"));
    }
    let table = p.table().clone();
    let mut exps = vec![0u32; table.len()];
    for (i, &e) in mono.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let partner = table
            .info(i)
            .partner
            .ok_or_else(|| Error::invalid(format!("variable {} is not a unit", table.name(i))))?;
        exps[partner] = e;
    }
    Ok(Poly::monomial(
        &table,
        p.field(),
        crate::polyring::poly::Monomial(exps),
        p.field().one(),
    ))
}

/// Presentation summary for machine output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationReport {
    pub variables: Vec<String>,
    pub relations: Vec<String>,
    pub groebner_basis: Vec<String>,
    pub dimension: Option<usize>,
    pub quotient_basis: Option<Vec<String>>,
}

pub fn presentation_report(p: &RingPresentation) -> PresentationReport {
    let field = &p.field;
    let mono_str = |m: &crate::polyring::poly::Monomial| {
        let poly = Poly::monomial(&p.table, field, m.clone(), field.one());
        format!("{}", poly)
    };
    PresentationReport {
        variables: p.table.vars().iter().map(|v| v.name.clone()).collect(),
        relations: p.relations.iter().map(|r| format!("{}", r)).collect(),
        groebner_basis: p.gb.polys.iter().map(|r| format!("{}", r)).collect(),
        dimension: p.dimension(),
        quotient_basis: p.qbasis.as_ref().map(|b| b.iter().map(mono_str).collect()),
    }
}

/// Deterministic rational rendering of a box element for output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoxElementReport {
    pub element: Vec<i64>,
    pub cone: Vec<usize>,
    /// `(ray, alpha)` pairs as exact fraction strings.
    pub alphas: Vec<(usize, String)>,
    pub degree_shift: String,
}

pub fn box_element_report(v: &crate::stackyfan::BoxElement) -> BoxElementReport {
    BoxElementReport {
        element: v
            .element
            .coords
            .iter()
            .map(|c| c.try_into().expect("coordinate fits"))
            .collect(),
        cone: v.cone.iter().copied().collect(),
        alphas: v.alphas.iter().map(|(&i, a)| (i, a.to_string())).collect(),
        degree_shift: v.degree_shift().to_string(),
    }
}
