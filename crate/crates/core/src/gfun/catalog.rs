//! Named builders for the standard comparison functions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GExpr, Sign};
use crate::interval::{RealInterval, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    Unknown(String),
    #[error("{name}: expected {expected} parameters, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("{name}: bad parameters: {reason}")]
    BadBuilderParams { name: String, reason: String },
}

/// Shape of a `SymLog`-based function `S(s) = ½(log(Q₁+s) + log(Q₂−s))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SymLogForm {
    /// `c·S + k`, compared against `c·log t + k`.
    Affine { c: Scalar, k: Scalar },
    /// `c·S^p`, compared against `c·(log t)^p`.
    Power { c: Scalar, p: Scalar },
    /// `c·S / log S`, compared against `c·log t / log log t`.
    OverLog { c: Scalar },
}

/// Structural family, used to select a tail lemma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Constant,
    Linear { q: Scalar, sign: LinearSign },
    Log { q: Scalar },
    LogLog { q: Scalar },
    SymLog { q1: Scalar, q2: Scalar, shape: SymLogForm },
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearSign {
    Plus,
    Minus,
}

impl Family {
    /// Reflection centre `(Q₂−Q₁)/2` of a `SymLog` family, where
    /// `|G(c+x+it)| = |G(c−x+it)|`.
    pub fn symmetry_center(&self) -> Option<Scalar> {
        match self {
            Family::SymLog { q1, q2, .. } => q2.sub(q1).div(&Scalar::int(2)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub params: Vec<Scalar>,
    pub expr: GExpr,
    pub family: Family,
}

fn half() -> Scalar {
    Scalar::ratio(1, 2)
}

fn log_pair(q1: &Scalar, q2: &Scalar) -> GExpr {
    GExpr::Sum(vec![
        GExpr::affine(q1.clone(), Sign::Plus).log(),
        GExpr::affine(q2.clone(), Sign::Minus).log(),
    ])
}

fn symlog(q1: &Scalar, q2: &Scalar) -> GExpr {
    log_pair(q1, q2).scale(half())
}

fn bad(name: &str, reason: impl Into<String>) -> CatalogError {
    CatalogError::BadBuilderParams { name: name.into(), reason: reason.into() }
}

fn arity(name: &str, params: &[Scalar], n: usize) -> Result<(), CatalogError> {
    if params.len() != n {
        return Err(CatalogError::Arity { name: name.into(), expected: n, got: params.len() });
    }
    Ok(())
}

/// `x ≥ bound` (or `>` when `strict`), certified from the enclosure.
fn holds(x: &RealInterval, bound: f64, strict: bool) -> bool {
    if strict {
        x.lo() > bound
    } else {
        x.lo() >= bound
    }
}

fn check_symlog(name: &str, q1: &Scalar, q2: &Scalar, strip: Option<(&Scalar, &Scalar)>) -> Result<(), CatalogError> {
    if let Some((a, b)) = strip {
        if !holds(&(q1.iv() + a.iv()), 1.0, false) {
            return Err(bad(name, format!("need Q1 + a >= 1, got Q1 = {q1}, a = {a}")));
        }
        if !holds(&(q2.iv() - b.iv()), 1.0, false) {
            return Err(bad(name, format!("need Q2 - b >= 1, got Q2 = {q2}, b = {b}")));
        }
    }
    Ok(())
}

fn positive(name: &str, what: &str, x: &Scalar) -> Result<(), CatalogError> {
    if x.iv().lo() > 0.0 {
        Ok(())
    } else {
        Err(bad(name, format!("{what} must be positive, got {x}")))
    }
}

fn sym_entry(name: &str, params: Vec<Scalar>, q1: Scalar, q2: Scalar, shape: SymLogForm) -> CatalogEntry {
    let expr = match &shape {
        SymLogForm::Affine { c, k } => {
            let core = log_pair(&q1, &q2).scale(c.mul(&half()));
            if k.sign() == Some(std::cmp::Ordering::Equal) {
                core
            } else {
                GExpr::Sum(vec![core, GExpr::Const(k.clone())])
            }
        }
        SymLogForm::Power { c, p } => symlog(&q1, &q2).pow(p.clone()).scale(c.clone()),
        SymLogForm::OverLog { c } => {
            log_pair(&q1, &q2).scale(c.clone()).over(symlog(&q1, &q2).log().scale(Scalar::int(2)))
        }
    };
    CatalogEntry { name: name.into(), params, expr, family: Family::SymLog { q1, q2, shape } }
}

fn e_plus(k: i64, c: i64) -> Scalar {
    Scalar::parse(&format!("{c}*e+{k}")).expect("static")
}

fn dec(s: &str) -> Scalar {
    Scalar::parse(s).expect("static")
}

/// Build a named comparison function. `strip = (a, b)` enables the domain
/// checks that depend on the strip.
pub fn build_catalog(name: &str, params: &[Scalar], strip: Option<(&Scalar, &Scalar)>) -> Result<CatalogEntry, CatalogError> {
    let p = params.to_vec();
    let one = || Scalar::int(1);
    let zero = || Scalar::int(0);
    let entry = match name {
        "E" => {
            arity(name, params, 0)?;
            CatalogEntry { name: name.into(), params: p, expr: GExpr::Const(Scalar::euler()), family: Family::Constant }
        }
        "Const" => {
            arity(name, params, 1)?;
            if params[0].iv().contains_zero() {
                return Err(bad(name, "constant must be nonzero"));
            }
            CatalogEntry { name: name.into(), params: p.clone(), expr: GExpr::Const(p[0].clone()), family: Family::Constant }
        }
        "Linear" | "Reflected" => {
            arity(name, params, 1)?;
            let q = params[0].clone();
            let (sign, ls) = if name == "Linear" { (Sign::Plus, LinearSign::Plus) } else { (Sign::Minus, LinearSign::Minus) };
            if let Some((a, b)) = strip {
                let m = if ls == LinearSign::Plus { q.iv() + a.iv() } else { q.iv() - b.iv() };
                if !holds(&m, 0.0, true) {
                    return Err(bad(name, "Q ± σ must stay positive on the strip"));
                }
            }
            CatalogEntry { name: name.into(), params: p, expr: GExpr::affine(q.clone(), sign), family: Family::Linear { q, sign: ls } }
        }
        "Log" => {
            arity(name, params, 1)?;
            let q = params[0].clone();
            if let Some((a, _)) = strip {
                if !holds(&(q.iv() + a.iv()), 1.0, true) {
                    return Err(bad(name, "need Q + a > 1"));
                }
            }
            CatalogEntry { name: name.into(), params: p, expr: GExpr::affine(q.clone(), Sign::Plus).log(), family: Family::Log { q } }
        }
        "LogLog" => {
            arity(name, params, 1)?;
            let q = params[0].clone();
            if let Some((a, _)) = strip {
                if !holds(&(q.iv() + a.iv()), std::f64::consts::E, true) {
                    return Err(bad(name, "need Q + a > e"));
                }
            }
            let expr = GExpr::affine(q.clone(), Sign::Plus).log().log();
            CatalogEntry { name: name.into(), params: p, expr, family: Family::LogLog { q } }
        }
        "SymLog" => {
            arity(name, params, 2)?;
            check_symlog(name, &params[0], &params[1], strip)?;
            sym_entry(name, p, params[0].clone(), params[1].clone(), SymLogForm::Affine { c: one(), k: zero() })
        }
        "SymLogAffine" => {
            arity(name, params, 4)?;
            check_symlog(name, &params[0], &params[1], strip)?;
            positive(name, "c", &params[2])?;
            if params[3].iv().lo() < 0.0 {
                return Err(bad(name, "k must be nonnegative"));
            }
            let shape = SymLogForm::Affine { c: params[2].clone(), k: params[3].clone() };
            sym_entry(name, p, params[0].clone(), params[1].clone(), shape)
        }
        "SymLogPower" => {
            arity(name, params, 4)?;
            check_symlog(name, &params[0], &params[1], strip)?;
            positive(name, "c", &params[2])?;
            positive(name, "p", &params[3])?;
            let shape = SymLogForm::Power { c: params[2].clone(), p: params[3].clone() };
            sym_entry(name, p, params[0].clone(), params[1].clone(), shape)
        }
        "SymLogOverLog" => {
            arity(name, params, 3)?;
            check_symlog(name, &params[0], &params[1], strip)?;
            positive(name, "c", &params[2])?;
            let shape = SymLogForm::OverLog { c: params[2].clone() };
            sym_entry(name, p, params[0].clone(), params[1].clone(), shape)
        }
        "Ex1G1" | "Ex1G2" | "Ex1G3" | "Ex1G4" | "Ex1G5" | "Ex2G" | "Ex3G" => {
            arity(name, params, 0)?;
            let (q1, q2) = if name == "Ex3G" { (e_plus(0, 4), e_plus(2, 4)) } else { (e_plus(0, 1), e_plus(2, 1)) };
            let shape = match name {
                "Ex1G2" => SymLogForm::Affine { c: half(), k: dec("1.93") },
                "Ex1G3" => SymLogForm::Affine { c: Scalar::ratio(1, 5), k: dec("44.02") },
                "Ex1G4" => SymLogForm::OverLog { c: dec("1.731") },
                "Ex1G5" => SymLogForm::Power { c: dec("58.096"), p: Scalar::ratio(2, 3) },
                _ => SymLogForm::Affine { c: one(), k: zero() },
            };
            check_symlog(name, &q1, &q2, strip)?;
            sym_entry(name, p, q1, q2, shape)
        }
        other => return Err(CatalogError::Unknown(other.into())),
    };
    entry.expr.check_size().map_err(|e| bad(name, e.to_string()))?;
    Ok(entry)
}
