//! Hypothesis packages for the strip interpolation theorems, their
//! certification, and evaluation of the resulting bound.
//!
//! Two paths are supported. With `t0 = 0` the boundary bounds must hold for
//! all `t ≥ 0` and every factor with `α ≠ β` must be monotone in `σ` for all
//! `t`. With `t0 > 0` monotonicity is only required for `t ≥ t0`, the
//! boundary bounds are required for `t ≥ t0`, and the small-`t` condition
//! covers `0 ≤ t ≤ t0`.

mod certify;
mod conclusion;

pub use certify::{certify_strip, Certificate, Refutation, Status, Toolchain, SCHEMA};
pub use conclusion::{
    alpha_product, beta_product, bound_at, exponent_line, exponent_product, extract_constant, final_inequality, BoundFormula, ConstantBound,
    FormulaFactor, RatioSpec, RenderedBound, RenderedFactor,
};

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfun::{build_catalog, CatalogError, Family, GExpr, ParseError, SymLogForm};
use crate::interval::{RealInterval, Scalar};
use crate::verifier::VerifyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoremError {
    #[error("factor {factor} has a negative exponent and no upper growth attestation")]
    MissingGrowthAttestation { factor: String },
    #[error("certificate status is {0:?}; the bound is only available for certified or conditional certificates")]
    StatusNotCertified(Status),
    #[error("invalid hypotheses: {0}")]
    InvalidHypotheses(String),
    #[error("σ = {0} outside the strip")]
    SigmaOutside(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// The function bounded on the strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FTarget {
    /// `((s−1)/s)·ζ(s)`
    FZeta,
    Zeta,
    /// A tree in the prefix grammar of [`GExpr`].
    Expr { expr: String },
}

impl FTarget {
    pub fn describe(&self) -> String {
        match self {
            FTarget::FZeta => "f_zeta".into(),
            FTarget::Zeta => "zeta".into(),
            FTarget::Expr { expr } => expr.clone(),
        }
    }
}

/// Where a comparison function comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorSource {
    Catalog {
        name: String,
        #[serde(default)]
        params: Vec<Scalar>,
    },
    Expr {
        expr: String,
    },
}

/// A user-supplied hypothesis that is recorded rather than machine-checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attestation {
    pub topic: String,
    pub statement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(default)]
    pub acknowledged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    pub label: String,
    pub source: FactorSource,
    pub alpha: Scalar,
    pub beta: Scalar,
    /// Height for a conditional monotonicity fact when no tail lemma exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Needed when `min(α, β) < 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_growth: Option<Attestation>,
}

impl Factor {
    pub fn catalog(label: &str, name: &str, params: Vec<Scalar>, alpha: Scalar, beta: Scalar) -> Self {
        Self {
            label: label.into(),
            source: FactorSource::Catalog { name: name.into(), params },
            alpha,
            beta,
            t_max: None,
            upper_growth: None,
        }
    }

    /// Expression tree and family; catalog domain checks use the strip.
    pub fn resolve(&self, a: &Scalar, b: &Scalar) -> Result<(GExpr, Family), TheoremError> {
        match &self.source {
            FactorSource::Catalog { name, params } => {
                let e = build_catalog(name, params, Some((a, b)))?;
                Ok((e.expr, e.family))
            }
            FactorSource::Expr { expr } => {
                let g = GExpr::parse(expr)?;
                g.check_size().map_err(|e| TheoremError::InvalidHypotheses(e.to_string()))?;
                Ok((g, Family::Other))
            }
        }
    }
}

/// `|f(σ+it)| ≤ C₁·exp(C₂·e^{C₃|t|})` on the strip, with `C₃ < π/(b−a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthAttestation {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    #[serde(default)]
    pub statement: String,
    #[serde(default)]
    pub acknowledged: bool,
}

/// `A·t^κ·L(t)` with `L` the classical shape of a `SymLog` form, or `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiteratureBound {
    pub constant: Scalar,
    #[serde(default = "zero_scalar")]
    pub t_power: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<SymLogForm>,
}

fn zero_scalar() -> Scalar {
    Scalar::int(0)
}

impl LiteratureBound {
    pub fn describe(&self) -> String {
        let mut s = self.constant.to_string();
        if self.t_power.sign() != Some(Ordering::Equal) {
            s.push_str(&format!("·t^({})", self.t_power));
        }
        if let Some(shape) = &self.shape {
            s.push_str(&format!("·{}", shape_text(shape)));
        }
        s
    }
}

pub(crate) fn shape_text(shape: &SymLogForm) -> String {
    match shape {
        SymLogForm::Affine { c, k } => {
            let head = if c.rational().is_some_and(|r| r == num_rational::BigRational::from_integer(1.into())) {
                "log t".to_string()
            } else {
                format!("{c}·log t")
            };
            if k.sign() == Some(Ordering::Equal) {
                head
            } else {
                format!("({head} + {k})")
            }
        }
        SymLogForm::Power { c, p } => format!("{c}·(log t)^({p})"),
        SymLogForm::OverLog { c } => format!("{c}·log t/log log t"),
    }
}

/// One piece of the bound on a boundary line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryPiece {
    /// Checked directly on `t ∈ [t_lo, t_hi]`.
    Numeric { t_lo: f64, t_hi: f64 },
    /// A published bound for `|ζ|` on the line, valid for `t ≥ t_from`; the
    /// comparison with the product of the `G_i` is machine-checked.
    Literature {
        bound: LiteratureBound,
        t_from: f64,
        citation: String,
        #[serde(default)]
        acknowledged: bool,
    },
    /// A statement of the full boundary inequality for `t ≥ t_from`.
    Attested {
        t_from: f64,
        statement: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        citation: Option<String>,
        #[serde(default)]
        acknowledged: bool,
    },
}

impl BoundaryPiece {
    /// Covered range of `t`.
    pub fn range(&self) -> (f64, f64) {
        match self {
            BoundaryPiece::Numeric { t_lo, t_hi } => (*t_lo, *t_hi),
            BoundaryPiece::Literature { t_from, .. } | BoundaryPiece::Attested { t_from, .. } => (*t_from, f64::INFINITY),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripHypotheses {
    pub a: Scalar,
    pub b: Scalar,
    pub f: FTarget,
    pub factors: Vec<Factor>,
    #[serde(default)]
    pub t0: f64,
    pub growth: GrowthAttestation,
    pub boundary_a: Vec<BoundaryPiece>,
    pub boundary_b: Vec<BoundaryPiece>,
    /// Per-factor exponent shift applied by [`normalize_exponents`]; the
    /// checked function is `f·Π G_i^{−shift_i}`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shift: Vec<Scalar>,
    /// Further recorded hypotheses, e.g. lower growth of a user-supplied `G`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attestations: Vec<Attestation>,
}

fn lt(x: &Scalar, y: &Scalar) -> bool {
    y.sub(x).sign() == Some(Ordering::Greater)
}

impl StripHypotheses {
    /// Structural checks that need no computation.
    pub fn validate(&self) -> Result<(), TheoremError> {
        let bad = |m: String| Err(TheoremError::InvalidHypotheses(m));
        if !lt(&self.a, &self.b) {
            return bad(format!("need a < b, got a = {}, b = {}", self.a, self.b));
        }
        if self.factors.is_empty() {
            return bad("at least one factor is required".into());
        }
        if !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return bad(format!("t0 = {} must be finite and nonnegative", self.t0));
        }
        if !self.shift.is_empty() && self.shift.len() != self.factors.len() {
            return bad("shift length differs from the number of factors".into());
        }
        self.check_growth()?;
        for (name, pieces) in [("a", &self.boundary_a), ("b", &self.boundary_b)] {
            for p in pieces.iter() {
                let (lo, hi) = p.range();
                if !(lo >= 0.0 && lo < hi) {
                    return bad(format!("boundary {name}: empty or negative range [{lo}, {hi}]"));
                }
            }
        }
        Ok(())
    }

    /// `0 < C₃ < π/(b−a)`, decided from enclosures.
    pub fn check_growth(&self) -> Result<(), TheoremError> {
        let width = self.b.iv() - self.a.iv();
        let cap = RealInterval::pi().div(&width).map_err(|e| TheoremError::InvalidHypotheses(e.to_string()))?;
        let c3 = self.growth.c3;
        if !(c3 > 0.0 && c3 < cap.lo()) {
            return Err(TheoremError::InvalidHypotheses(format!(
                "growth constant C3 = {c3} must satisfy 0 < C3 < π/(b−a) = {}",
                cap.lo()
            )));
        }
        Ok(())
    }

    pub fn shift_of(&self, i: usize) -> Scalar {
        self.shift.get(i).cloned().unwrap_or_else(zero_scalar)
    }
}

fn min_scalar(x: &Scalar, y: &Scalar) -> Option<Scalar> {
    match x.sub(y).sign()? {
        Ordering::Greater => Some(y.clone()),
        _ => Some(x.clone()),
    }
}

/// Shift each factor's exponents by `−min(α_i, β_i)` when that minimum is
/// negative, recording the shift so the bound is unchanged.
pub fn normalize_exponents(h: &StripHypotheses) -> Result<StripHypotheses, TheoremError> {
    let mut out = h.clone();
    let mut shift = Vec::with_capacity(h.factors.len());
    for (i, f) in h.factors.iter().enumerate() {
        let m = min_scalar(&f.alpha, &f.beta)
            .ok_or_else(|| TheoremError::InvalidHypotheses(format!("{}: cannot order α and β", f.label)))?;
        let prior = h.shift_of(i);
        if m.sign() == Some(Ordering::Less) || (m.sign().is_none() && m.iv().lo() < 0.0) {
            if f.upper_growth.is_none() {
                return Err(TheoremError::MissingGrowthAttestation { factor: f.label.clone() });
            }
            out.factors[i].alpha = f.alpha.sub(&m);
            out.factors[i].beta = f.beta.sub(&m);
            shift.push(prior.add(&m));
        } else {
            shift.push(prior);
        }
    }
    out.shift = if shift.iter().all(|s| s.sign() == Some(Ordering::Equal)) { Vec::new() } else { shift };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn package(alpha: &str, beta: &str, attested: bool) -> StripHypotheses {
        let mut f = Factor::catalog("L", "Linear", vec![Scalar::int(1)], Scalar::parse(alpha).unwrap(), Scalar::parse(beta).unwrap());
        if attested {
            f.upper_growth = Some(Attestation {
                topic: "upper growth".into(),
                statement: "|1+s| grows at most linearly".into(),
                citation: None,
                acknowledged: true,
            });
        }
        StripHypotheses {
            a: Scalar::int(1),
            b: Scalar::int(2),
            f: FTarget::FZeta,
            factors: vec![f],
            t0: 0.0,
            growth: GrowthAttestation { c1: 1.0, c2: 1.0, c3: 1.0, statement: String::new(), acknowledged: true },
            boundary_a: vec![],
            boundary_b: vec![],
            shift: vec![],
            attestations: vec![],
        }
    }

    #[test]
    fn normalization() {
        let h = package("1", "0", false);
        assert_eq!(normalize_exponents(&h).unwrap(), h);
        let n = normalize_exponents(&package("-1", "2", true)).unwrap();
        assert_eq!(n.factors[0].alpha.to_string(), "0");
        assert_eq!(n.factors[0].beta.to_string(), "3");
        assert_eq!(n.shift[0].to_string(), "-1");
        assert!(matches!(normalize_exponents(&package("-1", "2", false)), Err(TheoremError::MissingGrowthAttestation { .. })));
    }

    #[test]
    fn growth_constant_checked() {
        let mut h = package("1", "0", false);
        h.growth.c3 = 3.2;
        assert!(h.validate().is_err());
        h.growth.c3 = 3.1;
        assert!(h.validate().is_ok());
    }
}
