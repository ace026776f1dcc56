//! Comparison functions `G(s)` as expression trees over real constants.

mod catalog;
mod deriv;
mod text;

pub use catalog::{build_catalog, CatalogEntry, CatalogError, Family, LinearSign, SymLogForm};
pub use text::ParseError;

use std::fmt;

use thiserror::Error;

use crate::interval::{ComplexRect, IntervalError, RealInterval, Scalar};

/// Upper bound on the size of user-constructed trees.
pub const MAX_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GExpr {
    Const(Scalar),
    Var,
    /// `q + sign·s`
    Affine { q: Scalar, sign: Sign },
    Log(Box<GExpr>),
    Exp(Box<GExpr>),
    Pow(Box<GExpr>, Scalar),
    Sum(Vec<GExpr>),
    Product(Vec<GExpr>),
    Quotient(Box<GExpr>, Box<GExpr>),
    Scale(Scalar, Box<GExpr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at {path}")]
pub struct EvalError {
    pub path: String,
    pub kind: IntervalError,
}

impl EvalError {
    fn new(kind: IntervalError) -> Self {
        Self { path: String::new(), kind }
    }

    fn under(mut self, seg: &str) -> Self {
        self.path = if self.path.is_empty() { seg.to_string() } else { format!("{seg}/{}", self.path) };
        self
    }

    pub fn is_branch_cut(&self) -> bool {
        matches!(self.kind, IntervalError::BranchCutViolation { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("expression has {0} nodes, limit is {MAX_NODES}")]
pub struct TooLarge(pub usize);

impl GExpr {
    pub fn log(self) -> Self {
        GExpr::Log(Box::new(self))
    }

    pub fn exp(self) -> Self {
        GExpr::Exp(Box::new(self))
    }

    pub fn pow(self, p: Scalar) -> Self {
        GExpr::Pow(Box::new(self), p)
    }

    pub fn scale(self, c: Scalar) -> Self {
        GExpr::Scale(c, Box::new(self))
    }

    pub fn over(self, den: GExpr) -> Self {
        GExpr::Quotient(Box::new(self), Box::new(den))
    }

    pub fn affine(q: Scalar, sign: Sign) -> Self {
        GExpr::Affine { q, sign }
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            GExpr::Const(_) | GExpr::Var | GExpr::Affine { .. } => 0,
            GExpr::Log(c) | GExpr::Exp(c) | GExpr::Pow(c, _) | GExpr::Scale(_, c) => c.node_count(),
            GExpr::Sum(v) | GExpr::Product(v) => v.iter().map(GExpr::node_count).sum(),
            GExpr::Quotient(a, b) => a.node_count() + b.node_count(),
        }
    }

    pub fn check_size(&self) -> Result<(), TooLarge> {
        let n = self.node_count();
        if n > MAX_NODES {
            Err(TooLarge(n))
        } else {
            Ok(())
        }
    }

    /// Schwarz reflection `G(s̄) = conj(G(s))`. Every constant in a tree is
    /// real by construction, so this holds for all constructible trees.
    pub fn conjugate_symmetric(&self) -> bool {
        true
    }

    /// Enclosure of `G` over the rectangle `s`.
    pub fn eval(&self, s: &ComplexRect) -> Result<ComplexRect, EvalError> {
        Ok(self.eval_both(s, false)?.0)
    }

    /// Enclosure of `|G|` over `s`, intersecting the direct route with the
    /// modulus identities for logs, powers, products and quotients.
    pub fn abs_eval(&self, s: &ComplexRect) -> Result<RealInterval, EvalError> {
        Ok(self.eval_both(s, true)?.1)
    }

    /// Value and modulus enclosures in a single pass.
    pub fn eval_with_abs(&self, s: &ComplexRect) -> Result<(ComplexRect, RealInterval), EvalError> {
        self.eval_both(s, true)
    }

    fn eval_both(&self, s: &ComplexRect, want_abs: bool) -> Result<(ComplexRect, RealInterval), EvalError> {
        let wrap = |e: IntervalError, seg: &str| EvalError::new(e).under(seg);
        let direct = |v: ComplexRect| if want_abs { v.abs() } else { RealInterval::zero() };
        let tighten = |v: &ComplexRect, alt: RealInterval| -> RealInterval {
            if !want_abs {
                return RealInterval::zero();
            }
            let d = v.abs();
            d.intersect(&alt).unwrap_or(d)
        };
        match self {
            GExpr::Const(c) => {
                let v = ComplexRect::real(c.iv());
                Ok((v, c.iv().abs()))
            }
            GExpr::Var => Ok((*s, direct(*s))),
            GExpr::Affine { q, sign } => {
                let v = match sign {
                    Sign::Plus => ComplexRect::real(q.iv()) + *s,
                    Sign::Minus => ComplexRect::real(q.iv()) - *s,
                };
                Ok((v, direct(v)))
            }
            GExpr::Log(c) => {
                let (w, wa) = c.eval_both(s, want_abs).map_err(|e| e.under("log"))?;
                let v = w.log().map_err(|e| wrap(e, "log"))?;
                if !want_abs {
                    return Ok((v, RealInterval::zero()));
                }
                // |log w| = sqrt(log|w|² + arg(w)²)
                let alt = match wa.ln() {
                    Ok(l) => (l.sqr() + v.im.sqr()).sqrt().ok(),
                    Err(_) => None,
                };
                let a = match alt {
                    Some(alt) => tighten(&v, alt),
                    None => v.abs(),
                };
                Ok((v, a))
            }
            GExpr::Exp(c) => {
                let (w, _) = c.eval_both(s, false).map_err(|e| e.under("exp"))?;
                let v = w.exp();
                let a = tighten(&v, w.re.exp());
                Ok((v, a))
            }
            GExpr::Pow(c, p) => {
                let (w, wa) = c.eval_both(s, want_abs).map_err(|e| e.under("pow"))?;
                let v = w.pow_real(&p.iv()).map_err(|e| wrap(e, "pow"))?;
                let a = match wa.pow_real(&p.iv()) {
                    Ok(alt) => tighten(&v, alt),
                    Err(_) => direct(v),
                };
                Ok((v, a))
            }
            GExpr::Sum(cs) => {
                let mut acc = ComplexRect::zero();
                for (i, c) in cs.iter().enumerate() {
                    let (w, _) = c.eval_both(s, false).map_err(|e| e.under(&format!("sum[{i}]")))?;
                    acc = acc + w;
                }
                Ok((acc, direct(acc)))
            }
            GExpr::Product(cs) => {
                let mut acc = ComplexRect::one();
                let mut aa = RealInterval::one();
                for (i, c) in cs.iter().enumerate() {
                    let (w, wa) = c.eval_both(s, want_abs).map_err(|e| e.under(&format!("prod[{i}]")))?;
                    acc = acc * w;
                    aa = aa * wa;
                }
                Ok((acc, tighten(&acc, aa)))
            }
            GExpr::Quotient(n, d) => {
                let (nv, na) = n.eval_both(s, want_abs).map_err(|e| e.under("quot.num"))?;
                let (dv, da) = d.eval_both(s, want_abs).map_err(|e| e.under("quot.den"))?;
                let v = nv.div(&dv).map_err(|e| wrap(e, "quot"))?;
                let a = match na.div(&da) {
                    Ok(alt) => tighten(&v, alt),
                    Err(_) => direct(v),
                };
                Ok((v, a))
            }
            GExpr::Scale(c, x) => {
                let (w, wa) = x.eval_both(s, want_abs).map_err(|e| e.under("scale"))?;
                let v = w.scale(&c.iv());
                Ok((v, tighten(&v, c.iv().abs() * wa)))
            }
        }
    }

    /// Holomorphic derivative `dG/ds`.
    pub fn deriv(&self) -> GExpr {
        deriv::deriv(self)
    }

    pub fn parse(text: &str) -> Result<GExpr, ParseError> {
        text::parse(text)
    }
}

impl fmt::Display for GExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> GExpr {
        build_catalog("Ex1G1", &[], None).unwrap().expr
    }

    #[test]
    fn g1_at_one() {
        let v = g1().eval(&ComplexRect::point(1.0, 0.0)).unwrap();
        let target = (std::f64::consts::E + 1.0).ln();
        assert!((v.re.mid() - target).abs() < 1e-15);
        assert!(v.re.width() < 1e-14);
        assert!(v.im.contains(0.0));
        let exact = (RealInterval::e() + RealInterval::one()).ln().unwrap();
        assert!(v.re.intersect(&exact).is_some());
    }

    #[test]
    fn linear_eval() {
        let g = build_catalog("Linear", &[Scalar::int(1)], None).unwrap().expr;
        let v = g.eval(&ComplexRect::point(1.5, 2.0)).unwrap();
        assert!(v.contains(2.5, 2.0));
    }

    #[test]
    fn log_abs_real_point() {
        let g = GExpr::affine(Scalar::int(2), Sign::Plus).log();
        let a = g.abs_eval(&ComplexRect::point(1.0, 0.0)).unwrap();
        assert!(a.contains(3f64.ln()) || (a.mid() - 3f64.ln()).abs() < 1e-15);
        assert!(a.width() < 2e-15);
    }

    #[test]
    fn branch_cut_path_reported() {
        let g = GExpr::affine(Scalar::int(-3), Sign::Plus).log();
        let err = g.eval(&ComplexRect::point(1.0, 0.0)).unwrap_err();
        assert!(err.is_branch_cut());
        assert_eq!(err.path, "log");
    }
}
