//! Functions whose modulus can be enclosed over a rectangle.

use serde::{Deserialize, Serialize};

use crate::gfun::GExpr;
use crate::interval::{ComplexRect, RealInterval};
use crate::zeta::{auto_params, f_zeta, local_max_lemma, zeta_em};

pub trait Target: Sync {
    fn describe(&self) -> String;

    /// Enclosure of `|target|` over `s`.
    fn abs_enclosure(&self, s: &ComplexRect) -> Result<RealInterval, String>;

    /// Upper bound for `|target|` on `s` from an analytic lemma, if one applies.
    fn lemma_upper(&self, _s: &ComplexRect) -> Option<f64> {
        None
    }

    /// Whether the maximum modulus principle may be applied.
    fn holomorphic(&self) -> bool {
        true
    }
}

pub struct GTarget<'a> {
    pub expr: &'a GExpr,
}

impl Target for GTarget<'_> {
    fn describe(&self) -> String {
        self.expr.to_string()
    }

    fn abs_enclosure(&self, s: &ComplexRect) -> Result<RealInterval, String> {
        self.expr.abs_eval(s).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaKind {
    /// `ζ(s)`
    Zeta,
    /// `f(s) = ((s−1)/s)·ζ(s)`
    F,
}

impl ZetaKind {
    pub fn name(self) -> &'static str {
        match self {
            ZetaKind::Zeta => "zeta",
            ZetaKind::F => "f_zeta",
        }
    }
}

pub struct ZetaTarget {
    pub kind: ZetaKind,
}

impl ZetaTarget {
    pub fn new(kind: ZetaKind) -> Self {
        Self { kind }
    }

    pub fn eval(&self, s: &ComplexRect) -> Result<ComplexRect, String> {
        let diam = s.re.width().max(s.im.width());
        let target = (1e-4 * diam).max(1e-13);
        let p = auto_params(s, target).params;
        match self.kind {
            ZetaKind::Zeta => zeta_em(s, p),
            ZetaKind::F => f_zeta(s, p),
        }
        .map_err(|e| e.to_string())
    }
}

impl Target for ZetaTarget {
    fn describe(&self) -> String {
        self.kind.name().into()
    }

    fn abs_enclosure(&self, s: &ComplexRect) -> Result<RealInterval, String> {
        Ok(self.eval(s)?.abs())
    }

    fn lemma_upper(&self, s: &ComplexRect) -> Option<f64> {
        if self.kind != ZetaKind::F || s.re.lo() < 1.0 {
            return None;
        }
        let l = local_max_lemma();
        let w = (*s - ComplexRect::one()).abs();
        (l.holds && w.hi() <= l.delta).then_some(1.0)
    }
}

/// A target given by a closure.
pub struct FnTarget<F> {
    pub name: String,
    pub f: F,
    pub holomorphic: bool,
}

impl<F> Target for FnTarget<F>
where
    F: Fn(&ComplexRect) -> Result<RealInterval, String> + Sync,
{
    fn describe(&self) -> String {
        self.name.clone()
    }

    fn abs_enclosure(&self, s: &ComplexRect) -> Result<RealInterval, String> {
        (self.f)(s)
    }

    fn holomorphic(&self) -> bool {
        self.holomorphic
    }
}
