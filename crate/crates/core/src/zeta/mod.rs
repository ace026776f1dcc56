//! Rigorous enclosures of `ζ(s)` and `f(s) = (s−1)ζ(s)/s` by Euler–Maclaurin
//! summation with an explicit remainder.

mod bernoulli;
mod pole;

pub use pole::{local_max_lemma, pole_series, LocalMaxLemma, STIELTJES};

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{ComplexRect, IntervalError, RealInterval};

pub const MAX_K: u32 = 30;
pub const MAX_N: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error("rectangle contains the pole s = 1")]
    PoleProximity,
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("bad parameters N = {n}, K = {k}")]
    BadParams { n: u32, k: u32 },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EMParams {
    pub n: u32,
    pub k: u32,
}

impl EMParams {
    pub fn new(n: u32, k: u32) -> Result<Self, ZetaError> {
        if n < 2 || k < 1 || k > MAX_K {
            return Err(ZetaError::BadParams { n, k });
        }
        Ok(Self { n, k })
    }
}

/// `B_{2k}/(2k)!` for `k = 1..=31`, index `k-1`.
fn bernoulli_coeffs() -> &'static [RealInterval] {
    static C: OnceLock<Vec<RealInterval>> = OnceLock::new();
    C.get_or_init(|| {
        let mut fact = BigInt::one();
        let mut out = Vec::new();
        for (i, (n, d)) in bernoulli::BERNOULLI.iter().enumerate() {
            let k2 = 2 * (i as u64 + 1);
            fact *= BigInt::from(k2 - 1) * BigInt::from(k2);
            let b = BigRational::new(n.parse().expect("table"), d.parse().expect("table"));
            out.push(crate::interval::rational_interval(&(b / BigRational::from_integer(fact.clone()))));
        }
        out
    })
}

/// The pieces of the Euler–Maclaurin formula: `ζ(s) = rest + N^{1−s}/(s−1)`.
struct EmParts {
    rest: ComplexRect,
    n_pow: ComplexRect,
}

fn check_domain(s: &ComplexRect) -> Result<(), ZetaError> {
    if s.re.lo() <= 0.0 {
        return Err(ZetaError::DomainViolation(format!("Re(s) lower bound {} is not positive", s.re.lo())));
    }
    if !s.is_finite_rect() {
        return Err(ZetaError::DomainViolation("unbounded rectangle".into()));
    }
    Ok(())
}

/// `n^{−s}` given `ln n`.
fn npow(s: &ComplexRect, ln_n: RealInterval) -> ComplexRect {
    ComplexRect::new(-(s.re * ln_n), -(s.im * ln_n)).exp()
}

/// Remainder bound for `(N, K)` on `s`.
fn remainder_bound(s: &ComplexRect, p: EMParams) -> f64 {
    let k = p.k as usize;
    let coef = bernoulli_coeffs()[k].abs().hi();
    let mut poch = RealInterval::one();
    for j in 0..=(2 * k) {
        poch = poch * (*s + ComplexRect::point(j as f64, 0.0)).abs();
    }
    let sig = s.re.lo();
    let denom = RealInterval::point(sig) + RealInterval::point((2 * k + 1) as f64);
    let shift = (*s + ComplexRect::point((2 * k + 1) as f64, 0.0)).abs();
    let n = RealInterval::point(p.n as f64);
    let ln_n = n.ln().expect("N >= 2");
    let decay = (-(RealInterval::point(sig) + RealInterval::point((2 * k + 1) as f64)) * ln_n).exp();
    let r = poch * shift.div(&denom).expect("positive") * RealInterval::point(coef) * decay;
    r.hi()
}

fn em_parts(s: &ComplexRect, p: EMParams) -> Result<EmParts, ZetaError> {
    check_domain(s)?;
    let p = EMParams::new(p.n, p.k)?;
    let mut sum = ComplexRect::zero();
    for n in 2..p.n {
        let ln_n = RealInterval::point(n as f64).ln()?;
        sum = sum + npow(s, ln_n);
    }
    sum = sum + ComplexRect::one();
    let ln_big = RealInterval::point(p.n as f64).ln()?;
    let n_ms = npow(s, ln_big);
    let n_iv = RealInterval::point(p.n as f64);
    let n_pow = n_ms.scale(&n_iv);
    let mut rest = sum + n_ms.scale(&RealInterval::point(0.5));
    // Σ_k B_{2k}/(2k)! · (s)_{2k−1} · N^{−s−2k+1}
    let inv_n = RealInterval::one().div(&n_iv)?;
    let inv_n2 = inv_n.sqr();
    let mut poch = *s;
    let mut scale = inv_n;
    let coeffs = bernoulli_coeffs();
    for k in 1..=p.k as usize {
        let term = (poch * n_ms).scale(&(coeffs[k - 1] * scale));
        rest = rest + term;
        let a = *s + ComplexRect::point((2 * k - 1) as f64, 0.0);
        let b = *s + ComplexRect::point((2 * k) as f64, 0.0);
        poch = poch * a * b;
        scale = scale * inv_n2;
    }
    let r = remainder_bound(s, p);
    Ok(EmParts { rest: rest.inflate(r), n_pow })
}

/// Enclosure of `ζ(s)` over `s`.
pub fn zeta_em(s: &ComplexRect, p: EMParams) -> Result<ComplexRect, ZetaError> {
    if s.re.contains(1.0) && s.im.contains_zero() {
        return Err(ZetaError::PoleProximity);
    }
    let parts = em_parts(s, p)?;
    let sm1 = *s - ComplexRect::one();
    Ok(parts.rest + parts.n_pow.div(&sm1)?)
}

/// Enclosure of `(s−1)ζ(s)` over `s`, pole-free.
pub fn pole_free_zeta(s: &ComplexRect, p: EMParams) -> Result<ComplexRect, ZetaError> {
    let parts = em_parts(s, p)?;
    let sm1 = *s - ComplexRect::one();
    Ok(sm1 * parts.rest + parts.n_pow)
}

/// Enclosure of `f(s) = (s−1)ζ(s)/s` over `s`.
///
/// The pole is removed algebraically: `(s−1)ζ(s) = (s−1)·rest + N^{1−s}`.
/// Inside `|s−1| ≤ 1/4` the result is intersected with the Stieltjes series.
pub fn f_zeta(s: &ComplexRect, p: EMParams) -> Result<ComplexRect, ZetaError> {
    check_domain(s)?;
    if s.contains_zero() {
        return Err(ZetaError::DomainViolation("0 in rectangle".into()));
    }
    let em = pole_free_zeta(s, p)?.div(s)?;
    if (*s - ComplexRect::one()).abs().hi() <= pole::SERIES_RADIUS {
        if let Ok(ser) = pole_series(s) {
            let ser = ser.div(s)?;
            return Ok(em.intersect(&ser).unwrap_or(em));
        }
    }
    Ok(em)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutoParams {
    pub params: EMParams,
    pub remainder: f64,
    pub unreachable: bool,
}

/// Choose `(N, K)` so that the remainder bound alone is below `target/4`.
pub fn auto_params(s: &ComplexRect, target: f64) -> AutoParams {
    assert!(target > 0.0, "target width must be positive");
    let goal = target / 4.0;
    let mut best = AutoParams { params: EMParams { n: MAX_N, k: MAX_K }, remainder: f64::INFINITY, unreachable: true };
    let t = s.im.mag();
    let mut n = 2u32.max((t / 8.0) as u32).min(MAX_N);
    loop {
        for k in 1..=MAX_K {
            let p = EMParams { n, k };
            let r = remainder_bound(s, p);
            if r < goal {
                return AutoParams { params: p, remainder: r, unreachable: false };
            }
            if n == MAX_N && r < best.remainder {
                best = AutoParams { params: p, remainder: r, unreachable: true };
            }
        }
        if n == MAX_N {
            break;
        }
        n = MAX_N.min(if n < 8 { n + 1 } else { n + n / 4 });
    }
    best
}

/// Width target used by the convenience evaluators.
pub const DEFAULT_TARGET: f64 = 1e-13;

pub fn zeta_auto(s: &ComplexRect) -> Result<ComplexRect, ZetaError> {
    zeta_em(s, auto_params(s, DEFAULT_TARGET).params)
}

pub fn f_zeta_auto(s: &ComplexRect) -> Result<ComplexRect, ZetaError> {
    f_zeta(s, auto_params(s, DEFAULT_TARGET).params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two() {
        let z = zeta_em(&ComplexRect::point(2.0, 0.0), auto_params(&ComplexRect::point(2.0, 0.0), 1e-14).params).unwrap();
        let pi2_6 = RealInterval::pi().sqr().div_f(6.0).unwrap();
        assert!(z.re.intersect(&pi2_6).is_some());
        assert!(z.re.width() < 1e-12);
        assert!(z.im.contains(0.0));
    }

    #[test]
    fn pole_rejected() {
        let s = ComplexRect::new(RealInterval::new(0.9, 1.1).unwrap(), RealInterval::new(-0.1, 0.1).unwrap());
        assert_eq!(zeta_em(&s, EMParams { n: 10, k: 5 }), Err(ZetaError::PoleProximity));
        assert!(f_zeta(&s, EMParams { n: 10, k: 5 }).is_ok());
    }

    #[test]
    fn f_at_one_and_two() {
        let f1 = f_zeta_auto(&ComplexRect::point(1.0, 0.0)).unwrap();
        assert!(f1.contains(1.0, 0.0));
        let f2 = f_zeta_auto(&ComplexRect::point(2.0, 0.0)).unwrap();
        let half = RealInterval::pi().sqr().div_f(12.0).unwrap();
        assert!(f2.re.intersect(&half).is_some());
    }

    #[test]
    fn unreachable_target() {
        let a = auto_params(&ComplexRect::point(2.0, 0.0), 1e-300);
        assert!(a.unreachable);
        assert_eq!(a.params.n, MAX_N);
    }

    #[test]
    fn corner_remainder() {
        let s = ComplexRect::point(1.0, 30.0);
        let a = auto_params(&s, 1e-8);
        assert!(!a.unreachable);
        assert!(remainder_bound(&s, a.params) < 2.5e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(zeta_em(&ComplexRect::point(-0.5, 1.0), EMParams { n: 10, k: 3 }), Err(ZetaError::DomainViolation(_))));
        assert!(EMParams::new(1, 3).is_err());
        assert!(EMParams::new(10, 31).is_err());
    }
}
