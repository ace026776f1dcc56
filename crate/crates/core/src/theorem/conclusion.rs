//! The interpolated bound: evaluation, explicit constants and rendering.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::certify::{Certificate, Status};
use super::{shape_text, StripHypotheses, TheoremError};
use crate::gfun::{Family, GExpr};
use crate::interval::{ComplexRect, RealInterval, Scalar};
use crate::verifier::{default_t_cap, sup_excess, tail_envelope_eval, Claim, Config, Fact, RatioExpr, TailEnvelope, VerifyError};

/// One factor `|G_i|^{α_i(b−σ)/(b−a) + β_i(σ−a)/(b−a)}` of the conclusion,
/// with the exponents of the original (unshifted) hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaFactor {
    pub label: String,
    pub expr: String,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub exponent: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFormula {
    pub a: Scalar,
    pub b: Scalar,
    pub f: String,
    pub factors: Vec<FormulaFactor>,
    pub text: String,
}

/// Original exponents `(α_i, β_i)`, undoing the normalization shift.
pub(crate) fn original_exponents(h: &StripHypotheses, i: usize) -> (Scalar, Scalar) {
    let s = h.shift_of(i);
    let f = &h.factors[i];
    if s.sign() == Some(Ordering::Equal) {
        return (f.alpha.clone(), f.beta.clone());
    }
    (f.alpha.add(&s), f.beta.add(&s))
}

/// `(c₀, c₁)` with `α(b−σ)/(b−a) + β(σ−a)/(b−a) = c₀ + c₁σ`, when all four
/// inputs are exact rationals.
pub fn exponent_line(alpha: &Scalar, beta: &Scalar, a: &Scalar, b: &Scalar) -> Option<(Scalar, Scalar)> {
    let (al, be, a, b) = (alpha.rational()?, beta.rational()?, a.rational()?, b.rational()?);
    let w = &b - &a;
    if w.is_zero() {
        return None;
    }
    let c0 = (&al * &b - &be * &a) / &w;
    let c1 = (&be - &al) / &w;
    Some((Scalar::from_rational(c0), Scalar::from_rational(c1)))
}

fn rational_text(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Rationals as fractions, anything else as the scalar's own text.
fn scalar_text(x: &Scalar) -> String {
    x.rational().map_or_else(|| x.to_string(), |q| rational_text(&q))
}

/// `c₀ + c₁σ` with the sign of `c₁` pulled out.
fn line_text(c0: &Scalar, c1: &Scalar) -> String {
    let (Some(c0), Some(c1)) = (c0.rational(), c1.rational()) else {
        return format!("{c0} + ({c1})σ");
    };
    let slope = |q: &BigRational| match q {
        q if q.is_one() => "σ".to_string(),
        q if q.is_integer() => format!("{}σ", q.numer()),
        q => format!("({})σ", rational_text(q)),
    };
    match (c0.is_zero(), c1.cmp(&BigRational::zero())) {
        (_, Ordering::Equal) => rational_text(&c0),
        (true, Ordering::Greater) => slope(&c1),
        (true, Ordering::Less) => format!("−{}", slope(&-c1)),
        (false, Ordering::Greater) => format!("{} + {}", rational_text(&c0), slope(&c1)),
        (false, Ordering::Less) => format!("{} − {}", rational_text(&c0), slope(&-c1)),
    }
}

fn exponent_text(alpha: &Scalar, beta: &Scalar, a: &Scalar, b: &Scalar) -> String {
    match exponent_line(alpha, beta, a, b) {
        Some((c0, c1)) => line_text(&c0, &c1),
        None => {
            let (a, b) = (scalar_text(a), scalar_text(b));
            let zero = |x: &Scalar| x.sign() == Some(Ordering::Equal);
            let pa = format!("({alpha})({b} − σ)/({b} − {a})");
            let pb = format!("({beta})(σ − {a})/({b} − {a})");
            match (zero(alpha), zero(beta)) {
                (true, true) => "0".into(),
                (true, false) => pb,
                (false, true) => pa,
                (false, false) => format!("{pa} + {pb}"),
            }
        }
    }
}

pub(crate) fn formula(h: &StripHypotheses, exprs: &[GExpr]) -> BoundFormula {
    let factors: Vec<FormulaFactor> = h
        .factors
        .iter()
        .zip(exprs)
        .enumerate()
        .map(|(i, (f, g))| {
            let (alpha, beta) = original_exponents(h, i);
            let exponent = exponent_text(&alpha, &beta, &h.a, &h.b);
            FormulaFactor { label: f.label.clone(), expr: g.to_string(), alpha, beta, exponent }
        })
        .collect();
    let rhs: Vec<String> = factors.iter().map(|f| format!("|{}(σ+it)|^({})", f.label, f.exponent)).collect();
    let text = format!("|{}(σ+it)| ≤ {} for {} ≤ σ ≤ {}", h.f.describe(), rhs.join(" · "), scalar_text(&h.a), scalar_text(&h.b));
    BoundFormula { a: h.a.clone(), b: h.b.clone(), f: h.f.describe(), factors, text }
}

/// `|G|^w` from an enclosure of `|G|`; `None` when `|G|` may vanish and
/// `w` may be negative.
pub(crate) fn pow_abs(g: RealInterval, w: RealInterval) -> Option<RealInterval> {
    if w == RealInterval::zero() {
        return Some(RealInterval::one());
    }
    if w == RealInterval::one() {
        return Some(g);
    }
    if g.lo() > 0.0 {
        return Some((w * g.ln().ok()?).exp());
    }
    if w.lo() > 0.0 && g.hi() > 0.0 {
        let hi = (w * RealInterval::point(g.hi()).ln().ok()?).exp().hi().max(1.0);
        return RealInterval::new(0.0, hi).ok();
    }
    None
}

fn usable(c: &Certificate) -> Result<(), TheoremError> {
    match c.status {
        Status::Certified | Status::Conditional => Ok(()),
        s => Err(TheoremError::StatusNotCertified(s)),
    }
}

fn eval_error(s: &ComplexRect, message: String) -> TheoremError {
    TheoremError::Verify(VerifyError::Evaluation { sigma: s.re.to_string(), t: s.im.to_string(), message })
}

fn product<F>(c: &Certificate, sigma: RealInterval, t: RealInterval, exponent: F) -> Result<RealInterval, TheoremError>
where
    F: Fn(&Scalar, &Scalar) -> RealInterval,
{
    let h = &c.hypotheses;
    let s = ComplexRect::new(sigma, t);
    let mut acc = RealInterval::one();
    for (i, f) in h.factors.iter().enumerate() {
        let (g, _) = f.resolve(&h.a, &h.b)?;
        let (alpha, beta) = original_exponents(h, i);
        let e = exponent(&alpha, &beta);
        let m = g.abs_eval(&s).map_err(|err| eval_error(&s, err.to_string()))?;
        let p = pow_abs(m, e).ok_or_else(|| eval_error(&s, format!("|{}| may vanish", f.label)))?;
        acc = acc * p;
    }
    Ok(acc)
}

/// Enclosure of the conclusion `Π_i |G_i(σ+it)|^{α_i(b−σ)/(b−a) + β_i(σ−a)/(b−a)}`.
pub fn bound_at(c: &Certificate, sigma: RealInterval, t: RealInterval) -> Result<RealInterval, TheoremError> {
    exponent_product(c, sigma, t, sigma)
}

/// `Π_i |G_i(σ+it)|^{e_i(τ)}`: the factors at `σ+it`, the interpolated
/// exponents at `τ`. `log` of it is affine in `τ`.
pub fn exponent_product(
    c: &Certificate,
    sigma: RealInterval,
    t: RealInterval,
    tau: RealInterval,
) -> Result<RealInterval, TheoremError> {
    usable(c)?;
    let h = &c.hypotheses;
    let (a, b) = (h.a.iv(), h.b.iv());
    for x in [sigma, tau] {
        if x.lo() < a.lo() || x.hi() > b.hi() {
            return Err(TheoremError::SigmaOutside(x.to_string()));
        }
    }
    let width = b - a;
    let wa = (b - tau).div(&width).map_err(|e| TheoremError::InvalidHypotheses(e.to_string()))?;
    let wb = (tau - a).div(&width).map_err(|e| TheoremError::InvalidHypotheses(e.to_string()))?;
    let clamp = |w: RealInterval| w.intersect(&RealInterval::raw(0.0, 1.0)).unwrap_or(w);
    let (wa, wb) = (clamp(wa), clamp(wb));
    product(c, sigma, t, |alpha, beta| {
        let ea = if alpha.sign() == Some(Ordering::Equal) { RealInterval::zero() } else { alpha.iv() * wa };
        let eb = if beta.sign() == Some(Ordering::Equal) { RealInterval::zero() } else { beta.iv() * wb };
        ea + eb
    })
}

/// `Π_i |G_i(a+it)|^{α_i}`.
pub fn alpha_product(c: &Certificate, t: RealInterval) -> Result<RealInterval, TheoremError> {
    usable(c)?;
    product(c, c.hypotheses.a.iv(), t, |alpha, _| alpha.iv())
}

/// `Π_i |G_i(b+it)|^{β_i}`.
pub fn beta_product(c: &Certificate, t: RealInterval) -> Result<RealInterval, TheoremError> {
    usable(c)?;
    product(c, c.hypotheses.b.iv(), t, |_, beta| beta.iv())
}

/// A ratio of the conclusion (times correction factors) to its classical
/// large-`t` shape, for the function named `subject`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSpec {
    pub label: String,
    pub subject: String,
    pub ratio: RatioExpr,
}

/// Certified enclosure of `sup_{σ, t ≥ t0}` of a ratio. `value.hi()` is the
/// explicit constant; `value.lo()` is attained or is the limit `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantBound {
    pub label: String,
    pub t0: f64,
    pub t_cap: f64,
    pub value: RealInterval,
    /// Upper bound of the excess over `[t0, T_cap]`, when that range is nonempty.
    pub finite_part: Option<f64>,
    pub tail_part: RealInterval,
    pub boxes: u64,
    pub fact: Fact,
}

impl ConstantBound {
    /// Upper bound of `value − 1`, rounded up.
    pub fn excess_upper(&self) -> f64 {
        self.value.add_f(-1.0).hi()
    }
}

pub fn extract_constant(c: &Certificate, spec: &RatioSpec, t0: f64, cfg: &Config) -> Result<ConstantBound, TheoremError> {
    usable(c)?;
    let h = &c.hypotheses;
    let r = &spec.ratio;
    if r.a.iv() != h.a.iv() || r.b.iv() != h.b.iv() {
        return Err(TheoremError::InvalidHypotheses(format!(
            "ratio strip [{}, {}] differs from the certificate strip [{}, {}]",
            r.a, r.b, h.a, h.b
        )));
    }
    if !(t0 >= 3.0 && t0.is_finite()) {
        return Err(TheoremError::Verify(VerifyError::Domain(format!("t0 = {t0} must be finite and at least 3"))));
    }
    let t_cap = cfg.t_cap.unwrap_or_else(|| default_t_cap(&r.params()));
    let env = TailEnvelope::for_ratio(r.clone(), t_cap)?;
    let mut boxes = 0;
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let finite_part = if t0 < t_cap {
        let ex = sup_excess(r, t0, t_cap, cfg.budget)?;
        boxes += ex.boxes;
        lo = lo.max(RealInterval::point(ex.attained).add_f(1.0).lo());
        hi = hi.max(RealInterval::point(ex.bound).add_f(1.0).hi());
        Some(ex.bound)
    } else {
        None
    };
    let tail = tail_envelope_eval(&env, t_cap.max(t0))?;
    lo = lo.max(tail.lo());
    hi = hi.max(tail.hi());
    let value = RealInterval::new(lo.min(hi), hi).map_err(|e| TheoremError::InvalidHypotheses(e.to_string()))?;
    cfg.events.emit("constant", serde_json::json!({ "ratio": spec.label, "t0": t0, "upper": hi, "boxes": boxes }));
    let claim = Claim::Constant {
        ratio: spec.label.clone(),
        a: h.a.iv().mid(),
        b: h.b.iv().mid(),
        t0,
        t_cap,
        excess: value.add_f(-1.0).hi(),
        finite_part: finite_part.unwrap_or(0.0),
        tail_part: tail.add_f(-1.0).hi(),
    };
    let fact = Fact::new(claim, boxes, 0.0);
    Ok(ConstantBound { label: spec.label.clone(), t0, t_cap, value, finite_part, tail_part: tail, boxes, fact })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedFactor {
    pub label: String,
    pub text: String,
}

/// The final explicit inequality `|subject| ≤ C·Π(classical shapes)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderedBound {
    pub subject: String,
    pub a: Scalar,
    pub b: Scalar,
    pub t0: f64,
    pub constant: ConstantBound,
    pub factors: Vec<RenderedFactor>,
    /// Exponent `c₀ + c₁σ` of `t` from the linear factors, when exact.
    pub t_exponent: Option<(Scalar, Scalar)>,
    pub conditional: bool,
    pub text: String,
}

/// `x` rounded up to three significant digits.
pub(crate) fn round_up_3(x: f64) -> String {
    if !(x > 0.0) || !x.is_finite() {
        return format!("{x:e}");
    }
    let p = 10f64.powi(x.log10().floor() as i32 - 2);
    let mut y = (x / p).ceil() * p;
    if y < x {
        y += p;
    }
    format!("{y:.2e}")
}

fn log_base(x: &Scalar) -> Option<Scalar> {
    if x.sign() == Some(Ordering::Equal) {
        return Some(Scalar::int(1));
    }
    x.log_argument().map(|r| Scalar::from_rational(r.clone()))
}

fn constant_factor_text(value: &Scalar, alpha: &Scalar, beta: &Scalar, a: &Scalar, b: &Scalar) -> String {
    let k = b.sub(a).rational().filter(|w| !w.is_zero()).map(|w| rational_text(&w.recip()));
    let (at, bt) = (scalar_text(a), scalar_text(b));
    if *value == Scalar::euler() {
        if let (Some(ba), Some(bb), Some(k)) = (log_base(alpha), log_base(beta), k) {
            let mut parts = Vec::new();
            if alpha.sign() != Some(Ordering::Equal) {
                parts.push(format!("{ba}^(({k})({bt} − σ))"));
            }
            if beta.sign() != Some(Ordering::Equal) {
                parts.push(format!("{bb}^(({k})(σ − {at}))"));
            }
            return if parts.is_empty() { "1".into() } else { parts.join("·") };
        }
    }
    format!("{value}^({})", exponent_text(alpha, beta, a, b))
}

pub fn final_inequality(c: &Certificate, spec: &RatioSpec, t0: f64, cfg: &Config) -> Result<RenderedBound, TheoremError> {
    let constant = extract_constant(c, spec, t0, cfg)?;
    let h = &c.hypotheses;
    let (a, b) = (&h.a, &h.b);
    let mut factors = Vec::new();
    let mut t_line: Option<(BigRational, BigRational)> = Some((BigRational::zero(), BigRational::zero()));
    let mut t_inexact: Vec<String> = Vec::new();
    let mut any_linear = false;
    for (i, f) in h.factors.iter().enumerate() {
        let (g, family) = f.resolve(a, b)?;
        let (alpha, beta) = original_exponents(h, i);
        let text = match &family {
            Family::Constant => match &g {
                GExpr::Const(v) => constant_factor_text(v, &alpha, &beta, a, b),
                _ => format!("|{}|^({})", f.label, exponent_text(&alpha, &beta, a, b)),
            },
            Family::Linear { .. } => {
                any_linear = true;
                match (exponent_line(&alpha, &beta, a, b), t_line.as_mut()) {
                    (Some((c0, c1)), Some((s0, s1))) => {
                        *s0 += c0.rational().expect("rational");
                        *s1 += c1.rational().expect("rational");
                    }
                    _ => {
                        t_line = None;
                        t_inexact.push(exponent_text(&alpha, &beta, a, b));
                    }
                }
                continue;
            }
            Family::SymLog { shape, .. } => {
                let l = shape_text(shape);
                let one = Scalar::int(1);
                if alpha == one && beta == one {
                    l
                } else {
                    let base = if l.starts_with('(') { l } else { format!("({l})") };
                    format!("{base}^({})", exponent_text(&alpha, &beta, a, b))
                }
            }
            _ => format!("|{}(σ+it)|^({})", f.label, exponent_text(&alpha, &beta, a, b)),
        };
        factors.push(RenderedFactor { label: f.label.clone(), text });
    }
    let t_exponent = t_line.filter(|_| any_linear).map(|(c0, c1)| (Scalar::from_rational(c0), Scalar::from_rational(c1)));
    if any_linear {
        let e = match &t_exponent {
            Some((c0, c1)) => line_text(c0, c1),
            None => t_inexact.join(" + "),
        };
        factors.insert(0, RenderedFactor { label: "t".into(), text: format!("t^({e})") });
    }
    let body: Vec<&str> = factors.iter().map(|f| f.text.as_str()).collect();
    let conditional = c.status == Status::Conditional;
    let text = format!(
        "|{}(σ+it)| ≤ (1 + {})·{} for {} ≤ σ ≤ {}, t ≥ {}{}",
        spec.subject,
        round_up_3(constant.excess_upper()),
        body.join("·"),
        scalar_text(a),
        scalar_text(b),
        t0,
        if conditional { " [conditional]" } else { "" }
    );
    Ok(RenderedBound { subject: spec.subject.clone(), a: a.clone(), b: b.clone(), t0, constant, factors, t_exponent, conditional, text })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_three_exponent_algebra() {
        let (a, b) = (Scalar::ratio(1, 2), Scalar::ratio(5, 7));
        let (c0, c1) = exponent_line(&Scalar::ratio(27, 164), &Scalar::ratio(1, 14), &a, &b).unwrap();
        assert_eq!(c0, Scalar::ratio(47, 123));
        assert_eq!(c1, Scalar::ratio(-107, 246));
        assert_eq!(line_text(&c0, &c1), "47/123 − (107/246)σ");
        // endpoint collapse at σ = 1/2
        let at_a = c0.add(&c1.mul(&a));
        assert_eq!(at_a, Scalar::ratio(27, 164));
    }

    #[test]
    fn example_two_constant_exponent() {
        let (a, b) = (Scalar::ratio(5, 7), Scalar::int(1));
        let alpha = Scalar::parse("log(1.546)").unwrap();
        let s = constant_factor_text(&Scalar::euler(), &alpha, &Scalar::int(0), &a, &b);
        assert_eq!(s, "1.546^((7/2)(1 − σ))");
        let (c0, c1) = exponent_line(&Scalar::ratio(1, 14), &Scalar::int(0), &a, &b).unwrap();
        assert_eq!(line_text(&c0, &c1), "1/4 − (1/4)σ");
    }

    #[test]
    fn rounding_up() {
        assert_eq!(round_up_3(1.0041e-10), "1.01e-10");
        assert_eq!(round_up_3(2.2e-10), "2.20e-10");
    }
}
