//! Ratios of comparison functions to their classical large-`t` shapes,
//! written in the variables `u = 1/t`, `λ = 1/log t`, `ν = 1/log log t` so
//! that every box up to `t = ∞` is a bounded box.
//!
//! With `p = Q₁+σ`, `q = Q₂−σ` and `S = ½(log(Q₁+s) + log(Q₂−s))`:
//! `Re S = log t + D`, `Im S = E`, where
//! `D = ¼[log(1+p²u²) + log(1+q²u²)]` and `E = ½·atan((q−p)u/(1+pqu²))`.
//! Each ratio is returned as its excess over 1.

use serde::{Deserialize, Serialize};

use super::engine::{explore, Judgement};
use super::sup::{maximize, Extremum, Tolerance};
use super::{Claim, Config, Fact, Region, Verdict, VerifyError};
use crate::gfun::{Family, LinearSign, SymLogForm};
use crate::interval::{RealInterval, Scalar};

/// Box in `σ × u` together with the derived enclosures of `λ` and `ν`.
#[derive(Debug, Clone, Copy)]
pub struct UBox {
    pub sigma: RealInterval,
    pub u: RealInterval,
    pub lam: RealInterval,
    /// Absent when `log t ≤ 1` is possible on the box.
    pub nu: Option<RealInterval>,
}

fn recip_point_down(x: f64) -> f64 {
    RealInterval::point(x).recip().expect("nonzero").lo()
}

fn recip_point_up(x: f64) -> f64 {
    RealInterval::point(x).recip().expect("nonzero").hi()
}

impl UBox {
    /// `u` must satisfy `0 ≤ u.lo` and `u.hi < 1`.
    pub fn new(sigma: RealInterval, u: RealInterval) -> Result<Self, String> {
        if u.lo() < 0.0 || u.hi() >= 1.0 || u.hi() <= 0.0 {
            return Err(format!("u-box {u} outside (0, 1)"));
        }
        let t_lo = recip_point_down(u.hi());
        let t_hi = if u.lo() == 0.0 { f64::INFINITY } else { recip_point_up(u.lo()) };
        let ln_lo = RealInterval::point(t_lo).ln().map_err(|e| e.to_string())?.lo();
        let ln_hi = if t_hi.is_finite() { RealInterval::point(t_hi).ln().map_err(|e| e.to_string())?.hi() } else { f64::INFINITY };
        if ln_lo <= 0.0 {
            return Err("log t must be positive".into());
        }
        let lam_lo = if ln_hi.is_finite() { recip_point_down(ln_hi) } else { 0.0 };
        let lam = RealInterval::new(lam_lo, recip_point_up(ln_lo)).map_err(|e| e.to_string())?;
        let nu = if ln_lo > 1.0 {
            let ll_lo = RealInterval::point(ln_lo).ln().map_err(|e| e.to_string())?.lo();
            let ll_hi =
                if ln_hi.is_finite() { RealInterval::point(ln_hi).ln().map_err(|e| e.to_string())?.hi() } else { f64::INFINITY };
            let nu_lo = if ll_hi.is_finite() { recip_point_down(ll_hi) } else { 0.0 };
            Some(RealInterval::new(nu_lo, recip_point_up(ll_lo)).map_err(|e| e.to_string())?)
        } else {
            None
        };
        Ok(Self { sigma, u, lam, nu })
    }

    fn from_region(r: &Region) -> Result<Self, String> {
        Self::new(r.sigma, r.t)
    }
}

/// `u`-interval `[1/t_hi, 1/t_lo]`, with `t_hi = ∞` giving `0`.
pub(crate) fn u_range(t_lo: f64, t_hi: f64) -> RealInterval {
    let lo = if t_hi.is_finite() { recip_point_down(t_hi) } else { 0.0 };
    RealInterval::new(lo, recip_point_up(t_lo)).expect("ordered")
}

/// Exponent as a function of `σ`: `at_a` on `σ = a`, `at_b` on `σ = b`,
/// linear in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentLaw {
    pub at_a: Scalar,
    pub at_b: Scalar,
}

impl ExponentLaw {
    pub fn constant(e: Scalar) -> Self {
        Self { at_a: e.clone(), at_b: e }
    }

    pub fn at(&self, sigma: RealInterval, a: &Scalar, b: &Scalar) -> RealInterval {
        if self.at_a == self.at_b {
            return self.at_a.iv();
        }
        let w = (sigma - a.iv()).div(&(b.iv() - a.iv())).expect("a < b");
        let w = w.intersect(&RealInterval::raw(0.0, 1.0)).unwrap_or(w);
        self.at_a.iv() + (self.at_b.iv() - self.at_a.iv()) * w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "factor", rename_all = "snake_case")]
pub enum RatioFactor {
    /// `|G|` over the classical comparison of its family: `t` for
    /// `Linear`, the matching `log t` shape for `SymLog`, and `1` for
    /// constants.
    Family { family: Family },
    /// `|s| / |s−1|`
    SOverSMinus1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTerm {
    #[serde(flatten)]
    pub factor: RatioFactor,
    pub exponent: ExponentLaw,
    /// Replace the ratio `r` by `max(1, r)` before applying the exponent.
    #[serde(default)]
    pub clamp: bool,
}

/// Product of powers of ratios, each tending to 1 as `t → ∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioExpr {
    pub label: String,
    pub a: Scalar,
    pub b: Scalar,
    pub terms: Vec<RatioTerm>,
}

fn sq(x: RealInterval) -> RealInterval {
    x.sqr()
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `(D, E)` for `SymLog(Q₁, Q₂)`.
fn symlog_parts(q1: &Scalar, q2: &Scalar, ub: &UBox) -> Result<(RealInterval, RealInterval), String> {
    let p = q1.iv() + ub.sigma;
    let q = q2.iv() - ub.sigma;
    if p.lo() <= 0.0 || q.lo() <= 0.0 {
        return Err("Q1 + σ and Q2 − σ must be positive".into());
    }
    let pu = p * ub.u;
    let qu = q * ub.u;
    let d = (sq(pu).ln_1p().map_err(e2s)? + sq(qu).ln_1p().map_err(e2s)?).mul_f(0.25);
    let dq = q2.sub(q1).iv() - ub.sigma.mul_f(2.0);
    let w = (dq * ub.u).div(&(pu * qu).add_f(1.0)).map_err(e2s)?;
    let e = w.atan().mul_f(0.5);
    Ok((d, e))
}

fn symlog_excess(q1: &Scalar, q2: &Scalar, shape: &SymLogForm, ub: &UBox) -> Result<RealInterval, String> {
    let (d, e) = symlog_parts(q1, q2, ub)?;
    let one = RealInterval::one();
    match shape {
        SymLogForm::Affine { c, k } => {
            let (c, k) = (c.iv(), k.iv());
            let kappa = ub.lam.div(&(c + k * ub.lam)).map_err(e2s)?;
            let x = c * d * kappa;
            let z = (c * e * kappa).div(&(one + x)).map_err(e2s)?;
            let y = sq(z).sqrt1pm1().map_err(e2s)?;
            Ok(x + y + x * y)
        }
        SymLogForm::Power { p, .. } => {
            let x = d * ub.lam;
            let z = (e * ub.lam).div(&(one + x)).map_err(e2s)?;
            let y = sq(z).sqrt1pm1().map_err(e2s)?;
            let es = x + y + x * y;
            Ok((p.iv() * es.ln_1p().map_err(e2s)?).exp_m1())
        }
        SymLogForm::OverLog { .. } => {
            let nu = ub.nu.ok_or("log log t undefined on box")?;
            let x = d * ub.lam;
            let z = (e * ub.lam).div(&(one + x)).map_err(e2s)?;
            let y = sq(z).sqrt1pm1().map_err(e2s)?;
            let es = x + y + x * y;
            let l1 = es.ln_1p_c().map_err(e2s)?;
            let a = es * l1 * nu;
            let one_m = one - nu * l1;
            let ac = z.atanc();
            let w2 = sq((z * ac * nu).div(&(one + a)).map_err(e2s)?);
            // (1+eS)/((1+a)(1+y2)) − 1, rearranged so that each group keeps its sign
            let r1 = ((one + x) * one_m).div(&(one + (one + sq(z)).sqrt().map_err(e2s)?)).map_err(e2s)?;
            let r2 = (sq(ac) * sq(nu)).div(&((one + a) * (one + (one + w2).sqrt().map_err(e2s)?))).map_err(e2s)?;
            let num = x * one_m + sq(z) * (r1 - r2);
            let y2 = w2.sqrt1pm1().map_err(e2s)?;
            num.div(&((one + a) * (one + y2))).map_err(e2s)
        }
    }
}

fn factor_excess(f: &RatioFactor, ub: &UBox) -> Result<RealInterval, String> {
    match f {
        RatioFactor::SOverSMinus1 => {
            let s = ub.sigma;
            let u2 = sq(ub.u);
            let v = ((s.mul_f(2.0).add_f(-1.0)) * u2).div(&(sq(s.add_f(-1.0)) * u2).add_f(1.0)).map_err(e2s)?;
            v.sqrt1pm1().map_err(e2s)
        }
        RatioFactor::Family { family } => match family {
            Family::Constant => Ok(RealInterval::zero()),
            Family::Linear { q, sign } => {
                let p = match sign {
                    LinearSign::Plus => q.iv() + ub.sigma,
                    LinearSign::Minus => q.iv() - ub.sigma,
                };
                sq(p * ub.u).sqrt1pm1().map_err(e2s)
            }
            Family::SymLog { q1, q2, shape } => symlog_excess(q1, q2, shape, ub),
            other => Err(format!("no ratio form for family {other:?}")),
        },
    }
}

impl RatioExpr {
    /// Enclosure of `ratio − 1` over the box.
    pub fn excess(&self, ub: &UBox) -> Result<RealInterval, String> {
        let mut acc = RealInterval::zero();
        for term in &self.terms {
            let mut x = factor_excess(&term.factor, ub)?;
            if term.clamp {
                x = x.max_f(0.0);
            }
            let e = term.exponent.at(ub.sigma, &self.a, &self.b);
            if e == RealInterval::zero() {
                continue;
            }
            if e != RealInterval::one() {
                x = (e * x.ln_1p().map_err(e2s)?).exp_m1();
            }
            acc = acc + x + acc * x;
        }
        Ok(acc)
    }

    fn excess_on(&self, r: &Region) -> Result<RealInterval, String> {
        self.excess(&UBox::from_region(r)?)
    }

    /// Has a `SymLog` term.
    pub fn has_symlog(&self) -> bool {
        self.terms.iter().any(|t| matches!(&t.factor, RatioFactor::Family { family: Family::SymLog { .. } }))
    }

    /// Largest `Q` entering the ratio, for the default cap.
    pub fn params(&self) -> Vec<RealInterval> {
        let mut out = Vec::new();
        for t in &self.terms {
            if let RatioFactor::Family { family } = &t.factor {
                match family {
                    Family::SymLog { q1, q2, .. } => {
                        out.push(q1.iv());
                        out.push(q2.iv());
                    }
                    Family::Linear { q, .. } => out.push(q.iv()),
                    _ => {}
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    LinearRatio,
    SymlogRatio,
    SymlogMonotone,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEnvelope {
    pub kind: EnvelopeKind,
    pub ratio: RatioExpr,
    pub t_cap: f64,
}

impl TailEnvelope {
    /// Envelope for a ratio; the kind follows from its terms.
    pub fn for_ratio(ratio: RatioExpr, t_cap: f64) -> Result<Self, VerifyError> {
        let mut floor: f64 = 3.0;
        for t in &ratio.terms {
            if let RatioFactor::Family { family: Family::SymLog { q1, q2, .. } } = &t.factor {
                floor = floor.max((q1.iv() + ratio.b.iv()).hi()).max((q2.iv() - ratio.a.iv()).hi());
            }
        }
        if t_cap < floor {
            return Err(VerifyError::Domain(format!("T_cap {t_cap} below {floor}")));
        }
        let kind = if ratio.has_symlog() { EnvelopeKind::SymlogRatio } else { EnvelopeKind::LinearRatio };
        Ok(Self { kind, ratio, t_cap })
    }
}

pub(crate) fn excess_tolerance() -> Tolerance {
    Tolerance { abs: 1e-300, rel: 1e-3 }
}

/// Certified bounds for `sup (ratio − 1)` over `σ ∈ [a, b]`, `t ∈ [t_lo, t_hi]`.
pub(crate) fn sup_excess(ratio: &RatioExpr, t_lo: f64, t_hi: f64, budget: u64) -> Result<Extremum, VerifyError> {
    let sig = RealInterval::new(ratio.a.iv().lo(), ratio.b.iv().hi()).expect("a < b");
    let region = Region::from_intervals(sig, u_range(t_lo, t_hi));
    maximize(|r| ratio.excess_on(r), region, excess_tolerance(), budget)
}

/// Upper bound for the ratio at all `t ≥ t0 ≥ T_cap`: the interval
/// `[1 + attained, 1 + bound]` of the supremum.
pub fn tail_envelope_eval(env: &TailEnvelope, t0: f64) -> Result<RealInterval, VerifyError> {
    if env.kind == EnvelopeKind::SymlogMonotone {
        return Err(VerifyError::Domain("monotonicity envelopes carry no ratio".into()));
    }
    if t0 < env.t_cap {
        return Err(VerifyError::Domain(format!("t0 = {t0} below T_cap = {}", env.t_cap)));
    }
    let ex = sup_excess(&env.ratio, t0, f64::INFINITY, 200_000)?;
    let lo = RealInterval::point(ex.attained).add_f(1.0).lo();
    let hi = RealInterval::point(ex.bound).add_f(1.0).hi();
    Ok(RealInterval::new(lo.min(hi), hi).expect("ordered"))
}

/// Certify `ratio ≥ 1` on the line `σ = sigma` for all `t ≥ t_from`.
pub fn comparison_excess(ratio: &RatioExpr, sigma: &Scalar, t_from: f64, cfg: &Config) -> Result<Verdict, VerifyError> {
    let region = Region::from_intervals(sigma.iv(), u_range(t_from, f64::INFINITY));
    let judge = |r: &Region| -> Judgement {
        match ratio.excess_on(r) {
            Ok(v) if v.lo() >= 0.0 => Judgement::Accept(v.lo()),
            Ok(_) => {
                let m = r.midpoint();
                match ratio.excess_on(&m) {
                    Ok(v) if v.hi() < 0.0 => {
                        let t = RealInterval::point(recip_point_down(m.t.lo()));
                        let at = Region::from_intervals(m.sigma, t);
                        Judgement::Reject(at.to_counter(v.add_f(1.0), 1.0, "ratio below 1"))
                    }
                    _ => Judgement::Split,
                }
            }
            Err(e) => Judgement::Fail(e),
        }
    };
    let out = explore(vec![region], cfg.budget, judge);
    cfg.events.emit(
        "comparison",
        serde_json::json!({ "ratio": ratio.label, "sigma": sigma.to_string(), "t_from": t_from, "boxes": out.boxes }),
    );
    if let Some(counter) = out.counter {
        return Ok(Verdict::Refuted { counter, boxes: out.boxes });
    }
    if let Some(e) = out.error {
        return Err(e);
    }
    if out.exhausted || out.unresolved.is_some() {
        return Ok(Verdict::Exhausted { boxes: out.boxes, detail: format!("{} ≥ 1 undecided", ratio.label) });
    }
    let claim = Claim::Comparison { ratio: ratio.label.clone(), sigma: sigma.iv().mid(), t_from, min_excess: out.min_accepted };
    Ok(Verdict::Verified { fact: Fact::new(claim, out.boxes, out.min_accepted) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfun::build_catalog;
    use crate::interval::ComplexRect;

    fn g_ratio(name: &str) -> RatioExpr {
        let e = build_catalog(name, &[], None).unwrap();
        RatioExpr {
            label: name.into(),
            a: Scalar::int(1),
            b: Scalar::int(2),
            terms: vec![RatioTerm {
                factor: RatioFactor::Family { family: e.family },
                exponent: ExponentLaw::constant(Scalar::int(1)),
                clamp: false,
            }],
        }
    }

    fn classical(name: &str, t: f64) -> f64 {
        let l = t.ln();
        match name {
            "Ex1G1" => l,
            "Ex1G2" => 0.5 * l + 1.93,
            "Ex1G3" => 0.2 * l + 44.02,
            "Ex1G4" => 1.731 * l / l.ln(),
            "Ex1G5" => 58.096 * l.powf(2.0 / 3.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn u_form_matches_direct_evaluation() {
        for name in ["Ex1G1", "Ex1G2", "Ex1G3", "Ex1G4", "Ex1G5"] {
            let g = build_catalog(name, &[], None).unwrap().expr;
            let r = g_ratio(name);
            for &(s, t) in &[(1.0, 20.0), (1.5, 100.0), (2.0, 1000.0), (1.25, 57.5)] {
                let ub = UBox::new(RealInterval::point(s), RealInterval::point(1.0 / t)).unwrap();
                let ex = r.excess(&ub).unwrap();
                let direct = g.abs_eval(&ComplexRect::point(s, t)).unwrap().mid() / classical(name, t) - 1.0;
                let tol = 1e-12 * (1.0 + direct.abs()) + ex.width();
                assert!((ex.mid() - direct).abs() <= tol + 1e-9 * direct.abs(), "{name} at {s}+{t}i: {ex} vs {direct}");
            }
        }
    }

    #[test]
    fn ubox_at_infinity() {
        let ub = UBox::new(RealInterval::point(1.0), RealInterval::new(0.0, 0.01).unwrap()).unwrap();
        assert_eq!(ub.lam.lo(), 0.0);
        assert!(ub.lam.hi() >= 1.0 / 100f64.ln());
        assert_eq!(ub.nu.unwrap().lo(), 0.0);
        let r = g_ratio("Ex1G1");
        let ex = r.excess(&ub).unwrap();
        assert_eq!(ex.lo(), 0.0);
    }

    #[test]
    fn envelope_decreases() {
        let env = TailEnvelope::for_ratio(g_ratio("Ex1G1"), 100.0).unwrap();
        let a = tail_envelope_eval(&env, 1e5).unwrap();
        let b = tail_envelope_eval(&env, 1e6).unwrap();
        assert!(a.hi() >= b.hi());
        assert!(tail_envelope_eval(&env, 50.0).is_err());
    }
}
