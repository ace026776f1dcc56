//! Monotonicity of `|G(σ+it)|` in `σ`.
//!
//! On `[t0, T_cap]` the sign of `∂|G|²/∂σ = 2·Re(conj(G)·G′)` is checked
//! box by box. Beyond `T_cap` one of the per-family lemmas below applies.
//!
//! For `S = ½(log(Q₁+s) + log(Q₂−s))`, with `p = Q₁+σ`, `q = Q₂−σ`,
//! `P = 1+p²u²`, `Q = 1+q²u²` and `Re S = log t + D`, `Im S = E`:
//!
//! * `∂D/∂σ = (u²/2)(p−q)(1−pqu²)/(PQ)`,
//! * `∂E/∂σ = −(u/2)(1/P + 1/Q)` and `E` has the sign of `q−p`,
//!
//! so for `c·S + k` and `c·S^p` the derivative of the squared modulus has the
//! sign of `σ − (Q₂−Q₁)/2` as long as `pqu² < 1`. For `c·S/log S` the sign is
//! `sign(p−q)·sign(B)` with `B` from [`overlog_b`].

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::engine::{explore, Judgement, Outcome};
use super::envelope::u_range;
use super::{default_t_cap, Claim, Config, Fact, Region, Verdict, VerifyError};
use crate::gfun::{Family, GExpr, LinearSign, SymLogForm};
use crate::interval::{ComplexRect, RealInterval, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    fn accepts(self, h: RealInterval) -> bool {
        match self {
            Direction::Increasing => h.lo() >= 0.0,
            Direction::Decreasing => h.hi() <= 0.0,
        }
    }

    fn refutes(self, h: RealInterval) -> bool {
        match self {
            Direction::Increasing => h.hi() < 0.0,
            Direction::Decreasing => h.lo() > 0.0,
        }
    }

    /// Required sign of `σ − centre` for a `SymLog` family.
    fn side(self) -> Ordering {
        match self {
            Direction::Increasing => Ordering::Greater,
            Direction::Decreasing => Ordering::Less,
        }
    }
}

/// How the range `t ≥ T_cap` was covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "snake_case")]
pub enum TailLemma {
    /// `∂|Q ± σ + it|²/∂σ = ±2(Q ± σ)` for every `t`.
    LinearExact,
    ConstantModulus,
    /// Sign of `σ − centre`; `pq_u2` is the certified bound on `pqu²`.
    SymlogSign { centre: f64, pq_u2: f64 },
    /// Sign of `σ − centre` times the certified `inf B > 0`.
    OverlogSign { centre: f64, min_b: f64, boxes: u64 },
    /// Only `[T_cap, t_max]` was checked.
    Unverified { t_max: f64 },
}

/// A monotonicity question for one comparison function.
#[derive(Debug, Clone, Copy)]
pub struct MonotoneCheck<'a> {
    pub expr: &'a GExpr,
    pub family: &'a Family,
    pub a: &'a Scalar,
    pub b: &'a Scalar,
    pub direction: Direction,
    pub t0: f64,
    /// Height up to which the finite check is run when no tail lemma exists.
    pub t_max: Option<f64>,
}

fn family_params(family: &Family) -> Vec<RealInterval> {
    match family {
        Family::Linear { q, .. } | Family::Log { q } | Family::LogLog { q } => vec![q.iv()],
        Family::SymLog { q1, q2, .. } => vec![q1.iv(), q2.iv()],
        _ => Vec::new(),
    }
}

fn strip_sigma(a: &Scalar, b: &Scalar) -> Result<RealInterval, VerifyError> {
    RealInterval::new(a.iv().lo(), b.iv().hi()).map_err(|e| VerifyError::Domain(e.to_string()))
}

/// Sign of `σ − c` over `[a, b]`, if it is the same everywhere (zero allowed
/// only at an endpoint that equals `c` exactly).
fn side_of_centre(c: &Scalar, a: &Scalar, b: &Scalar) -> Option<Ordering> {
    let lo = a.sub(c).sign()?;
    let hi = b.sub(c).sign()?;
    match (lo, hi) {
        (Ordering::Greater, Ordering::Greater) | (Ordering::Equal, Ordering::Greater) => Some(Ordering::Greater),
        (Ordering::Less, Ordering::Less) | (Ordering::Less, Ordering::Equal) => Some(Ordering::Less),
        _ => None,
    }
}

fn h_of(g: &GExpr, d: &GExpr, s: &ComplexRect) -> Result<RealInterval, String> {
    let gv = g.eval(s).map_err(|e| e.to_string())?;
    let dv = d.eval(s).map_err(|e| e.to_string())?;
    Ok(gv.re * dv.re + gv.im * dv.im)
}

/// `h = Re(conj(G)·G′)` on a box, together with `∂h/∂σ = |G′|² + Re(conj(G)·G″)`.
/// The enclosure of `h` is the naive one intersected with the mean value form
/// around the box centre, using `∂h/∂t = −Im(conj(G)·G″)`.
fn h_box(g: &GExpr, d: &GExpr, d2: &GExpr, r: &Region) -> Result<(RealInterval, RealInterval), String> {
    let s = r.rect();
    let gv = g.eval(&s).map_err(|e| e.to_string())?;
    let dv = d.eval(&s).map_err(|e| e.to_string())?;
    let d2v = d2.eval(&s).map_err(|e| e.to_string())?;
    let naive = gv.re * dv.re + gv.im * dv.im;
    let hs = dv.norm_sqr() + gv.re * d2v.re + gv.im * d2v.im;
    let ht = gv.im * d2v.re - gv.re * d2v.im;
    let m = r.midpoint();
    let hm = h_of(g, d, &m.rect())?;
    let mv = hm + hs * (r.sigma - m.sigma) + ht * (r.t - m.t);
    Ok((naive.intersect(&mv).unwrap_or(naive), hs))
}

/// Sign check of `Re(conj(G)·G′)` on `sigma × [t_lo, t_hi]`.
fn finite_part(chk: &MonotoneCheck<'_>, sigma: RealInterval, t_lo: f64, t_hi: f64, budget: u64) -> Result<Outcome, VerifyError> {
    let d1 = chk.expr.deriv();
    // the centre rule: h vanishes on σ = c, so boxes touching it need h′ ≥ 0
    let edge = chk.family.symmetry_center().and_then(|c| {
        let at = match chk.direction {
            Direction::Increasing => chk.a,
            Direction::Decreasing => chk.b,
        };
        (c.sub(at).sign() == Some(Ordering::Equal)).then_some(())
    });
    let d2 = d1.deriv();
    let region = Region::from_intervals(sigma, RealInterval::new(t_lo, t_hi).map_err(|e| VerifyError::Domain(e.to_string()))?);
    let dir = chk.direction;
    let judge = |r: &Region| -> Judgement {
        let (h, hs) = match h_box(chk.expr, &d1, &d2, r) {
            Ok(v) => v,
            Err(e) => return Judgement::Fail(e),
        };
        if dir.accepts(h) {
            return Judgement::Accept(h.mag());
        }
        if edge.is_some() {
            let touches = match dir {
                Direction::Increasing => r.sigma.lo() <= sigma.lo(),
                Direction::Decreasing => r.sigma.hi() >= sigma.hi(),
            };
            if touches && hs.lo() >= 0.0 {
                return Judgement::Accept(0.0);
            }
        }
        let m = r.midpoint();
        if let Ok(hm) = h_of(chk.expr, &d1, &m.rect()) {
            if dir.refutes(hm) {
                return Judgement::Reject(m.to_counter(hm, 0.0, "Re(conj(G)·G′) has the wrong sign"));
            }
        }
        Judgement::Split
    };
    Ok(explore(vec![region], budget, judge))
}

/// `B` of the quotient lemma on a box, with `ξ = 1/Re S` and `ν = 1/log|S|`
/// ranging over the given intervals.
fn overlog_b(q1: &Scalar, q2: &Scalar, sigma: RealInterval, u: RealInterval, xi: RealInterval, nu: RealInterval) -> Result<RealInterval, String> {
    let e2s = |e: crate::interval::IntervalError| e.to_string();
    let one = RealInterval::one();
    let p = q1.iv() + sigma;
    let q = q2.iv() - sigma;
    let u2 = u.sqr();
    let pp = (p.sqr() * u2).add_f(1.0);
    let qq = (q.sqr() * u2).add_f(1.0);
    let pq_u2 = p * q * u2;
    let one_m = one - pq_u2;
    let dq = q2.sub(q1).iv() - sigma.mul_f(2.0);
    let w = (dq * u).div(&(one + pq_u2)).map_err(e2s)?;
    let e1u = w.atanc().mul_f(0.5).div(&(one + pq_u2)).map_err(e2s)?;
    let e = dq * u * e1u;
    let ppqq = pp * qq;
    let inv = pp.recip().map_err(e2s)? + qq.recip().map_err(e2s)?;
    let k1 = one_m.div(&ppqq).map_err(e2s)?.mul_f(0.5) + inv.mul_f(0.5) * e1u * xi;
    let k2 = inv.mul_f(0.5) - (u2 * dq.sqr() * one_m * e1u * xi).div(&ppqq).map_err(e2s)?.mul_f(0.5);
    let th1u = e1u * xi * (e * xi).atanc();
    let th = dq * u * th1u;
    let den = one + th.sqr() * nu.sqr();
    let r = nu.div(&den).map_err(e2s)?;
    Ok(k1 * (one - r) - k2 * th1u * nu.sqr().div(&den).map_err(e2s)?)
}

/// Certify the per-family tail lemma for `t ≥ t_cap`.
pub fn monotone_tail_lemma(
    family: &Family,
    a: &Scalar,
    b: &Scalar,
    direction: Direction,
    t_cap: f64,
    cfg: &Config,
) -> Result<TailLemma, VerifyError> {
    let sigma = strip_sigma(a, b)?;
    match family {
        Family::Constant => Ok(TailLemma::ConstantModulus),
        Family::Linear { q, sign } => {
            let (m, want) = match sign {
                LinearSign::Plus => (q.iv() + sigma, Direction::Increasing),
                LinearSign::Minus => (q.iv() - sigma, Direction::Decreasing),
            };
            if m.lo() > 0.0 && direction == want {
                Ok(TailLemma::LinearExact)
            } else {
                Err(VerifyError::NotCertifiable(format!("|{}σ + it| is not {direction:?} on the strip", q)))
            }
        }
        Family::LogLog { .. } => Err(VerifyError::NotCertifiable(
            "LogLog factors carry no monotonicity lemma; use equal exponents on both lines".into(),
        )),
        Family::Log { .. } | Family::Other => Err(VerifyError::NoTailLemma(format!("{family:?}"))),
        Family::SymLog { q1, q2, shape } => {
            let c = family.symmetry_center().ok_or_else(|| VerifyError::Domain("no centre".into()))?;
            if side_of_centre(&c, a, b) != Some(direction.side()) {
                return Err(VerifyError::NotCertifiable(format!(
                    "strip [{a}, {b}] is not on the {} side of the centre {c}",
                    if direction == Direction::Increasing { "right" } else { "left" }
                )));
            }
            let p = q1.iv() + sigma;
            let q = q2.iv() - sigma;
            if !(p.lo() > 0.0 && q.lo() > 0.0) {
                return Err(VerifyError::NotCertifiable("Q1 + σ and Q2 − σ must be positive".into()));
            }
            if !(t_cap.ln() > 1.0) {
                return Err(VerifyError::NotCertifiable(format!("T_cap = {t_cap} too small")));
            }
            let u = u_range(t_cap, f64::INFINITY);
            let pq_u2 = p * q * u.sqr();
            match shape {
                SymLogForm::Affine { c: cc, k } => {
                    if !(cc.iv().lo() > 0.0 && k.iv().lo() >= 0.0) {
                        return Err(VerifyError::NotCertifiable("need c > 0 and k ≥ 0".into()));
                    }
                    if pq_u2.hi() >= 1.0 {
                        return Err(VerifyError::NotCertifiable(format!("pq/T_cap² = {pq_u2} not below 1")));
                    }
                    Ok(TailLemma::SymlogSign { centre: c.iv().mid(), pq_u2: pq_u2.hi() })
                }
                SymLogForm::Power { c: cc, p: pw } => {
                    if !(cc.iv().lo() > 0.0 && pw.iv().lo() > 0.0) {
                        return Err(VerifyError::NotCertifiable("need c > 0 and p > 0".into()));
                    }
                    if pq_u2.hi() >= 1.0 {
                        return Err(VerifyError::NotCertifiable(format!("pq/T_cap² = {pq_u2} not below 1")));
                    }
                    Ok(TailLemma::SymlogSign { centre: c.iv().mid(), pq_u2: pq_u2.hi() })
                }
                SymLogForm::OverLog { c: cc } => {
                    if !(cc.iv().lo() > 0.0) {
                        return Err(VerifyError::NotCertifiable("need c > 0".into()));
                    }
                    let ln_cap = RealInterval::point(t_cap).ln().map_err(|e| VerifyError::Domain(e.to_string()))?;
                    let xi = RealInterval::new(0.0, ln_cap.recip().expect("positive").hi()).expect("ordered");
                    let ll = ln_cap.ln().map_err(|e| VerifyError::Domain(e.to_string()))?;
                    let nu = RealInterval::new(0.0, ll.recip().map_err(|e| VerifyError::Domain(e.to_string()))?.hi()).expect("ordered");
                    let region = Region::from_intervals(sigma, u);
                    let judge = |r: &Region| -> Judgement {
                        match overlog_b(q1, q2, r.sigma, r.t, xi, nu) {
                            Ok(v) if v.lo() > 0.0 => Judgement::Accept(v.lo()),
                            Ok(_) => Judgement::Split,
                            Err(e) => Judgement::Fail(e),
                        }
                    };
                    let out = explore(vec![region], cfg.budget.min(200_000), judge);
                    if out.counter.is_none() && out.error.is_none() && !out.exhausted && out.unresolved.is_none() {
                        Ok(TailLemma::OverlogSign { centre: c.iv().mid(), min_b: out.min_accepted, boxes: out.boxes })
                    } else {
                        Err(VerifyError::NoTailLemma("quotient lemma could not be instantiated".into()))
                    }
                }
            }
        }
    }
}

fn finite_failure(out: Outcome) -> Option<Result<Verdict, VerifyError>> {
    if let Some(counter) = out.counter {
        return Some(Ok(Verdict::Refuted { counter, boxes: out.boxes }));
    }
    if let Some(e) = out.error {
        return Some(Err(e));
    }
    if out.exhausted {
        return Some(Ok(Verdict::Exhausted { boxes: out.boxes, detail: "box budget exhausted in the finite part".into() }));
    }
    if let Some(r) = out.unresolved {
        return Some(Ok(Verdict::Exhausted {
            boxes: out.boxes,
            detail: format!("sign undecided on σ ∈ {}, t ∈ {}", r.sigma, r.t),
        }));
    }
    None
}

/// Certify that `|G(σ+it)|` is monotone in `σ ∈ [a, b]` for all `t ≥ t0`.
pub fn verify_monotone_sigma(chk: &MonotoneCheck<'_>, cfg: &Config) -> Result<Verdict, VerifyError> {
    let sigma = strip_sigma(chk.a, chk.b)?;
    if !(chk.t0 >= 0.0 && chk.t0.is_finite()) {
        return Err(VerifyError::Domain(format!("t0 = {} must be finite and nonnegative", chk.t0)));
    }
    let t_cap = cfg.t_cap.unwrap_or_else(|| default_t_cap(&family_params(chk.family))).max(chk.t0);
    let mut boxes = 0;
    let mut margin = f64::INFINITY;
    if chk.t0 < t_cap {
        let out = finite_part(chk, sigma, chk.t0, t_cap, cfg.budget)?;
        boxes += out.boxes;
        margin = margin.min(out.min_accepted);
        cfg.events.emit(
            "monotone_finite",
            serde_json::json!({ "expr": chk.expr.to_string(), "t0": chk.t0, "t_cap": t_cap, "boxes": out.boxes }),
        );
        if let Some(v) = finite_failure(out) {
            return v;
        }
    }
    let claim = |tail: TailLemma, t_max: Option<f64>| Claim::Monotone {
        expr: chk.expr.to_string(),
        a: chk.a.iv().mid(),
        b: chk.b.iv().mid(),
        direction: chk.direction,
        t0: chk.t0,
        t_cap,
        t_max,
        tail,
    };
    match monotone_tail_lemma(chk.family, chk.a, chk.b, chk.direction, t_cap, cfg) {
        Ok(tail) => {
            if let TailLemma::OverlogSign { boxes: b, .. } = &tail {
                boxes += b;
            }
            Ok(Verdict::Verified { fact: Fact::new(claim(tail, None), boxes, margin.min(f64::MAX)) })
        }
        Err(VerifyError::NoTailLemma(why)) => {
            let Some(t_max) = chk.t_max else {
                return Err(VerifyError::NoTailLemma(why));
            };
            if t_max > t_cap {
                let out = finite_part(chk, sigma, t_cap, t_max, cfg.budget)?;
                boxes += out.boxes;
                if let Some(v) = finite_failure(out) {
                    return v;
                }
            }
            let fact = Fact::new(claim(TailLemma::Unverified { t_max }, Some(t_max)), boxes, margin.min(f64::MAX))
                .conditional(format!("checked only up to t = {t_max:e}: {why}"));
            Ok(Verdict::Conditional { fact })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfun::build_catalog;

    fn check(name: &str, params: &[Scalar], a: i64, b: i64, dir: Direction, t0: f64) -> Result<Verdict, VerifyError> {
        let e = build_catalog(name, params, None).unwrap();
        let (a, b) = (Scalar::int(a), Scalar::int(b));
        let chk = MonotoneCheck { expr: &e.expr, family: &e.family, a: &a, b: &b, direction: dir, t0, t_max: None };
        verify_monotone_sigma(&chk, &Config::default())
    }

    #[test]
    fn linear_increasing() {
        let v = check("Linear", &[Scalar::int(1)], 1, 2, Direction::Increasing, 0.0).unwrap();
        assert!(v.is_verified(), "{v:?}");
        let Claim::Monotone { tail, .. } = &v.fact().unwrap().claim else { panic!("wrong claim") };
        assert_eq!(*tail, TailLemma::LinearExact);
        let v = check("Linear", &[Scalar::int(1)], 1, 2, Direction::Decreasing, 0.0).unwrap();
        assert!(v.counter().is_some());
    }

    #[test]
    fn g1_increasing_from_three() {
        let v = check("Ex1G1", &[], 1, 2, Direction::Increasing, 3.0).unwrap();
        assert!(v.is_verified(), "{v:?}");
    }

    #[test]
    fn quotient_lemma() {
        let e = build_catalog("Ex1G4", &[], None).unwrap();
        let t = monotone_tail_lemma(&e.family, &Scalar::int(1), &Scalar::int(2), Direction::Increasing, 100.0, &Config::default()).unwrap();
        assert!(matches!(t, TailLemma::OverlogSign { min_b, .. } if min_b > 0.0));
    }

    #[test]
    fn log_needs_fallback() {
        let e = build_catalog("Log", &[Scalar::int(2)], None).unwrap();
        let (a, b) = (Scalar::int(1), Scalar::int(2));
        // |log(2+s)| decreases in σ once t is large
        let mut chk = MonotoneCheck { expr: &e.expr, family: &e.family, a: &a, b: &b, direction: Direction::Decreasing, t0: 30.0, t_max: None };
        assert!(matches!(verify_monotone_sigma(&chk, &Config::default()), Err(VerifyError::NoTailLemma(_))));
        chk.t_max = Some(1000.0);
        let v = verify_monotone_sigma(&chk, &Config::default()).unwrap();
        assert!(v.fact().unwrap().is_conditional());
    }
}
