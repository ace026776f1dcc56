//! Nonvanishing of comparison functions and the small-`t` condition
//! `|f(σ+it)| < Π_i min_σ′ |G_i(σ′+it)|^{e_i(σ)}` for `0 ≤ t ≤ T0`.

use std::cmp::Ordering;

use super::envelope::ExponentLaw;
use super::sup::{maximize, minimize, verify_inf, verify_sup, Tolerance};
use super::{default_t_cap, Claim, Config, CounterBox, Fact, GTarget, Mode, Region, Target, Verdict, VerifyError};
use crate::gfun::{Family, GExpr, SymLogForm};
use crate::interval::{RealInterval, Scalar};

/// One factor `|G|^{e(σ)}` of the right-hand side.
#[derive(Debug, Clone)]
pub struct SmallTFactor {
    pub label: String,
    pub expr: GExpr,
    pub law: ExponentLaw,
}

fn region_of(a: &Scalar, b: &Scalar, t_lo: f64, t_hi: f64) -> Result<Region, VerifyError> {
    Region::new((a.iv().lo(), b.iv().hi()), (t_lo, t_hi))
}

/// Why `|G| > 0` persists beyond `T_cap`, if a catalog argument applies.
fn tail_argument(family: &Family, t_cap: f64) -> Option<String> {
    let e = std::f64::consts::E;
    match family {
        Family::Constant => Some("nonzero constant".into()),
        Family::Linear { .. } if t_cap > 0.0 => Some("|Q ± s| ≥ t".into()),
        Family::Log { .. } if t_cap > 1.0 => Some("|log(Q+s)| ≥ log t".into()),
        Family::LogLog { .. } if t_cap > e => Some("|log log(Q+s)| ≥ log log t".into()),
        Family::SymLog { shape, .. } if t_cap > e => Some(match shape {
            SymLogForm::Affine { .. } => "|c·S + k| ≥ c·log t + k with Re S ≥ log t".into(),
            SymLogForm::Power { .. } => "|S| ≥ log t".into(),
            SymLogForm::OverLog { .. } => "|S| ≥ log t > 1 so S/log S is finite and nonzero".into(),
        }),
        _ => None,
    }
}

/// Certify `|G| > 0` on `[a, b] × [0, T_cap]`, and beyond by a family
/// argument. Functions outside the catalog families get a conditional fact.
pub fn verify_nonvanishing(expr: &GExpr, family: &Family, a: &Scalar, b: &Scalar, cfg: &Config) -> Result<Verdict, VerifyError> {
    let params: Vec<RealInterval> = match family {
        Family::Linear { q, .. } | Family::Log { q } | Family::LogLog { q } => vec![q.iv()],
        Family::SymLog { q1, q2, .. } => vec![q1.iv(), q2.iv()],
        _ => Vec::new(),
    };
    let t_cap = cfg.t_cap.unwrap_or_else(|| default_t_cap(&params));
    let region = region_of(a, b, 0.0, t_cap)?;
    let target = GTarget { expr };
    let v = verify_inf(&target, region, 0.0, cfg)?;
    let (boxes, min_abs) = match &v {
        Verdict::Verified { fact } => (fact.boxes, fact.margin),
        _ => return Ok(v),
    };
    let tail = tail_argument(family, t_cap);
    let claim = Claim::Nonvanishing {
        expr: expr.to_string(),
        a: a.iv().mid(),
        b: b.iv().mid(),
        t_cap,
        min_abs,
        tail: tail.clone().unwrap_or_else(|| "none".into()),
    };
    let fact = Fact::new(claim, boxes, min_abs);
    Ok(match tail {
        Some(_) => Verdict::Verified { fact },
        None => Verdict::Conditional { fact: fact.conditional(format!("|G| > 0 checked only for t ≤ {t_cap}")) },
    })
}

/// Certified lower bound of `|G|` over a region.
fn inf_abs(expr: &GExpr, region: Region, budget: u64) -> Result<f64, VerifyError> {
    let e = minimize(|r| expr.abs_eval(&r.rect()).map_err(|e| e.to_string()), region, Tolerance { abs: 1e-12, rel: 1e-4 }, budget)?;
    Ok(if e.bound.is_finite() { e.bound.max(0.0) } else { 0.0 })
}

/// Certified upper bound of `|G|` over a region.
fn sup_abs(expr: &GExpr, region: Region, budget: u64) -> Result<f64, VerifyError> {
    let e = maximize(|r| expr.abs_eval(&r.rect()).map_err(|e| e.to_string()), region, Tolerance { abs: 1e-12, rel: 1e-6 }, budget)?;
    Ok(e.bound)
}

/// Lower bound of `x^e` for `x ≥ m ≥ 0` and a scalar exponent `e ≥ 0`.
fn pow_down(m: f64, e: f64) -> f64 {
    if e == 0.0 {
        return 1.0;
    }
    if m == 0.0 {
        return 0.0;
    }
    if e == 1.0 {
        return m;
    }
    let l = RealInterval::point(m).ln().expect("positive");
    (l * RealInterval::point(e)).exp().lo()
}

/// Upper bound of `x^e` for `0 ≤ x ≤ m`.
fn pow_up(m: f64, e: f64) -> f64 {
    if e == 0.0 {
        return 1.0;
    }
    if m == 0.0 {
        return 0.0;
    }
    if e == 1.0 {
        return m;
    }
    let l = RealInterval::point(m).ln().expect("positive");
    (l * RealInterval::point(e)).exp().hi()
}

/// Subdivision levels `(σ-slices, t-slices)` tried in order.
const LEVELS: [(usize, usize); 5] = [(1, 1), (4, 1), (8, 4), (16, 16), (32, 32)];

fn slices(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let w = (hi - lo) / n as f64;
    (0..n)
        .map(|k| {
            let l = if k == 0 { lo } else { lo + w * k as f64 };
            let h = if k + 1 == n { hi } else { lo + w * (k + 1) as f64 };
            (l, h)
        })
        .collect()
}

/// Upper bound for the right-hand side at the heights of `c`, for deciding
/// whether a counterexample to the sufficient check refutes the condition.
fn rhs_upper(factors: &[SmallTFactor], a: &Scalar, b: &Scalar, c: &CounterBox, budget: u64) -> Result<f64, VerifyError> {
    let region = Region::from_intervals(RealInterval::new(a.iv().lo(), b.iv().hi()).expect("a < b"), c.t);
    let mut acc = RealInterval::one();
    for f in factors {
        let m = sup_abs(&f.expr, region, budget)?;
        let e = f.law.at(c.sigma, a, b);
        let sel = if m >= 1.0 { e.hi() } else { e.lo() };
        acc = acc * RealInterval::point(pow_up(m, sel));
    }
    Ok(acc.hi())
}

/// Certify the small-`t` condition on `[a, b] × [0, t0]`: first with one
/// uniform right-hand side, then on successively finer `σ × t` grids.
pub fn verify_small_t(
    target: &dyn Target,
    factors: &[SmallTFactor],
    a: &Scalar,
    b: &Scalar,
    t0: f64,
    cfg: &Config,
) -> Result<Verdict, VerifyError> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(VerifyError::Domain(format!("T0 = {t0} must be positive and finite")));
    }
    for f in factors {
        for e in [&f.law.at_a, &f.law.at_b] {
            if e.sign() == Some(Ordering::Less) || e.iv().lo() < 0.0 && e.sign().is_none() {
                return Err(VerifyError::Domain(format!("{}: exponent {e} must be nonnegative", f.label)));
            }
        }
    }
    let mode = if target.holomorphic() { Mode::BoundaryOnly } else { Mode::FullRegion };
    let (s_lo, s_hi) = (a.iv().lo(), b.iv().hi());
    let mut total = 0u64;
    let mut worst_margin = f64::INFINITY;
    let mut last_counter: Option<CounterBox> = None;
    for (ns, nt) in LEVELS {
        let mut ok = true;
        for (t_lo, t_hi) in slices(0.0, t0, nt) {
            let band = region_of(a, b, t_lo, t_hi)?;
            let mins: Vec<f64> = factors.iter().map(|f| inf_abs(&f.expr, band, 100_000)).collect::<Result<_, _>>()?;
            for (lo, hi) in slices(s_lo, s_hi, ns) {
                let piece = Region::new((lo, hi), (t_lo, t_hi))?;
                let mut rhs = RealInterval::one();
                for (f, &m) in factors.iter().zip(&mins) {
                    let e = f.law.at(piece.sigma, a, b);
                    let sel = if m >= 1.0 { e.lo() } else { e.hi() };
                    rhs = rhs * RealInterval::point(pow_down(m, sel));
                }
                let bound = rhs.lo();
                if !(bound > 0.0) {
                    ok = false;
                    break;
                }
                let v = verify_sup(target, piece, mode, bound, cfg)?;
                total += v.boxes();
                match v {
                    Verdict::Verified { fact } => worst_margin = worst_margin.min(fact.margin),
                    Verdict::Refuted { counter, .. } => {
                        last_counter = Some(counter);
                        ok = false;
                    }
                    _ => ok = false,
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                break;
            }
        }
        cfg.events.emit(
            "small_t_level",
            serde_json::json!({ "target": target.describe(), "sigma_slices": ns, "t_slices": nt, "ok": ok, "boxes": total }),
        );
        if ok {
            let claim = Claim::SmallT {
                target: target.describe(),
                factors: factors.iter().map(|f| f.label.clone()).collect(),
                a: a.iv().mid(),
                b: b.iv().mid(),
                t0,
                slices: ns * nt,
            };
            return Ok(Verdict::Verified { fact: Fact::new(claim, total, worst_margin) });
        }
        if let Some(c) = &last_counter {
            if c.value.lo() > rhs_upper(factors, a, b, c, 100_000)? {
                return Ok(Verdict::Refuted { counter: c.clone(), boxes: total });
            }
        }
    }
    Ok(Verdict::Exhausted { boxes: total, detail: "small-t condition undecided at the finest grid".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfun::{build_catalog, Sign};
    use crate::verifier::{ZetaKind, ZetaTarget};

    fn factor(name: &str, params: &[Scalar], at_a: Scalar, at_b: Scalar) -> SmallTFactor {
        let e = build_catalog(name, params, None).unwrap();
        SmallTFactor { label: name.into(), expr: e.expr, law: ExponentLaw { at_a, at_b } }
    }

    #[test]
    fn g1_small_t() {
        let fs = vec![
            factor("Ex1G1", &[], Scalar::int(1), Scalar::int(0)),
            factor("E", &[], Scalar::int(0), Scalar::parse("log(1.6)").unwrap()),
        ];
        let z = ZetaTarget::new(ZetaKind::F);
        let v = verify_small_t(&z, &fs, &Scalar::int(1), &Scalar::int(2), 3.0, &Config::default()).unwrap();
        assert!(v.is_verified(), "{v:?}");
    }

    #[test]
    fn constant_below_value_refuted() {
        let fs = vec![factor("Const", &[Scalar::parse("0.9").unwrap()], Scalar::int(1), Scalar::int(1))];
        let z = ZetaTarget::new(ZetaKind::F);
        let v = verify_small_t(&z, &fs, &Scalar::int(1), &Scalar::int(2), 3.0, &Config::default()).unwrap();
        assert!(v.counter().is_some(), "{v:?}");
    }

    #[test]
    fn nonvanishing() {
        let (a, b) = (Scalar::int(1), Scalar::int(2));
        let g = build_catalog("Ex1G4", &[], None).unwrap();
        let v = verify_nonvanishing(&g.expr, &g.family, &a, &b, &Config::default()).unwrap();
        assert!(v.is_verified(), "{v:?}");
        let bad = GExpr::affine(Scalar::parse("-1.5").unwrap(), Sign::Plus);
        let fam = Family::Linear { q: Scalar::parse("-1.5").unwrap(), sign: crate::gfun::LinearSign::Plus };
        let v = verify_nonvanishing(&bad, &fam, &a, &b, &Config::default()).unwrap();
        let c = v.counter().unwrap();
        assert_eq!((c.sigma.lo(), c.t.lo()), (1.5, 0.0));
    }
}
