//! Threshold checks (`sup ≤ bound`, `inf ≥ bound`) and branch-and-bound
//! extremum enclosures.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::engine::{explore, Judgement, Outcome};
use super::{Claim, Config, Fact, Mode, Region, Target, Verdict, VerifyError};
use crate::interval::RealInterval;

fn outcome_to_verdict(out: Outcome, claim: impl FnOnce(f64) -> (Claim, f64)) -> Result<Verdict, VerifyError> {
    if let Some(counter) = out.counter {
        return Ok(Verdict::Refuted { counter, boxes: out.boxes });
    }
    if let Some(e) = out.error {
        return Err(e);
    }
    if out.exhausted {
        return Ok(Verdict::Exhausted { boxes: out.boxes, detail: "box budget exhausted".into() });
    }
    if let Some(r) = out.unresolved {
        return Ok(Verdict::Exhausted {
            boxes: out.boxes,
            detail: format!("undecided at resolution limit on σ ∈ {}, t ∈ {}", r.sigma, r.t),
        });
    }
    let (c, margin) = claim(if out.max_accepted.is_finite() { out.max_accepted } else { out.min_accepted });
    Ok(Verdict::Verified { fact: Fact::new(c, out.boxes, margin) })
}

/// Certify `sup |target| ≤ bound` over `region` (or its boundary).
pub fn verify_sup(target: &dyn Target, region: Region, mode: Mode, bound: f64, cfg: &Config) -> Result<Verdict, VerifyError> {
    if !(bound > 0.0) {
        return Err(VerifyError::Domain(format!("bound must be positive, got {bound}")));
    }
    let pieces = match mode {
        Mode::FullRegion => vec![region],
        Mode::BoundaryOnly => {
            if !target.holomorphic() {
                return Err(VerifyError::Domain(format!("{} is not holomorphic; boundary mode refused", target.describe())));
            }
            region.edges()
        }
    };
    let judge = |r: &Region| -> Judgement {
        let s = r.rect();
        if let Some(ub) = target.lemma_upper(&s) {
            if ub <= bound {
                return Judgement::Accept(ub);
            }
        }
        match target.abs_enclosure(&s) {
            Ok(v) if v.hi() <= bound => Judgement::Accept(v.hi()),
            Ok(v) if v.lo() > bound => Judgement::Reject(r.to_counter(v, bound, "lower enclosure exceeds bound")),
            Ok(_) => {
                let m = r.midpoint();
                match target.abs_enclosure(&m.rect()) {
                    Ok(v) if v.lo() > bound => Judgement::Reject(m.to_counter(v, bound, "point value exceeds bound")),
                    _ => Judgement::Split,
                }
            }
            Err(e) => Judgement::Fail(e),
        }
    };
    let out = explore(pieces, cfg.budget, judge);
    cfg.events.emit(
        "verify_sup",
        serde_json::json!({ "target": target.describe(), "bound": bound, "boxes": out.boxes, "refuted": out.counter.is_some() }),
    );
    outcome_to_verdict(out, |worst| {
        (Claim::Sup { target: target.describe(), region, mode, bound }, bound - worst)
    })
}

/// Certify `inf |target| ≥ bound` over `region`, and `|target| > 0` on it.
pub fn verify_inf(target: &dyn Target, region: Region, bound: f64, cfg: &Config) -> Result<Verdict, VerifyError> {
    let judge = |r: &Region| -> Judgement {
        match target.abs_enclosure(&r.rect()) {
            Ok(v) if v.lo() >= bound && v.lo() > 0.0 => Judgement::Accept(v.lo()),
            Ok(v) if v.hi() < bound => Judgement::Reject(r.to_counter(v, bound, "upper enclosure below bound")),
            Ok(_) => {
                for c in std::iter::once(r.midpoint()).chain(r.corners()) {
                    if let Ok(v) = target.abs_enclosure(&c.rect()) {
                        if v.hi() < bound || (v == RealInterval::zero() && bound >= 0.0) {
                            return Judgement::Reject(c.to_counter(v, bound, "point value below bound"));
                        }
                    }
                }
                Judgement::Split
            }
            Err(e) => Judgement::Fail(e),
        }
    };
    let out = explore(vec![region], cfg.budget, judge);
    cfg.events.emit(
        "verify_inf",
        serde_json::json!({ "target": target.describe(), "bound": bound, "boxes": out.boxes, "refuted": out.counter.is_some() }),
    );
    let min = out.min_accepted;
    outcome_to_verdict(out, |_| (Claim::Inf { target: target.describe(), region, bound }, min - bound))
}

/// Stopping rule for branch and bound: `gap ≤ abs + rel·|attained|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

/// Result of a branch-and-bound run. For a maximization `bound` is a
/// certified upper bound of the supremum and `attained` a value taken at
/// `at`; for a minimization the roles of upper and lower are swapped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub bound: f64,
    pub attained: f64,
    pub at: (f64, f64),
    pub boxes: u64,
    pub converged: bool,
}

struct Node {
    upper: f64,
    region: Region,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.upper.total_cmp(&o.upper) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        self.upper.total_cmp(&o.upper)
    }
}

const MIN_REL: f64 = 1e-15;

/// Certified upper bound for `sup f` over `region`.
pub fn maximize<F>(f: F, region: Region, tol: Tolerance, budget: u64) -> Result<Extremum, VerifyError>
where
    F: Fn(&Region) -> Result<RealInterval, String>,
{
    let scale = region.scale();
    let mut best = Extremum { bound: f64::INFINITY, attained: f64::NEG_INFINITY, at: (region.sigma.mid(), region.t.mid()), boxes: 0, converged: false };
    let probe = |r: &Region, best: &mut Extremum| {
        let m = r.midpoint();
        if let Ok(v) = f(&m) {
            if v.lo() > best.attained {
                best.attained = v.lo();
                best.at = (m.sigma.lo(), m.t.lo());
            }
        }
    };
    let upper_of = |r: &Region| -> Result<f64, String> { f(r).map(|v| v.hi()) };
    let mut heap = BinaryHeap::new();
    let first = match upper_of(&region) {
        Ok(u) => u,
        Err(_) => f64::INFINITY,
    };
    probe(&region, &mut best);
    heap.push(Node { upper: first, region });
    let mut boxes = 1u64;
    while let Some(top) = heap.peek() {
        let gap_ok = top.upper - best.attained <= tol.abs + tol.rel * best.attained.abs();
        if gap_ok {
            best.converged = true;
            break;
        }
        if boxes >= budget {
            break;
        }
        let node = heap.pop().expect("peeked");
        let r = node.region;
        let rw = (r.sigma.width() / scale.0).max(r.t.width() / scale.1);
        if rw < MIN_REL {
            if !node.upper.is_finite() {
                return Err(VerifyError::Evaluation {
                    sigma: r.sigma.to_string(),
                    t: r.t.to_string(),
                    message: f(&r).err().unwrap_or_else(|| "unbounded".into()),
                });
            }
            // cannot refine further; keep the box as is
            heap.push(node);
            break;
        }
        let (a, b) = r.split(scale);
        for c in [a, b] {
            boxes += 1;
            let u = upper_of(&c).unwrap_or(f64::INFINITY);
            probe(&c, &mut best);
            heap.push(Node { upper: u.min(node.upper), region: c });
        }
    }
    best.bound = heap.peek().map_or(best.attained, |n| n.upper);
    best.boxes = boxes;
    Ok(best)
}

/// Certified lower bound for `inf f` over `region`.
pub fn minimize<F>(f: F, region: Region, tol: Tolerance, budget: u64) -> Result<Extremum, VerifyError>
where
    F: Fn(&Region) -> Result<RealInterval, String>,
{
    let e = maximize(|r| f(r).map(|v| -v), region, tol, budget)?;
    Ok(Extremum { bound: -e.bound, attained: -e.attained, ..e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::{GTarget, ZetaKind, ZetaTarget};
    use crate::gfun::{GExpr, Sign};
    use crate::interval::Scalar;

    #[test]
    fn maximize_parabola() {
        let region = Region::new((-1.0, 2.0), (0.0, 1.0)).unwrap();
        let f = |r: &Region| Ok(RealInterval::one() - r.sigma.sqr() - r.t.sqr());
        let e = maximize(f, region, Tolerance { abs: 1e-9, rel: 0.0 }, 100_000).unwrap();
        assert!(e.converged);
        assert!(e.bound >= 1.0 && e.bound < 1.0 + 1e-8);
        let m = minimize(f, region, Tolerance { abs: 1e-9, rel: 0.0 }, 100_000).unwrap();
        assert!(m.bound <= -4.0 && m.bound > -4.0 - 1e-8);
    }

    #[test]
    fn sup_of_linear() {
        let g = GExpr::affine(Scalar::int(1), Sign::Plus);
        let t = GTarget { expr: &g };
        let region = Region::new((1.0, 2.0), (0.0, 3.0)).unwrap();
        let v = verify_sup(&t, region, Mode::FullRegion, 4.25, &Config::default()).unwrap();
        assert!(v.is_verified(), "{v:?}");
        let v = verify_sup(&t, region, Mode::BoundaryOnly, 4.2, &Config::default()).unwrap();
        let c = v.counter().expect("|3+3i| > 4.2");
        assert!(c.value.lo() > 4.2);
    }

    #[test]
    fn f_zeta_refuted_below_one() {
        let region = Region::new((1.0, 2.0), (0.0, 3.0)).unwrap();
        let z = ZetaTarget::new(ZetaKind::F);
        let v = verify_sup(&z, region, Mode::BoundaryOnly, 0.9, &Config::default()).unwrap();
        let c = v.counter().unwrap();
        assert!(c.value.lo() > 0.9);
    }

    #[test]
    fn inf_counter_at_zero() {
        let g = GExpr::affine(Scalar::parse("-1.5").unwrap(), Sign::Plus);
        let t = GTarget { expr: &g };
        let region = Region::new((1.0, 2.0), (0.0, 10.0)).unwrap();
        let v = verify_inf(&t, region, 0.0, &Config::default()).unwrap();
        let c = v.counter().unwrap();
        assert_eq!(c.value, RealInterval::zero());
        assert_eq!((c.sigma.lo(), c.t.lo()), (1.5, 0.0));
    }
}
