//! Parallel depth-first box exploration shared by the threshold checks.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CounterBox, VerifyError};
use crate::interval::{ComplexRect, RealInterval};

/// Axis-aligned box `σ × t` in the upper half of a strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub sigma: RealInterval,
    pub t: RealInterval,
}

impl Region {
    pub fn new(sigma: (f64, f64), t: (f64, f64)) -> Result<Self, VerifyError> {
        let s = RealInterval::new(sigma.0, sigma.1).map_err(|e| VerifyError::Domain(e.to_string()))?;
        let t = RealInterval::new(t.0, t.1).map_err(|e| VerifyError::Domain(e.to_string()))?;
        let r = Self { sigma: s, t };
        if !r.sigma.is_finite() || !r.t.is_finite() {
            return Err(VerifyError::Domain("region must be bounded".into()));
        }
        Ok(r)
    }

    pub fn from_intervals(sigma: RealInterval, t: RealInterval) -> Self {
        Self { sigma, t }
    }

    pub fn rect(&self) -> ComplexRect {
        ComplexRect::new(self.sigma, self.t)
    }

    pub fn is_point(&self) -> bool {
        self.sigma.is_point() && self.t.is_point()
    }

    /// The four edges as degenerate regions.
    pub fn edges(&self) -> Vec<Region> {
        let (s, t) = (self.sigma, self.t);
        let p = RealInterval::point;
        vec![
            Region { sigma: p(s.lo()), t },
            Region { sigma: p(s.hi()), t },
            Region { sigma: s, t: p(t.lo()) },
            Region { sigma: s, t: p(t.hi()) },
        ]
    }

    pub fn midpoint(&self) -> Region {
        Region { sigma: RealInterval::point(self.sigma.mid()), t: RealInterval::point(self.t.mid()) }
    }

    pub fn corners(&self) -> [Region; 4] {
        let p = RealInterval::point;
        let (s, t) = (self.sigma, self.t);
        [
            Region { sigma: p(s.lo()), t: p(t.lo()) },
            Region { sigma: p(s.hi()), t: p(t.lo()) },
            Region { sigma: p(s.lo()), t: p(t.hi()) },
            Region { sigma: p(s.hi()), t: p(t.hi()) },
        ]
    }

    /// Widths relative to a reference scale.
    fn rel_widths(&self, scale: (f64, f64)) -> (f64, f64) {
        let n = |w: f64, s: f64| if s > 0.0 { w / s } else { 0.0 };
        (n(self.sigma.width(), scale.0), n(self.t.width(), scale.1))
    }

    /// Bisect the relatively wider axis.
    pub fn split(&self, scale: (f64, f64)) -> (Region, Region) {
        let (ws, wt) = self.rel_widths(scale);
        if ws >= wt {
            let (a, b) = self.sigma.bisect();
            (Region { sigma: a, ..*self }, Region { sigma: b, ..*self })
        } else {
            let (a, b) = self.t.bisect();
            (Region { t: a, ..*self }, Region { t: b, ..*self })
        }
    }

    /// Reference widths for splitting. An axis only a few ulps wide (an
    /// outward-rounded line such as `σ = 5/7`) gets scale 1 and is never split.
    pub fn scale(&self) -> (f64, f64) {
        let w = |x: RealInterval| if x.width() > 1e-12 * (1.0 + x.mag()) { x.width() } else { 1.0 };
        (w(self.sigma), w(self.t))
    }

    pub fn to_counter(&self, value: RealInterval, bound: f64, note: impl Into<String>) -> CounterBox {
        CounterBox { sigma: self.sigma, t: self.t, value, bound, note: note.into() }
    }
}

pub(crate) enum Judgement {
    /// Box certified; the value is the achieved bound used for the margin.
    Accept(f64),
    Reject(CounterBox),
    Split,
    Fail(String),
}

#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub boxes: u64,
    pub counter: Option<CounterBox>,
    pub exhausted: bool,
    pub unresolved: Option<Region>,
    pub error: Option<VerifyError>,
    pub max_accepted: f64,
    pub min_accepted: f64,
}

/// Relative width below which a box is not split further.
const MIN_REL_WIDTH: f64 = 1e-13;

struct Shared {
    count: AtomicU64,
    stop: AtomicBool,
    budget: u64,
}

fn run_piece<J>(root: Region, scale: (f64, f64), sh: &Shared, judge: &J) -> Outcome
where
    J: Fn(&Region) -> Judgement + Sync,
{
    let mut out = Outcome { max_accepted: f64::NEG_INFINITY, min_accepted: f64::INFINITY, ..Default::default() };
    let mut stack = vec![root];
    while let Some(r) = stack.pop() {
        if sh.stop.load(Ordering::Relaxed) {
            break;
        }
        if sh.count.fetch_add(1, Ordering::Relaxed) >= sh.budget {
            out.exhausted = true;
            sh.stop.store(true, Ordering::Relaxed);
            break;
        }
        out.boxes += 1;
        match judge(&r) {
            Judgement::Accept(v) => {
                out.max_accepted = out.max_accepted.max(v);
                out.min_accepted = out.min_accepted.min(v);
            }
            Judgement::Reject(c) => {
                out.counter = Some(c);
                sh.stop.store(true, Ordering::Relaxed);
                break;
            }
            other => {
                let (ws, wt) = r.rel_widths(scale);
                if ws.max(wt) < MIN_REL_WIDTH {
                    match other {
                        Judgement::Fail(m) => {
                            out.error = Some(VerifyError::Evaluation { sigma: r.sigma.to_string(), t: r.t.to_string(), message: m });
                            sh.stop.store(true, Ordering::Relaxed);
                            break;
                        }
                        // keep going: a genuine counterexample elsewhere takes precedence
                        _ => out.unresolved = out.unresolved.or(Some(r)),
                    }
                    continue;
                }
                let (a, b) = r.split(scale);
                stack.push(b);
                stack.push(a);
            }
        }
    }
    out
}

/// Explore `pieces` until every box is accepted, a counterexample is found,
/// or the budget runs out.
pub(crate) fn explore<J>(pieces: Vec<Region>, budget: u64, judge: J) -> Outcome
where
    J: Fn(&Region) -> Judgement + Sync,
{
    let sh = Shared { count: AtomicU64::new(0), stop: AtomicBool::new(false), budget };
    // pre-split for parallelism
    let mut work: Vec<(Region, (f64, f64))> = Vec::new();
    for p in pieces {
        let scale = p.scale();
        if p.is_point() {
            work.push((p, scale));
            continue;
        }
        let mut q = vec![p];
        for _ in 0..4 {
            q = q.into_iter().flat_map(|r| { let (a, b) = r.split(scale); [a, b] }).collect();
        }
        work.extend(q.into_iter().map(|r| (r, scale)));
    }
    let outs: Vec<Outcome> = work.into_par_iter().map(|(r, sc)| run_piece(r, sc, &sh, &judge)).collect();
    let mut total = Outcome { max_accepted: f64::NEG_INFINITY, min_accepted: f64::INFINITY, ..Default::default() };
    for o in outs {
        total.boxes += o.boxes;
        total.exhausted |= o.exhausted;
        total.max_accepted = total.max_accepted.max(o.max_accepted);
        total.min_accepted = total.min_accepted.min(o.min_accepted);
        if total.counter.is_none() {
            total.counter = o.counter;
        }
        if total.error.is_none() {
            total.error = o.error;
        }
        if total.unresolved.is_none() {
            total.unresolved = o.unresolved;
        }
    }
    total
}
