//! Report rows, CSV bound curves and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::interval::{RealInterval, Scalar};
use crate::job::CurveSpec;
use crate::theorem::{bound_at, Certificate, ConstantBound, TheoremError};

/// One line of a constants table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    /// Certified upper bound, `1 + excess` rounded up.
    pub upper: String,
    pub upper_excess: f64,
    /// Certified lower bound of the constant.
    pub lower: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_excess: Option<f64>,
    pub pass: bool,
    /// A failing row that was only attempted is inconclusive, not failed.
    pub required: bool,
    pub wall_time_s: f64,
    pub boxes: u64,
}

fn one_plus(x: f64) -> String {
    format!("1 + {x:.4e}")
}

/// Smallest four-digit decimal `≥ x`, so the printed bound stays an upper bound.
fn up4(x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return x;
    }
    let p = 10f64.powi(x.log10().floor() as i32 - 4);
    let mut y = (x / p).ceil() * p;
    while y < x {
        y += p;
    }
    let text: f64 = format!("{y:.4e}").parse().expect("decimal");
    if text < x {
        y + p
    } else {
        text
    }
}

impl ReportRow {
    pub fn new(label: String, c: &ConstantBound, target_excess: Option<f64>, required: bool, wall_time_s: f64) -> Self {
        let e = c.excess_upper();
        let shown = up4(e);
        Self {
            label,
            upper: one_plus(shown),
            upper_excess: e,
            lower: c.value.lo(),
            target: target_excess.map(|t| format!("1 + {t:e}")),
            target_excess,
            pass: target_excess.map_or(true, |t| e <= t),
            required,
            wall_time_s,
            boxes: c.boxes,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match (self.pass, self.required) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INCONCLUSIVE",
        }
    }

    pub fn line(&self) -> String {
        let target = self.target.as_deref().map(|t| format!(" ≤ {t}")).unwrap_or_default();
        let mut s = format!(
            "{:<14} {}{}  {}  ({:.2} s, {} boxes)",
            self.label,
            self.upper,
            target,
            self.verdict(),
            self.wall_time_s,
            self.boxes
        );
        if let (false, false, Some(t)) = (self.pass, self.required, self.target_excess) {
            s.push_str(&format!(", margin {:+.3e}", t - self.upper_excess));
        }
        s
    }
}

/// `t` written as a power of ten when it is one.
pub fn height_label(t: f64) -> String {
    let k = t.log10().round();
    if k >= 2.0 && 10f64.powi(k as i32) == t {
        format!("10^{k}")
    } else {
        format!("{t}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub sigma: f64,
    pub t: f64,
    pub bound_upper: f64,
}

/// Upper enclosure of the certified bound on an equispaced grid of `σ`.
pub fn bound_curve(c: &Certificate, spec: &CurveSpec) -> Result<Vec<CurvePoint>, TheoremError> {
    let (a, b) = (&c.hypotheses.a, &c.hypotheses.b);
    let n = spec.sigma_points.max(2) as i64;
    let step = b.sub(a).div(&Scalar::int(n - 1)).expect("n > 1");
    let mut out = Vec::with_capacity(spec.t.len() * n as usize);
    for &t in &spec.t {
        for k in 0..n {
            let s = a.add(&step.mul(&Scalar::int(k)));
            let sigma = s.iv();
            let v = bound_at(c, sigma, RealInterval::point(t))?;
            out.push(CurvePoint { sigma: sigma.mid(), t, bound_upper: v.hi() });
        }
    }
    Ok(out)
}

pub fn curve_csv(points: &[CurvePoint]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p).expect("in-memory CSV");
    }
    w.into_inner().expect("in-memory CSV")
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}
