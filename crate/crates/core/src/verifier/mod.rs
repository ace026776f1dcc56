//! Adaptive verification of bounds, monotonicity and nonvanishing over
//! regions of a vertical strip.
//!
//! All checks run on `t ≥ 0`. Every comparison function is a tree with real
//! coefficients and so satisfies `G(s̄) = conj(G(s))`; the same reflection is
//! recorded as an attestation for the target `f`.

mod engine;
mod envelope;
mod monotone;
mod small_t;
mod sup;
mod target;

pub use engine::Region;
pub use envelope::{
    comparison_excess, tail_envelope_eval, EnvelopeKind, ExponentLaw, RatioExpr, RatioFactor, RatioTerm, TailEnvelope,
    UBox,
};
pub(crate) use envelope::sup_excess;
pub use monotone::{monotone_tail_lemma, verify_monotone_sigma, Direction, MonotoneCheck, TailLemma};
pub use small_t::{verify_nonvanishing, verify_small_t, SmallTFactor};
pub use sup::{maximize, minimize, verify_inf, verify_sup, Extremum, Tolerance};
pub use target::{FnTarget, GTarget, Target, ZetaKind, ZetaTarget};

use std::io::Write;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::interval::RealInterval;

/// Default cap on the number of boxes examined by one check.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("evaluation failed on σ ∈ {sigma}, t ∈ {t}: {message}")]
    Evaluation { sigma: String, t: String, message: String },
    #[error("no tail lemma for {0}; supply a finite T_max to obtain a conditional fact")]
    NoTailLemma(String),
    #[error("not certifiable: {0}")]
    NotCertifiable(String),
    #[error("invalid region or parameters: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FullRegion,
    BoundaryOnly,
}

/// A sub-box on which a claimed inequality is certified to fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterBox {
    pub sigma: RealInterval,
    pub t: RealInterval,
    /// Enclosure of the checked quantity on the box.
    pub value: RealInterval,
    pub bound: f64,
    pub note: String,
}

/// Machine-checked statement. Serialized as the identity of a fact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "snake_case")]
pub enum Claim {
    /// `sup |target| ≤ bound` over the region (or its boundary).
    Sup { target: String, region: Region, mode: Mode, bound: f64 },
    /// `inf |target| ≥ bound` over the region.
    Inf { target: String, region: Region, bound: f64 },
    /// `|G(σ+it)|` monotone in `σ ∈ [a, b]` for `t ≥ t0` (up to `t_max` when
    /// the tail is not covered by a lemma).
    Monotone { expr: String, a: f64, b: f64, direction: Direction, t0: f64, t_cap: f64, t_max: Option<f64>, tail: TailLemma },
    /// `inf |G| > 0` on the strip `[a, b] × [0, ∞)`.
    Nonvanishing { expr: String, a: f64, b: f64, t_cap: f64, min_abs: f64, tail: String },
    /// `|f| ≤ Π m_i^{e_i(σ)}` on `[a, b] × [0, t0]`.
    SmallT { target: String, factors: Vec<String>, a: f64, b: f64, t0: f64, slices: usize },
    /// A ratio expression is `≥ 1` on `σ = sigma`, `t ≥ t_from`.
    Comparison { ratio: String, sigma: f64, t_from: f64, min_excess: f64 },
    /// A ratio expression is at most `1 + excess` on the strip for `t ≥ t0`.
    Constant { ratio: String, a: f64, b: f64, t0: f64, t_cap: f64, excess: f64, finite_part: f64, tail_part: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub id: String,
    #[serde(flatten)]
    pub claim: Claim,
    pub boxes: u64,
    /// Certified slack of the inequality, in the units of the claim.
    pub margin: f64,
    /// Why the fact is only conditional, if it is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
}

impl Fact {
    pub fn new(claim: Claim, boxes: u64, margin: f64) -> Self {
        let id = content_id(&claim);
        Self { id, claim, boxes, margin, condition: None }
    }

    pub fn conditional(mut self, why: impl Into<String>) -> Self {
        self.condition = Some(why.into());
        self
    }

    pub fn is_conditional(&self) -> bool {
        self.condition.is_some()
    }
}

/// First 16 bytes of the SHA-256 of the canonical JSON, in hex.
pub fn content_id<T: Serialize>(x: &T) -> String {
    let bytes = serde_json::to_vec(x).expect("serializable");
    let d = Sha256::digest(&bytes);
    d[..16].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Verified { fact: Fact },
    Conditional { fact: Fact },
    Refuted { counter: CounterBox, boxes: u64 },
    Exhausted { boxes: u64, detail: String },
}

impl Verdict {
    pub fn fact(&self) -> Option<&Fact> {
        match self {
            Verdict::Verified { fact } | Verdict::Conditional { fact } => Some(fact),
            _ => None,
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }

    pub fn counter(&self) -> Option<&CounterBox> {
        match self {
            Verdict::Refuted { counter, .. } => Some(counter),
            _ => None,
        }
    }

    pub fn boxes(&self) -> u64 {
        match self {
            Verdict::Verified { fact } | Verdict::Conditional { fact } => fact.boxes,
            Verdict::Refuted { boxes, .. } | Verdict::Exhausted { boxes, .. } => *boxes,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Verified { .. } => "verified",
            Verdict::Conditional { .. } => "conditional",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Exhausted { .. } => "exhausted",
        }
    }
}

/// Line-delimited JSON progress stream. Cloning shares the writer.
#[derive(Clone, Default)]
pub struct Events(Option<Arc<Mutex<Box<dyn Write + Send>>>>);

impl Events {
    pub fn none() -> Self {
        Self(None)
    }

    pub fn to_writer(w: Box<dyn Write + Send>) -> Self {
        Self(Some(Arc::new(Mutex::new(w))))
    }

    pub fn enabled(&self) -> bool {
        self.0.is_some()
    }

    pub fn emit(&self, event: &str, data: serde_json::Value) {
        if let Some(w) = &self.0 {
            let line = serde_json::json!({ "event": event, "data": data });
            let mut g = w.lock().unwrap_or_else(|p| p.into_inner());
            // a broken event pipe must not abort a verification
            let _ = writeln!(g, "{line}");
            let _ = g.flush();
        }
    }
}

impl std::fmt::Debug for Events {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Events({})", if self.enabled() { "on" } else { "off" })
    }
}

/// Settings shared by all checks.
#[derive(Debug, Clone)]
pub struct Config {
    pub budget: u64,
    /// Overrides the default `T_cap = max(100, 10·(Q₁+Q₂))`.
    pub t_cap: Option<f64>,
    pub events: Events,
}

impl Default for Config {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, t_cap: None, events: Events::none() }
    }
}

impl Config {
    pub fn with_budget(budget: u64) -> Self {
        Self { budget, ..Self::default() }
    }
}

/// `T_cap = max(100, 10·(Q₁+Q₂))`, or `max(100, 10·|Q|)` for one parameter.
pub fn default_t_cap(params: &[RealInterval]) -> f64 {
    let s: f64 = params.iter().map(|q| q.mag()).sum();
    (10.0 * s).max(100.0).ceil()
}
