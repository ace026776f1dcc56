//! Job specifications: the JSON input of the command-line front end.
//!
//! A spec is checked completely before any computation starts. Errors carry
//! a JSON pointer to the offending field.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gfun::{build_catalog, GExpr, ParseError};
use crate::interval::Scalar;
use crate::theorem::{
    Attestation, BoundaryPiece, FTarget, Factor, FactorSource, GrowthAttestation, RatioSpec, StripHypotheses,
    TheoremError,
};
use crate::verifier::Mode;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pointer}: {message}")]
pub struct SchemaError {
    /// JSON pointer, `""` for the document root.
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self { pointer: pointer.into(), message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("schema error at {0}")]
    Schema(#[from] SchemaError),
    #[error("parse error at {pointer}: {source}")]
    Parse { pointer: String, source: ParseError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    Certify,
    Constant,
    Table,
    ReproduceExample1,
    ReproduceExample2,
    ReproduceExample3,
    Zeta,
    VerifyRegion,
}

impl fmt::Display for JobKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("unit variant");
        f.write_str(v.as_str().unwrap_or("?"))
    }
}

/// One comparison function together with its exponents on the two lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GSpec {
    pub label: String,
    pub source: FactorSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_growth: Option<Attestation>,
}

/// The hypothesis package with the exponents given as two parallel lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesesSpec {
    pub a: Scalar,
    pub b: Scalar,
    pub f: FTarget,
    pub g: Vec<GSpec>,
    pub alpha: Vec<Scalar>,
    pub beta: Vec<Scalar>,
    #[serde(default)]
    pub t0: f64,
    pub growth: GrowthAttestation,
    pub boundary_a: Vec<BoundaryPiece>,
    pub boundary_b: Vec<BoundaryPiece>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attestations: Vec<Attestation>,
}

impl HypothesesSpec {
    pub fn from_hypotheses(h: &StripHypotheses) -> Self {
        Self {
            a: h.a.clone(),
            b: h.b.clone(),
            f: h.f.clone(),
            g: h
                .factors
                .iter()
                .map(|f| GSpec {
                    label: f.label.clone(),
                    source: f.source.clone(),
                    t_max: f.t_max,
                    upper_growth: f.upper_growth.clone(),
                })
                .collect(),
            alpha: h.factors.iter().map(|f| f.alpha.clone()).collect(),
            beta: h.factors.iter().map(|f| f.beta.clone()).collect(),
            t0: h.t0,
            growth: h.growth.clone(),
            boundary_a: h.boundary_a.clone(),
            boundary_b: h.boundary_b.clone(),
            attestations: h.attestations.clone(),
        }
    }

    /// Checks the package and assembles [`StripHypotheses`]. `at` is the
    /// pointer of this object inside the document.
    pub fn to_hypotheses(&self, at: &str) -> Result<StripHypotheses, JobError> {
        let n = self.g.len();
        if n == 0 {
            return Err(SchemaError::new(format!("{at}/g"), "at least one comparison function is required").into());
        }
        for (name, v) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            if v.len() != n {
                let msg = format!("{name} has {} entries but g has {n}", v.len());
                return Err(SchemaError::new(format!("{at}/{name}"), msg).into());
            }
        }
        if let FTarget::Expr { expr } = &self.f {
            GExpr::parse(expr).map_err(|source| JobError::Parse { pointer: format!("{at}/f/expr"), source })?;
        }
        for (i, g) in self.g.iter().enumerate() {
            match &g.source {
                FactorSource::Catalog { name, params } => {
                    build_catalog(name, params, Some((&self.a, &self.b)))
                        .map_err(|e| SchemaError::new(format!("{at}/g/{i}/source"), e.to_string()))?;
                }
                FactorSource::Expr { expr } => {
                    let e = GExpr::parse(expr)
                        .map_err(|source| JobError::Parse { pointer: format!("{at}/g/{i}/source/expr"), source })?;
                    e.check_size().map_err(|e| SchemaError::new(format!("{at}/g/{i}/source/expr"), e.to_string()))?;
                }
            }
        }
        let h = StripHypotheses {
            a: self.a.clone(),
            b: self.b.clone(),
            f: self.f.clone(),
            factors: self
                .g
                .iter()
                .zip(self.alpha.iter().zip(&self.beta))
                .map(|(g, (alpha, beta))| Factor {
                    label: g.label.clone(),
                    source: g.source.clone(),
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                    t_max: g.t_max,
                    upper_growth: g.upper_growth.clone(),
                })
                .collect(),
            t0: self.t0,
            growth: self.growth.clone(),
            boundary_a: self.boundary_a.clone(),
            boundary_b: self.boundary_b.clone(),
            shift: vec![],
            attestations: self.attestations.clone(),
        };
        if let Err(TheoremError::InvalidHypotheses(m)) = h.check_growth() {
            return Err(SchemaError::new(format!("{at}/growth/c3"), m).into());
        }
        h.validate().map_err(|e| SchemaError::new(at, e.to_string()))?;
        Ok(h)
    }
}

/// `σ + it` for the `zeta` job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub sigma: Scalar,
    pub t: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub target: FTarget,
    pub sigma: [Scalar; 2],
    pub t: [Scalar; 2],
    pub bound: f64,
    #[serde(default = "full_region")]
    pub mode: Mode,
}

fn full_region() -> Mode {
    Mode::FullRegion
}

/// Grid of the CSV bound curve: `sigma_points` equispaced values of `σ` in
/// `[a, b]` for each `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default = "default_sigma_points")]
    pub sigma_points: usize,
    pub t: Vec<f64>,
}

fn default_sigma_points() -> usize {
    11
}

impl Default for CurveSpec {
    fn default() -> Self {
        Self { sigma_points: default_sigma_points(), t: vec![10.0, 100.0, 1e3, 1e4, 1e5] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<PathBuf>,
}

impl OutputSpec {
    fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub kind: JobKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<HypothesesSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eta: Vec<Scalar>,
    /// Parameters `Q₁, Q₂` of the second example's comparison function.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q: Vec<Scalar>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_cap: Option<f64>,
    #[serde(default, skip_serializing_if = "OutputSpec::is_empty")]
    pub output: OutputSpec,
}

impl JobSpec {
    pub fn new(kind: JobKind) -> Self {
        Self {
            kind,
            hypotheses: None,
            ratio: None,
            t0: vec![],
            eta: vec![],
            q: vec![],
            points: vec![],
            region: None,
            curve: None,
            budget: None,
            t_cap: None,
            output: OutputSpec::default(),
        }
    }

    /// Checks that depend on the job kind and on values, after the shape of
    /// the document has been accepted.
    pub fn check(&self) -> Result<(), JobError> {
        let missing = |field: &str| SchemaError::new(format!("/{field}"), format!("required for kind {}", self.kind));
        if let Some(h) = &self.hypotheses {
            h.to_hypotheses("/hypotheses")?;
        }
        for (i, t) in self.t0.iter().enumerate() {
            if !(t.is_finite() && *t >= 0.0) {
                return Err(SchemaError::new(format!("/t0/{i}"), "must be finite and nonnegative").into());
            }
        }
        if self.budget == Some(0) {
            return Err(SchemaError::new("/budget", "must be positive").into());
        }
        if let Some(c) = self.t_cap {
            if !(c.is_finite() && c > 0.0) {
                return Err(SchemaError::new("/t_cap", "must be finite and positive").into());
            }
        }
        if let Some(c) = &self.curve {
            if c.sigma_points < 2 {
                return Err(SchemaError::new("/curve/sigma_points", "at least 2 points").into());
            }
        }
        for (i, e) in self.eta.iter().enumerate() {
            let iv = e.iv();
            if !(iv.lo() > 1.0 && iv.hi() <= 2.0) {
                return Err(SchemaError::new(format!("/eta/{i}"), "η must lie in (1, 2]").into());
            }
        }
        if !self.q.is_empty() && self.q.len() != 2 {
            return Err(SchemaError::new("/q", "expected two parameters Q1, Q2").into());
        }
        match self.kind {
            JobKind::Certify => {
                self.hypotheses.as_ref().ok_or_else(|| missing("hypotheses"))?;
            }
            JobKind::Constant => {
                self.hypotheses.as_ref().ok_or_else(|| missing("hypotheses"))?;
                self.ratio.as_ref().ok_or_else(|| missing("ratio"))?;
                if self.t0.is_empty() {
                    return Err(missing("t0").into());
                }
            }
            JobKind::Zeta => {
                if self.points.is_empty() {
                    return Err(missing("points").into());
                }
            }
            JobKind::VerifyRegion => {
                let r = self.region.as_ref().ok_or_else(|| missing("region"))?;
                for (name, [lo, hi]) in [("sigma", &r.sigma), ("t", &r.t)] {
                    if lo.iv().lo() > hi.iv().hi() {
                        return Err(SchemaError::new(format!("/region/{name}"), "empty range").into());
                    }
                }
                if !(r.bound.is_finite() && r.bound > 0.0) {
                    return Err(SchemaError::new("/region/bound", "must be finite and positive").into());
                }
            }
            JobKind::Table | JobKind::ReproduceExample1 | JobKind::ReproduceExample2 | JobKind::ReproduceExample3 => {}
        }
        Ok(())
    }

    /// The validated hypothesis package, if the job has one.
    pub fn strip_hypotheses(&self) -> Result<Option<StripHypotheses>, JobError> {
        self.hypotheses.as_ref().map(|h| h.to_hypotheses("/hypotheses")).transpose()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

pub fn parse_jobspec(text: &str) -> Result<JobSpec, JobError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: JobSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        SchemaError::new(pointer, e.into_inner().to_string())
    })?;
    spec.check()?;
    Ok(spec)
}

pub fn load_jobspec(path: &Path) -> Result<JobSpec, JobError> {
    let text = std::fs::read_to_string(path).map_err(|source| JobError::Read { path: path.to_path_buf(), source })?;
    parse_jobspec(&text)
}
