//! Dispatch of the verifier checks required by a hypothesis package and
//! assembly of the certificate.

use std::cmp::Ordering;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::conclusion::{formula, original_exponents, pow_abs, BoundFormula};
use super::{normalize_exponents, Attestation, BoundaryPiece, FTarget, LiteratureBound, StripHypotheses, TheoremError};
use crate::gfun::{Family, GExpr};
use crate::interval::{ComplexRect, RealInterval, Scalar};
use crate::verifier::{
    comparison_excess, verify_monotone_sigma, verify_nonvanishing, verify_small_t, verify_sup, Claim, Config, CounterBox,
    Direction, ExponentLaw, Fact, Mode, MonotoneCheck, RatioExpr, RatioFactor, RatioTerm, Region, SmallTFactor, Target,
    Verdict, VerifyError, ZetaKind, ZetaTarget,
};

pub const SCHEMA: &str = "plc-1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    Conditional,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refutation {
    pub check: String,
    pub counter: CounterBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Toolchain {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Toolchain {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub status: Status,
    /// Normalized hypotheses; `shift` records the exponent shift per factor.
    pub hypotheses: StripHypotheses,
    /// Sorted by identifier.
    pub facts: Vec<Fact>,
    pub refutations: Vec<Refutation>,
    /// Checks that could not be decided, and missing hypotheses.
    pub issues: Vec<String>,
    pub attestations: Vec<Attestation>,
    pub conclusion: BoundFormula,
    pub toolchain: Toolchain,
}

impl Certificate {
    pub fn fact(&self, pred: impl Fn(&Claim) -> bool) -> Option<&Fact> {
        self.facts.iter().find(|f| pred(&f.claim))
    }
}

enum Base {
    Zeta(ZetaTarget),
    Expr(GExpr),
}

/// `|f(s)|·Π|G_i(s)|^{w_i}`.
struct Weighted<'a> {
    name: String,
    base: &'a Base,
    weights: Vec<(&'a GExpr, RealInterval)>,
}

impl Target for Weighted<'_> {
    fn describe(&self) -> String {
        self.name.clone()
    }

    fn abs_enclosure(&self, s: &ComplexRect) -> Result<RealInterval, String> {
        let mut v = match self.base {
            Base::Zeta(z) => z.abs_enclosure(s)?,
            Base::Expr(g) => g.abs_eval(s).map_err(|e| e.to_string())?,
        };
        for (g, w) in &self.weights {
            let m = g.abs_eval(s).map_err(|e| e.to_string())?;
            match pow_abs(m, *w) {
                Some(p) => v = v * p,
                // |G| may vanish on the box; only refinement can help
                None => return Ok(RealInterval::raw(0.0, f64::MAX)),
            }
        }
        Ok(v)
    }

    fn lemma_upper(&self, s: &ComplexRect) -> Option<f64> {
        match self.base {
            Base::Zeta(z) if self.weights.is_empty() => z.lemma_upper(s),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    B,
}

impl Side {
    fn name(self) -> &'static str {
        match self {
            Side::A => "a",
            Side::B => "b",
        }
    }
}

enum Job<'a> {
    Nonvanishing(usize),
    Monotone(usize, Direction),
    SmallT,
    Numeric(Side, f64, f64),
    Literature(Side, &'a LiteratureBound, f64),
}

enum Outcome {
    Checked(String, Result<Verdict, VerifyError>),
    Issue(String),
}

struct Ctx<'a> {
    h: &'a StripHypotheses,
    exprs: &'a [GExpr],
    families: &'a [Family],
    base: &'a Base,
    cfg: &'a Config,
}

impl Ctx<'_> {
    fn sigma(&self, side: Side) -> &Scalar {
        match side {
            Side::A => &self.h.a,
            Side::B => &self.h.b,
        }
    }

    fn endpoint_exponent(&self, side: Side, i: usize) -> Scalar {
        let (alpha, beta) = original_exponents(self.h, i);
        match side {
            Side::A => alpha,
            Side::B => beta,
        }
    }

    fn shifted_target(&self, name: String, extra: impl Fn(usize) -> Option<RealInterval>) -> Weighted<'_> {
        let mut weights = Vec::new();
        for (i, g) in self.exprs.iter().enumerate() {
            let mut w = self.h.shift_of(i).neg().iv();
            if let Some(x) = extra(i) {
                w = w + x;
            }
            if w != RealInterval::zero() {
                weights.push((g, w));
            }
        }
        Weighted { name, base: self.base, weights }
    }

    fn run(&self, job: &Job<'_>) -> Outcome {
        let h = self.h;
        match job {
            Job::Nonvanishing(i) => {
                let label = format!("nonvanishing {}", h.factors[*i].label);
                Outcome::Checked(label, verify_nonvanishing(&self.exprs[*i], &self.families[*i], &h.a, &h.b, self.cfg))
            }
            Job::Monotone(i, direction) => {
                let f = &h.factors[*i];
                let label = format!("monotone {} {:?}", f.label, direction).to_lowercase();
                let chk = MonotoneCheck {
                    expr: &self.exprs[*i],
                    family: &self.families[*i],
                    a: &h.a,
                    b: &h.b,
                    direction: *direction,
                    t0: h.t0,
                    t_max: f.t_max,
                };
                Outcome::Checked(label, verify_monotone_sigma(&chk, self.cfg))
            }
            Job::SmallT => {
                let target = self.shifted_target(h.f.describe(), |_| None);
                let factors: Vec<SmallTFactor> = h
                    .factors
                    .iter()
                    .zip(self.exprs)
                    .map(|(f, g)| SmallTFactor {
                        label: f.label.clone(),
                        expr: g.clone(),
                        law: ExponentLaw { at_a: f.alpha.clone(), at_b: f.beta.clone() },
                    })
                    .collect();
                Outcome::Checked("small t".into(), verify_small_t(&target, &factors, &h.a, &h.b, h.t0, self.cfg))
            }
            Job::Numeric(side, t_lo, t_hi) => {
                let label = format!("boundary {} on [{t_lo}, {t_hi}]", side.name());
                let sigma = self.sigma(*side).iv();
                let name = format!("{} / boundary product at σ = {}", h.f.describe(), self.sigma(*side));
                // |f|·Π|G_i|^{−shift_i}·Π|G_i|^{−e_i} with e_i the normalized endpoint exponent
                let target = self.shifted_target(name, |i| {
                    let f = &h.factors[i];
                    Some(-if *side == Side::A { f.alpha.iv() } else { f.beta.iv() })
                });
                let region = match Region::new((sigma.lo(), sigma.hi()), (*t_lo, *t_hi)) {
                    Ok(r) => r,
                    Err(e) => return Outcome::Checked(label, Err(e)),
                };
                Outcome::Checked(label, verify_sup(&target, region, Mode::FullRegion, 1.0, self.cfg))
            }
            Job::Literature(side, bound, t_from) => self.literature(*side, bound, *t_from),
        }
    }

    /// `A·t^κ·L(t) ≤ Π|G_i(σ+it)|^{e_i}` on `σ ∈ {a, b}` for `t ≥ t_from`:
    /// constants are compared exactly, linear factors dominate powers of
    /// `t`, and one `SymLog` factor with exponent 1 dominates `L`.
    fn literature(&self, side: Side, bound: &LiteratureBound, t_from: f64) -> Outcome {
        let h = self.h;
        let sigma = self.sigma(side);
        let label = format!("boundary {} literature comparison", side.name());
        let t_from = t_from.max(h.t0);
        let issue = |why: String| Outcome::Issue(format!("{label}: {why}"));
        match h.f {
            FTarget::Zeta => {}
            FTarget::FZeta => {
                // |(s−1)/s| ≤ 1 needs σ ≥ 1/2
                if h.a.sub(&Scalar::ratio(1, 2)).sign().is_none_or(|o| o == Ordering::Less) {
                    return issue("a bound for ζ transfers to f_zeta only for σ ≥ 1/2".into());
                }
            }
            FTarget::Expr { .. } => return issue("literature bounds apply to ζ only".into()),
        }
        if !h.shift.is_empty() {
            return issue("literature bounds cannot be combined with shifted exponents".into());
        }
        let mut k_exact: Option<BigRational> = Some(BigRational::from_integer(1.into()));
        let mut k_iv = RealInterval::one();
        let mut lin_sum = Scalar::int(0);
        let mut terms = Vec::new();
        let mut matched_shape = false;
        for (i, family) in self.families.iter().enumerate() {
            let e = self.endpoint_exponent(side, i);
            if e.sign() == Some(Ordering::Equal) {
                continue;
            }
            let name = &h.factors[i].label;
            match family {
                Family::Constant => {
                    let GExpr::Const(c) = &self.exprs[i] else {
                        return issue(format!("{name}: constant family without a constant expression"));
                    };
                    match (e.log_argument(), *c == Scalar::euler()) {
                        (Some(r), true) => {
                            k_exact = k_exact.map(|k| k * r);
                            k_iv = k_iv * Scalar::from_rational(r.clone()).iv();
                        }
                        _ => {
                            k_exact = None;
                            match c.iv().abs().ln() {
                                Ok(l) => k_iv = k_iv * (e.iv() * l).exp(),
                                Err(err) => return issue(format!("{name}: {err}")),
                            }
                        }
                    }
                }
                Family::Linear { .. } => {
                    lin_sum = lin_sum.add(&e);
                    terms.push(RatioTerm {
                        factor: RatioFactor::Family { family: family.clone() },
                        exponent: ExponentLaw::constant(e.clone()),
                        clamp: false,
                    });
                }
                Family::SymLog { shape, .. } => {
                    let one = e.rational().is_some_and(|q| q == BigRational::from_integer(1.into()));
                    if matched_shape || !one || bound.shape.as_ref() != Some(shape) {
                        return issue(format!("{name}: a SymLog factor must appear once, with exponent 1 and the shape of the bound"));
                    }
                    matched_shape = true;
                    terms.push(RatioTerm {
                        factor: RatioFactor::Family { family: family.clone() },
                        exponent: ExponentLaw::constant(e),
                        clamp: false,
                    });
                }
                other => return issue(format!("{name}: no comparison available for family {other:?}")),
            }
        }
        if bound.shape.is_some() && !matched_shape {
            return issue("the bound has a logarithmic shape but no matching SymLog factor".into());
        }
        let constant_ok = match (&k_exact, bound.constant.rational()) {
            (Some(k), Some(a)) => *k >= a,
            _ => k_iv.lo() >= bound.constant.iv().hi(),
        };
        if !constant_ok {
            return issue(format!("constant {} exceeds the product of constant factors", bound.constant));
        }
        let spare = lin_sum.sub(&bound.t_power);
        if !matches!(spare.sign(), Some(Ordering::Greater | Ordering::Equal)) {
            return issue(format!("power t^({}) not dominated by the linear factors", bound.t_power));
        }
        if terms.is_empty() {
            let claim = Claim::Comparison { ratio: label.clone(), sigma: sigma.iv().mid(), t_from, min_excess: 0.0 };
            return Outcome::Checked(label, Ok(Verdict::Verified { fact: Fact::new(claim, 0, 0.0) }));
        }
        let ratio = RatioExpr { label: format!("{label} at σ = {sigma}"), a: h.a.clone(), b: h.b.clone(), terms };
        Outcome::Checked(label, comparison_excess(&ratio, sigma, t_from, self.cfg))
    }
}

fn check_target(h: &StripHypotheses) -> Result<Base, TheoremError> {
    let contains = |x: f64| h.a.iv().lo() <= x && x <= h.b.iv().hi();
    match &h.f {
        FTarget::FZeta => {
            if contains(0.0) {
                return Err(TheoremError::InvalidHypotheses("f_zeta has a pole at s = 0".into()));
            }
            Ok(Base::Zeta(ZetaTarget::new(ZetaKind::F)))
        }
        FTarget::Zeta => {
            if contains(1.0) {
                return Err(TheoremError::InvalidHypotheses("ζ has a pole at s = 1 in the strip; use f_zeta".into()));
            }
            Ok(Base::Zeta(ZetaTarget::new(ZetaKind::Zeta)))
        }
        FTarget::Expr { expr } => {
            let g = GExpr::parse(expr)?;
            g.check_size().map_err(|e| TheoremError::InvalidHypotheses(e.to_string()))?;
            Ok(Base::Expr(g))
        }
    }
}

/// `(lo, hi)` ranges cover `[start, ∞)`; returns the first gap otherwise.
fn coverage_gap(start: f64, pieces: &[BoundaryPiece]) -> Option<(f64, f64)> {
    let mut r: Vec<(f64, f64)> = pieces.iter().map(|p| p.range()).collect();
    r.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut cur = start;
    for (lo, hi) in r {
        if lo > cur {
            return Some((cur, lo));
        }
        cur = cur.max(hi);
    }
    (cur < f64::INFINITY).then_some((cur, f64::INFINITY))
}

fn attestations(h: &StripHypotheses) -> Vec<Attestation> {
    let g = &h.growth;
    let mut out = vec![Attestation {
        topic: "growth of f".into(),
        statement: if g.statement.is_empty() {
            format!("|f(σ+it)| ≤ {}·exp({}·e^({}|t|)) on the strip", g.c1, g.c2, g.c3)
        } else {
            g.statement.clone()
        },
        citation: None,
        acknowledged: g.acknowledged,
    }];
    let builtin = !matches!(h.f, FTarget::Expr { .. });
    out.push(Attestation {
        topic: "reflection symmetry of f".into(),
        statement: format!("{}(conj s) = conj {}(s), so checks on t ≥ 0 suffice", h.f.describe(), h.f.describe()),
        citation: None,
        acknowledged: builtin || h.attestations.iter().any(|a| a.topic == "reflection symmetry of f" && a.acknowledged),
    });
    for f in &h.factors {
        if let Some(u) = &f.upper_growth {
            out.push(u.clone());
        }
        if matches!(f.source, super::FactorSource::Expr { .. }) {
            let topic = format!("lower growth of {}", f.label);
            if !h.attestations.iter().any(|a| a.topic == topic) {
                out.push(Attestation {
                    topic,
                    statement: format!("|{}(σ+it)| > C₁·exp(−C₂·e^(C₃|t|)) on the strip", f.label),
                    citation: None,
                    acknowledged: false,
                });
            }
        }
    }
    for (side, pieces) in [("a", &h.boundary_a), ("b", &h.boundary_b)] {
        let sigma = if side == "a" { &h.a } else { &h.b };
        for p in pieces.iter() {
            match p {
                BoundaryPiece::Numeric { .. } => {}
                BoundaryPiece::Literature { bound, t_from, citation, acknowledged } => out.push(Attestation {
                    topic: format!("boundary {side}"),
                    statement: format!("|ζ({sigma}+it)| ≤ {} for t ≥ {t_from}", bound.describe()),
                    citation: Some(citation.clone()),
                    acknowledged: *acknowledged,
                }),
                BoundaryPiece::Attested { t_from, statement, citation, acknowledged } => out.push(Attestation {
                    topic: format!("boundary {side}"),
                    statement: format!("{statement} (t ≥ {t_from})"),
                    citation: citation.clone(),
                    acknowledged: *acknowledged,
                }),
            }
        }
    }
    out.extend(h.attestations.iter().cloned());
    out
}

/// Check every hypothesis of the interpolation theorem that can be checked
/// and assemble the certificate. Invalid packages are errors; failed or
/// undecided checks are recorded in the certificate status.
pub fn certify_strip(h: &StripHypotheses, cfg: &Config) -> Result<Certificate, TheoremError> {
    h.validate()?;
    let n = normalize_exponents(h)?;
    let base = check_target(&n)?;
    let mut exprs = Vec::new();
    let mut families = Vec::new();
    for f in &n.factors {
        let (g, fam) = f.resolve(&n.a, &n.b)?;
        exprs.push(g);
        families.push(fam);
    }

    let mut jobs = Vec::new();
    for (i, f) in n.factors.iter().enumerate() {
        jobs.push(Job::Nonvanishing(i));
        match f.alpha.sub(&f.beta).sign() {
            Some(Ordering::Greater) => jobs.push(Job::Monotone(i, Direction::Increasing)),
            Some(Ordering::Less) => jobs.push(Job::Monotone(i, Direction::Decreasing)),
            Some(Ordering::Equal) => {}
            None => return Err(TheoremError::InvalidHypotheses(format!("{}: cannot order α and β", f.label))),
        }
    }
    if n.t0 > 0.0 {
        jobs.push(Job::SmallT);
    }
    let mut issues = Vec::new();
    for (side, pieces) in [(Side::A, &n.boundary_a), (Side::B, &n.boundary_b)] {
        if let Some((lo, hi)) = coverage_gap(n.t0, pieces) {
            issues.push(format!("boundary {}: no bound given for t in [{lo}, {hi})", side.name()));
        }
        for p in pieces.iter() {
            match p {
                BoundaryPiece::Numeric { t_lo, t_hi } => jobs.push(Job::Numeric(side, *t_lo, *t_hi)),
                BoundaryPiece::Literature { bound, t_from, .. } => jobs.push(Job::Literature(side, bound, *t_from)),
                BoundaryPiece::Attested { .. } => {}
            }
        }
    }

    let ctx = Ctx { h: &n, exprs: &exprs, families: &families, base: &base, cfg };
    let outcomes: Vec<Outcome> = jobs.par_iter().map(|j| ctx.run(j)).collect();

    let mut facts = Vec::new();
    let mut refutations = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Issue(s) => issues.push(s),
            Outcome::Checked(label, r) => match r {
                Ok(Verdict::Verified { fact }) | Ok(Verdict::Conditional { fact }) => facts.push(fact),
                Ok(Verdict::Refuted { counter, .. }) => refutations.push(Refutation { check: label, counter }),
                Ok(Verdict::Exhausted { detail, .. }) => issues.push(format!("{label}: {detail}")),
                Err(e) => issues.push(format!("{label}: {e}")),
            },
        }
    }
    facts.sort_by(|x, y| x.id.cmp(&y.id));
    let attestations = attestations(&n);
    let status = if !refutations.is_empty() {
        Status::Refuted
    } else if !issues.is_empty() {
        Status::Inconclusive
    } else if facts.iter().any(|f| f.is_conditional()) || attestations.iter().any(|a| !a.acknowledged) {
        Status::Conditional
    } else {
        Status::Certified
    };
    cfg.events.emit("certificate", serde_json::json!({ "status": status, "facts": facts.len(), "issues": issues.len() }));
    let conclusion = formula(&n, &exprs);
    Ok(Certificate {
        schema: SCHEMA.into(),
        status,
        hypotheses: n,
        facts,
        refutations,
        issues,
        attestations,
        conclusion,
        toolchain: Toolchain::current(),
    })
}
