//! Canned hypothesis packages and ratios for the three worked zeta examples,
//! and the published boundary bounds they rely on.

use serde::{Deserialize, Serialize};

use crate::gfun::build_catalog;
use crate::interval::{ComplexRect, Scalar};
use crate::theorem::{
    Attestation, BoundaryPiece, FTarget, Factor, GrowthAttestation, LiteratureBound, RatioSpec, StripHypotheses, TheoremError,
};
use crate::verifier::{ExponentLaw, RatioExpr, RatioFactor, RatioTerm};
use crate::zeta::zeta_auto;

const LITERATURE_JSON: &str = include_str!("../data/literature.json");

/// A published bound `|ζ(σ+it)| ≤ A·t^κ·L(t)` on one vertical line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiteratureEntry {
    pub key: String,
    pub sigma: Scalar,
    pub bound: LiteratureBound,
    pub t_from: f64,
    pub citation: String,
}

pub fn literature() -> Vec<LiteratureEntry> {
    serde_json::from_str(LITERATURE_JSON).expect("bundled literature table is valid")
}

pub fn literature_entry(key: &str) -> Option<LiteratureEntry> {
    literature().into_iter().find(|e| e.key == key)
}

fn cited(key: &str) -> BoundaryPiece {
    let e = literature_entry(key).expect("bundled key");
    BoundaryPiece::Literature { bound: e.bound, t_from: e.t_from, citation: e.citation, acknowledged: true }
}

fn sc(s: &str) -> Scalar {
    Scalar::parse(s).expect("static scalar")
}

fn zeta_growth(statement: &str) -> GrowthAttestation {
    GrowthAttestation { c1: 1.0, c2: 1.0, c3: 1.0, statement: statement.into(), acknowledged: true }
}

/// Bounds for `|ζ(1+it)|` matching `G₁ … G₅`.
pub const EXAMPLE1_LITERATURE: [&str; 5] =
    ["patel2022-log", "patel2022-half-log", "patel2022-fifth-log", "hiary2023-overlog", "bellotti-leong2024-two-thirds"];

/// Targets `C_i(t0) − 1` of the constants table.
pub const EXAMPLE1_TARGETS: [(f64, f64); 6] =
    [(1e1, 4.6e-2), (1e2, 3.2e-4), (1e3, 2.6e-6), (1e4, 2.4e-8), (1e5, 2.2e-10), (1e6, 2.1e-12)];

/// Height from which `|G_i|` is certified increasing on `[1, 2]`.
pub fn example1_t0(i: usize) -> f64 {
    match i {
        2 | 3 => 4.0,
        4 => 30.0,
        _ => 3.0,
    }
}

/// `η ∈ {1.1, …, 2.0}`.
pub fn default_eta_grid() -> Vec<Scalar> {
    (11..=20).map(|k| Scalar::ratio(k, 10)).collect()
}

fn check_index(i: usize) -> Result<(), TheoremError> {
    if (1..=5).contains(&i) {
        Ok(())
    } else {
        Err(TheoremError::InvalidHypotheses(format!("G_{i} is not one of G_1 … G_5")))
    }
}

/// `f = ((s−1)/s)ζ(s)` on `[1, η]` with `|G_i|^{(η−σ)/(η−1)}·ζ(η)^{(σ−1)/(η−1)}`.
pub fn example1_package(i: usize, eta: &Scalar) -> Result<StripHypotheses, TheoremError> {
    check_index(i)?;
    let one = Scalar::int(1);
    let ze = zeta_auto(&ComplexRect::real(eta.iv())).map_err(|e| TheoremError::InvalidHypotheses(e.to_string()))?;
    let log_b = Scalar::from_interval(ze.re.ln().map_err(|e| TheoremError::InvalidHypotheses(e.to_string()))?);
    let name = format!("Ex1G{i}");
    Ok(StripHypotheses {
        a: one.clone(),
        b: eta.clone(),
        f: FTarget::FZeta,
        factors: vec![
            Factor::catalog(&format!("G{i}"), &name, vec![], one.clone(), Scalar::int(0)),
            Factor::catalog("B", "E", vec![], Scalar::int(0), log_b),
        ],
        t0: example1_t0(i),
        growth: zeta_growth("((s−1)/s)ζ(s) grows at most polynomially in t on the strip"),
        boundary_a: vec![cited(EXAMPLE1_LITERATURE[i - 1])],
        boundary_b: vec![BoundaryPiece::Attested {
            t_from: 0.0,
            statement: format!("|f({eta}+it)| ≤ |ζ({eta}+it)| ≤ ζ({eta}) since |(s−1)/s| < 1 for σ > 1"),
            citation: Some("Dirichlet series bound".into()),
            acknowledged: true,
        }],
        shift: vec![],
        attestations: vec![],
    })
}

/// `C_i`: `(|s|/|s−1|)·max(1, |G_i|/L_i(t))` over `σ ∈ [1, η]`, so that
/// `|ζ| ≤ C_i(t0)·ζ(η)^{(σ−1)/(η−1)}·L_i(t)^{(η−σ)/(η−1)}` for `t ≥ t0`.
pub fn example1_ratio(i: usize, eta: &Scalar) -> Result<RatioSpec, TheoremError> {
    check_index(i)?;
    let family = build_catalog(&format!("Ex1G{i}"), &[], None)?.family;
    let one = || ExponentLaw::constant(Scalar::int(1));
    Ok(RatioSpec {
        label: format!("C_{i}"),
        subject: "ζ".into(),
        ratio: RatioExpr {
            label: format!("C_{i}"),
            a: Scalar::int(1),
            b: eta.clone(),
            terms: vec![
                RatioTerm { factor: RatioFactor::SOverSMinus1, exponent: one(), clamp: false },
                RatioTerm { factor: RatioFactor::Family { family }, exponent: one(), clamp: true },
            ],
        },
    })
}

/// The comparison function with the shape `log t` used in the second
/// example, `½(log(Q₁+s) + log(Q₂−s))`.
pub fn example2_g(q1: Scalar, q2: Scalar) -> Factor {
    Factor::catalog("G", "SymLog", vec![q1, q2], Scalar::int(1), Scalar::int(1))
}

/// `f = ((s−1)/s)ζ(s)` on `[5/7, 1]` with `1.546^{α}·|s|^{α'}·|G|`.
pub fn example2_package(q1: Scalar, q2: Scalar) -> StripHypotheses {
    let zero = Scalar::int(0);
    StripHypotheses {
        a: Scalar::ratio(5, 7),
        b: Scalar::int(1),
        f: FTarget::FZeta,
        factors: vec![
            Factor::catalog("A", "E", vec![], sc("log(1.546)"), zero.clone()),
            Factor::catalog("|s|", "Linear", vec![zero.clone()], Scalar::ratio(1, 14), zero),
            example2_g(q1, q2),
        ],
        t0: 0.0,
        growth: zeta_growth("((s−1)/s)ζ(s) grows at most polynomially in t on the strip"),
        boundary_a: vec![BoundaryPiece::Numeric { t_lo: 0.0, t_hi: 3.0 }, cited("yang2024-five-sevenths")],
        boundary_b: vec![BoundaryPiece::Numeric { t_lo: 0.0, t_hi: 3.0 }, cited("patel2022-log")],
        shift: vec![],
        attestations: vec![],
    }
}

/// `(|s|/t)^{(1/4)(1−σ)}·(|s|/|s−1|)·|G|/log t` on `[5/7, 1]`.
pub fn example2_ratio(q1: Scalar, q2: Scalar) -> Result<RatioSpec, TheoremError> {
    let (a, b) = (Scalar::ratio(5, 7), Scalar::int(1));
    let g = build_catalog("SymLog", &[q1, q2], Some((&a, &b)))?.family;
    let lin = build_catalog("Linear", &[Scalar::int(0)], None)?.family;
    let one = || ExponentLaw::constant(Scalar::int(1));
    Ok(RatioSpec {
        label: "second example factor".into(),
        subject: "ζ".into(),
        ratio: RatioExpr {
            label: "second example factor".into(),
            a,
            b,
            terms: vec![
                RatioTerm {
                    factor: RatioFactor::Family { family: lin },
                    exponent: ExponentLaw { at_a: Scalar::ratio(1, 14), at_b: Scalar::int(0) },
                    clamp: false,
                },
                RatioTerm { factor: RatioFactor::SOverSMinus1, exponent: one(), clamp: false },
                RatioTerm { factor: RatioFactor::Family { family: g }, exponent: one(), clamp: false },
            ],
        },
    })
}

/// Height from which `|G|` of the third example is certified decreasing.
pub const EXAMPLE3_T0: f64 = 12.0;

/// `f = ζ` on `[1/2, 5/7]` with `66.7^α·1.546^β·|s|^{…}·|G|^{…}`.
pub fn example3_package() -> StripHypotheses {
    StripHypotheses {
        a: Scalar::ratio(1, 2),
        b: Scalar::ratio(5, 7),
        f: FTarget::Zeta,
        factors: vec![
            Factor::catalog("A", "E", vec![], sc("log(66.7)"), sc("log(1.546)")),
            Factor::catalog("|s|", "Linear", vec![Scalar::int(0)], Scalar::ratio(27, 164), Scalar::ratio(1, 14)),
            Factor::catalog("G", "Ex3G", vec![], Scalar::int(0), Scalar::int(1)),
        ],
        t0: EXAMPLE3_T0,
        growth: zeta_growth("ζ(s) grows at most polynomially in t on the strip"),
        boundary_a: vec![cited("patel2023-half")],
        boundary_b: vec![cited("yang2024-five-sevenths")],
        shift: vec![],
        attestations: vec![Attestation {
            topic: "pole".into(),
            statement: "ζ is holomorphic on the strip 1/2 ≤ σ ≤ 5/7".into(),
            citation: None,
            acknowledged: true,
        }],
    }
}

/// `(|s|/t)^{e(σ)}·(|G|/log t)^{(14/3)(σ−1/2)}` on `[1/2, 5/7]`.
pub fn example3_ratio() -> Result<RatioSpec, TheoremError> {
    let (a, b) = (Scalar::ratio(1, 2), Scalar::ratio(5, 7));
    let g = build_catalog("Ex3G", &[], Some((&a, &b)))?.family;
    let lin = build_catalog("Linear", &[Scalar::int(0)], None)?.family;
    Ok(RatioSpec {
        label: "third example factor".into(),
        subject: "ζ".into(),
        ratio: RatioExpr {
            label: "third example factor".into(),
            a,
            b,
            terms: vec![
                RatioTerm {
                    factor: RatioFactor::Family { family: lin },
                    exponent: ExponentLaw { at_a: Scalar::ratio(27, 164), at_b: Scalar::ratio(1, 14) },
                    clamp: false,
                },
                RatioTerm {
                    factor: RatioFactor::Family { family: g },
                    exponent: ExponentLaw { at_a: Scalar::int(0), at_b: Scalar::int(1) },
                    clamp: false,
                },
            ],
        },
    })
}
