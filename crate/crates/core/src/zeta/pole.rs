//! Expansion of `(s−1)ζ(s)` around `s = 1` and the local-maximum lemma
//! `|f(s)| ≤ 1` on a half-disk to the right of `s = 1`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{auto_params, pole_free_zeta, ZetaError};
use crate::interval::{ComplexRect, RealInterval, Scalar};

/// Stieltjes constants `γ_0 … γ_9`, 24 significant digits.
pub const STIELTJES: [&str; 10] = [
    "0.577215664901532860606512",
    "-0.0728158454836767248605864",
    "-0.00969036319287231848453039",
    "0.00205383442030334586616005",
    "0.00232537006546730005746817",
    "0.000793323817301062701753335",
    "-0.000238769345430199609872422",
    "-0.000527289567057751046074098",
    "-0.000352123353803039509602052",
    "-0.0000343947744180880481779146",
];

/// Radius of the circle used for the Cauchy bound on the tail.
const CAUCHY_R: f64 = 0.9;
/// Series is used inside `|s−1| ≤ SERIES_RADIUS`.
pub(super) const SERIES_RADIUS: f64 = 0.25;

/// Taylor coefficients `p_k` of `(s−1)ζ(s) = 1 + Σ p_k (s−1)^k`, `k = 1..=10`.
fn coeffs() -> &'static [RealInterval; 10] {
    static C: OnceLock<[RealInterval; 10]> = OnceLock::new();
    C.get_or_init(|| {
        let mut fact = 1.0;
        std::array::from_fn(|i| {
            if i > 0 {
                fact *= i as f64;
            }
            // the decimal strings are within 1e-24 of the constants
            let g = Scalar::parse(STIELTJES[i]).expect("static").iv().inflate(1e-24);
            let sgn = if i % 2 == 0 { 1.0 } else { -1.0 };
            g.mul_f(sgn).div_f(fact).expect("nonzero")
        })
    })
}

/// Certified upper bound for `|(s−1)ζ(s)|` on `|s−1| ≤ R`, by the maximum
/// modulus principle on the enclosing square.
fn cauchy_max() -> f64 {
    static M: OnceLock<f64> = OnceLock::new();
    *M.get_or_init(|| {
        let r = CAUCHY_R;
        let pieces = 360;
        let h = 2.0 * r / pieces as f64;
        let mut m: f64 = 0.0;
        for i in 0..pieces {
            let a = -r + h * i as f64;
            let b = if i + 1 == pieces { r } else { -r + h * (i + 1) as f64 };
            let seg = RealInterval::new(a, b).expect("ordered");
            let rect_sides = [
                ComplexRect::new(seg.add_f(1.0), RealInterval::point(-r)),
                ComplexRect::new(seg.add_f(1.0), RealInterval::point(r)),
                ComplexRect::new(RealInterval::point(1.0 - r), seg),
                ComplexRect::new(RealInterval::point(1.0 + r), seg),
            ];
            for side in rect_sides {
                let p = auto_params(&side, 1e-10).params;
                let v = pole_free_zeta(&side, p).expect("square avoids Re(s) <= 0");
                m = m.max(v.abs().hi());
            }
        }
        m
    })
}

/// Enclosure of `(s−1)ζ(s)` from the series with a Cauchy tail bound.
pub fn pole_series(s: &ComplexRect) -> Result<ComplexRect, ZetaError> {
    let w = *s - ComplexRect::one();
    let rw = w.abs().hi();
    if rw >= CAUCHY_R {
        return Err(ZetaError::DomainViolation("outside the series disk".into()));
    }
    let c = coeffs();
    let mut acc = ComplexRect::real(c[9]);
    for k in (0..9).rev() {
        acc = acc * w + ComplexRect::real(c[k]);
    }
    let mut val = ComplexRect::one() + acc * w;
    let q = RealInterval::point(rw).div_f(CAUCHY_R)?;
    let tail = RealInterval::point(cauchy_max()) * q.powi(11)? * (RealInterval::one() - q).recip()?;
    val = val.inflate(tail.hi());
    Ok(val)
}

/// Certificate that `|f(s)| ≤ 1` whenever `Re(s) ≥ 1` and `|s−1| ≤ delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMaxLemma {
    pub delta: f64,
    /// Upper bound for `|(s−1)ζ(s)|` on `|s−1| = 0.9`.
    pub cauchy_bound: f64,
    /// Upper bound for the quadratic bracket; the lemma holds when negative.
    pub bracket: f64,
    pub holds: bool,
}

/// With `w = s−1 = x+iy`, `P(w) = (s−1)ζ(s)`, `p₁ = γ₀` and
/// `|P − 1 − p₁w| ≤ c|w|²` on `|w| ≤ δ`:
/// `|P|² − |1+w|² ≤ 2(p₁−1)x + |w|²[(p₁²−1) + 2c(1+|p₁|δ) + c²δ²]`,
/// which is `≤ 0` for `x ≥ 0` once the bracket is negative.
pub fn local_max_lemma() -> LocalMaxLemma {
    static L: OnceLock<LocalMaxLemma> = OnceLock::new();
    *L.get_or_init(|| {
        let delta = SERIES_RADIUS;
        let c = coeffs();
        let d = RealInterval::point(delta);
        let mut cc = RealInterval::zero();
        let mut pw = RealInterval::one();
        for k in 2..=10 {
            cc = cc + c[k - 1].abs() * pw;
            pw = pw * d;
        }
        let m = cauchy_max();
        let q = d.div_f(CAUCHY_R).expect("nonzero");
        let tail = RealInterval::point(m).div_f(CAUCHY_R * CAUCHY_R).expect("nonzero")
            * q.powi(9).expect("int")
            * (RealInterval::one() - q).recip().expect("q < 1");
        cc = cc + tail;
        let p1 = c[0];
        let br = (p1.sqr() - RealInterval::one())
            + cc.mul_f(2.0) * (RealInterval::one() + p1.abs() * d)
            + d.sqr() * cc.sqr();
        let holds = br.hi() < 0.0 && p1.hi() < 1.0;
        LocalMaxLemma { delta, cauchy_bound: m, bracket: br.hi(), holds }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_holds() {
        let l = local_max_lemma();
        assert!(l.holds, "{l:?}");
        assert!(l.cauchy_bound > 1.0 && l.cauchy_bound < 10.0);
    }

    #[test]
    fn series_matches_em_near_one() {
        let s = ComplexRect::point(1.1, 0.15);
        let a = pole_series(&s).unwrap();
        let b = pole_free_zeta(&s, auto_params(&s, 1e-14).params).unwrap();
        assert!(a.intersect(&b).is_some());
        assert!(a.re.width() < 1e-5);
    }
}
