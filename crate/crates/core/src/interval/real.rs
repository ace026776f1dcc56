use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::round::*;
use super::IntervalError;

/// Ulp slack applied around libm results for the transcendental kernels.
const ELEM_SLACK: u32 = 2;
/// Slack for `ln_1p`/`exp_m1`, whose libm accuracy guarantees are weaker.
const ELEM1P_SLACK: u32 = 3;

/// Closed real interval `[lo, hi]` with outward-rounded arithmetic.
#[derive(Clone, Copy, PartialEq)]
pub struct RealInterval {
    lo: f64,
    hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
        {
            return Err(IntervalError::Invalid { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// Caller guarantees `lo <= hi`.
    #[inline]
    pub(crate) fn raw(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "bad interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "point interval from non-finite {x}");
        Self { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    pub fn one() -> Self {
        Self::point(1.0)
    }

    pub fn pi() -> Self {
        Self::raw(std::f64::consts::PI, next_up(std::f64::consts::PI))
    }

    pub fn half_pi() -> Self {
        Self::raw(std::f64::consts::FRAC_PI_2, next_up(std::f64::consts::FRAC_PI_2))
    }

    pub fn e() -> Self {
        Self::raw(std::f64::consts::E, next_up(std::f64::consts::E))
    }

    /// Tightest interval containing `p/q` for integers exactly representable
    /// as binary64.
    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0);
        assert!(p.unsigned_abs() < 1 << 53 && q.unsigned_abs() < 1 << 53);
        let (p, q) = (p as f64, q as f64);
        Self::raw(div_down(p, q), div_up(p, q))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn width(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    pub fn rad(&self) -> f64 {
        let m = self.mid();
        sub_up(self.hi, m).max(sub_up(m, self.lo))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn contains_interval(&self, o: &Self) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(Self::raw(lo, hi))
    }

    pub fn hull(&self, o: &Self) -> Self {
        Self::raw(self.lo.min(o.lo), self.hi.max(o.hi))
    }

    pub fn hull_point(&self, x: f64) -> Self {
        Self::raw(self.lo.min(x), self.hi.max(x))
    }

    /// Largest absolute value.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    pub fn abs(&self) -> Self {
        Self::raw(self.mig(), self.mag())
    }

    pub fn bisect(&self) -> (Self, Self) {
        let m = self.mid();
        (Self::raw(self.lo, m), Self::raw(m, self.hi))
    }

    pub fn max(&self, o: &Self) -> Self {
        Self::raw(self.lo.max(o.lo), self.hi.max(o.hi))
    }

    pub fn min(&self, o: &Self) -> Self {
        Self::raw(self.lo.min(o.lo), self.hi.min(o.hi))
    }

    pub fn max_f(&self, x: f64) -> Self {
        Self::raw(self.lo.max(x), self.hi.max(x))
    }

    /// Outward inflation by an absolute radius.
    pub fn inflate(&self, r: f64) -> Self {
        Self::raw(sub_down(self.lo, r), add_up(self.hi, r))
    }

    pub fn sqr(&self) -> Self {
        let m = self.mig();
        let g = self.mag();
        Self::raw(mul_down(m, m), mul_up(g, g))
    }

    pub fn recip(&self) -> Result<Self, IntervalError> {
        Self::one().div(self)
    }

    pub fn div(&self, o: &Self) -> Result<Self, IntervalError> {
        if o.contains_zero() {
            return Err(IntervalError::DivisorContainsZero);
        }
        let c = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in c {
            lo = lo.min(div_down(a, b));
            hi = hi.max(div_up(a, b));
        }
        Ok(Self::raw(lo, hi))
    }

    pub fn div_f(&self, x: f64) -> Result<Self, IntervalError> {
        self.div(&Self::point(x))
    }

    pub fn mul_f(&self, x: f64) -> Self {
        *self * Self::point(x)
    }

    pub fn add_f(&self, x: f64) -> Self {
        *self + Self::point(x)
    }

    pub fn sqrt(&self) -> Result<Self, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::DomainViolation { op: "sqrt", endpoint: self.lo });
        }
        Ok(Self::raw(sqrt_down(self.lo), sqrt_up(self.hi)))
    }

    pub fn exp(&self) -> Self {
        let lo = if self.lo == 0.0 { 1.0 } else { down_ulps(self.lo.exp(), ELEM_SLACK).max(0.0) };
        let hi = if self.hi == 0.0 { 1.0 } else { up_ulps(self.hi.exp(), ELEM_SLACK) };
        // exp(x) >= 1 + x
        let lo = lo.max(add_down(1.0, self.lo));
        Self::raw(lo, hi)
    }

    pub fn exp_m1(&self) -> Self {
        let f = |x: f64, d: bool| {
            if x == 0.0 {
                0.0
            } else if d {
                down_ulps(x.exp_m1(), ELEM1P_SLACK).max(-1.0)
            } else {
                up_ulps(x.exp_m1(), ELEM1P_SLACK)
            }
        };
        // exp_m1(x) >= x
        let lo = f(self.lo, true).max(self.lo);
        Self::raw(lo, f(self.hi, false))
    }

    pub fn ln(&self) -> Result<Self, IntervalError> {
        if self.lo <= 0.0 {
            return Err(IntervalError::DomainViolation { op: "log", endpoint: self.lo });
        }
        let f = |x: f64, d: bool| {
            if x == 1.0 {
                0.0
            } else if d {
                down_ulps(x.ln(), ELEM_SLACK)
            } else {
                up_ulps(x.ln(), ELEM_SLACK)
            }
        };
        // ln(x) <= x - 1
        let hi = f(self.hi, false).min(sub_up(self.hi, 1.0));
        Ok(Self::raw(f(self.lo, true), hi))
    }

    pub fn ln_1p(&self) -> Result<Self, IntervalError> {
        if self.lo <= -1.0 {
            return Err(IntervalError::DomainViolation { op: "log1p", endpoint: self.lo });
        }
        let f = |x: f64, d: bool| {
            if x == 0.0 {
                0.0
            } else if d {
                down_ulps(x.ln_1p(), ELEM1P_SLACK)
            } else {
                up_ulps(x.ln_1p(), ELEM1P_SLACK)
            }
        };
        // ln(1+x) <= x
        let hi = f(self.hi, false).min(self.hi);
        Ok(Self::raw(f(self.lo, true), hi))
    }

    pub fn atan(&self) -> Self {
        let hp = next_up(std::f64::consts::FRAC_PI_2);
        let f = |x: f64, d: bool| {
            if x == 0.0 {
                0.0
            } else if x == f64::INFINITY {
                if d {
                    std::f64::consts::FRAC_PI_2
                } else {
                    hp
                }
            } else if d {
                down_ulps(x.atan(), ELEM_SLACK)
            } else {
                up_ulps(x.atan(), ELEM_SLACK)
            }
        };
        let mut lo = f(self.lo, true).max(-hp);
        let mut hi = f(self.hi, false).min(hp);
        // |atan x| <= |x|
        if self.hi <= 0.0 {
            lo = lo.max(self.lo);
        }
        if self.lo >= 0.0 {
            hi = hi.min(self.hi);
        }
        Self::raw(lo, hi)
    }

    /// `atan(x)/x`, extended by 1 at 0. Even and decreasing in `|x|`.
    pub fn atanc(&self) -> Self {
        let at = |v: f64| -> Self {
            if v == 0.0 {
                Self::one()
            } else {
                let p = Self::point(v);
                p.atan().div(&p).expect("nonzero point")
            }
        };
        let lo = at(self.mag()).lo.max(0.0);
        let hi = at(self.mig()).hi.min(1.0);
        Self::raw(lo, hi)
    }

    /// `sqrt(1+x) - 1`, evaluated without cancellation.
    pub fn sqrt1pm1(&self) -> Result<Self, IntervalError> {
        if self.lo < -1.0 {
            return Err(IntervalError::DomainViolation { op: "sqrt1pm1", endpoint: self.lo });
        }
        let at = |v: f64| -> Self {
            let p = Self::point(v);
            let d = Self::one() + p.add_f(1.0).sqrt().expect("nonneg");
            p.div(&d).expect("positive")
        };
        Ok(Self::raw(at(self.lo).lo, at(self.hi).hi))
    }

    /// `ln(1+x)/x`, extended by 1 at 0. Decreasing on `(-1, ∞)`.
    pub fn ln_1p_c(&self) -> Result<Self, IntervalError> {
        if self.lo <= -1.0 {
            return Err(IntervalError::DomainViolation { op: "log1pc", endpoint: self.lo });
        }
        let at = |v: f64| -> Self {
            if v == 0.0 {
                Self::one()
            } else {
                let p = Self::point(v);
                p.ln_1p().expect("checked").div(&p).expect("nonzero point")
            }
        };
        let mut lo = at(self.hi).lo.max(0.0);
        let mut hi = at(self.lo).hi;
        if self.lo >= 0.0 {
            hi = hi.min(1.0);
        }
        if self.hi <= 0.0 {
            lo = lo.max(1.0);
        }
        Ok(Self::raw(lo, hi))
    }

    pub fn cos(&self) -> Self {
        if self.is_point() && self.lo == 0.0 {
            return Self::one();
        }
        let f = |x: f64, d: bool| {
            if d {
                down_ulps(x.cos(), ELEM_SLACK)
            } else {
                up_ulps(x.cos(), ELEM_SLACK)
            }
        };
        // extrema of cos at k*pi
        let q = self.div(&Self::pi()).expect("pi nonzero");
        let k0 = q.lo.ceil();
        let k1 = q.hi.floor();
        let mut lo = f(self.lo, true).min(f(self.hi, true));
        let mut hi = f(self.lo, false).max(f(self.hi, false));
        if k0 <= k1 {
            if k1 - k0 >= 1.0 {
                return Self::raw(-1.0, 1.0);
            }
            if (k0 as i64).rem_euclid(2) == 0 {
                hi = 1.0;
            } else {
                lo = -1.0;
            }
        }
        Self::raw(lo.max(-1.0), hi.min(1.0))
    }

    pub fn sin(&self) -> Self {
        if self.is_point() && self.lo == 0.0 {
            return Self::zero();
        }
        let f = |x: f64, d: bool| {
            if d {
                down_ulps(x.sin(), ELEM_SLACK)
            } else {
                up_ulps(x.sin(), ELEM_SLACK)
            }
        };
        // extrema of sin at pi/2 + k*pi
        let q = (*self - Self::half_pi()).div(&Self::pi()).expect("pi nonzero");
        let k0 = q.lo.ceil();
        let k1 = q.hi.floor();
        let mut lo = f(self.lo, true).min(f(self.hi, true));
        let mut hi = f(self.lo, false).max(f(self.hi, false));
        if k0 <= k1 {
            if k1 - k0 >= 1.0 {
                return Self::raw(-1.0, 1.0);
            }
            if (k0 as i64).rem_euclid(2) == 0 {
                hi = 1.0;
            } else {
                lo = -1.0;
            }
        }
        Self::raw(lo.max(-1.0), hi.min(1.0))
    }

    /// Integer power with sign handling.
    pub fn powi(&self, n: i32) -> Result<Self, IntervalError> {
        if n == 0 {
            return Ok(Self::one());
        }
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut base = *self;
        let mut acc = Self::one();
        let mut k = n as u32;
        // squaring keeps even powers nonnegative
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        if n % 2 == 0 {
            acc = Self::raw(acc.lo.max(0.0), acc.hi);
        }
        Ok(acc)
    }

    /// `x^p` for real exponents. Non-integer `p` needs `x >= 0`.
    pub fn pow_real(&self, p: &Self) -> Result<Self, IntervalError> {
        if p.is_point() {
            let v = p.lo;
            if v == 0.0 {
                return Ok(Self::one());
            }
            if v == 1.0 {
                return Ok(*self);
            }
            if v == 0.5 {
                return self.sqrt();
            }
            if v.fract() == 0.0 && v.abs() <= 64.0 {
                return self.powi(v as i32);
            }
        }
        if self.lo < 0.0 {
            return Err(IntervalError::DomainViolation { op: "pow_real", endpoint: self.lo });
        }
        if self.lo == 0.0 {
            if p.lo <= 0.0 {
                return Err(IntervalError::DomainViolation { op: "pow_real", endpoint: 0.0 });
            }
            if self.hi == 0.0 {
                return Ok(Self::zero());
            }
            let top = (*p * Self::point(self.hi).ln()?).exp();
            return Ok(Self::raw(0.0, top.hi));
        }
        Ok((*p * self.ln()?).exp())
    }
}

impl Add for RealInterval {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::raw(add_down(self.lo, o.lo), add_up(self.hi, o.hi))
    }
}

impl Sub for RealInterval {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::raw(sub_down(self.lo, o.hi), sub_up(self.hi, o.lo))
    }
}

impl Neg for RealInterval {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::raw(-self.hi, -self.lo)
    }
}

impl Mul for RealInterval {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b, c, d) = (self.lo, self.hi, o.lo, o.hi);
        if a >= 0.0 && c >= 0.0 {
            return Self::raw(mul_down(a, c), mul_up(b, d));
        }
        if b <= 0.0 && d <= 0.0 {
            return Self::raw(mul_down(b, d), mul_up(a, c));
        }
        let pairs = [(a, c), (a, d), (b, c), (b, d)];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x, y) in pairs {
            lo = lo.min(mul_down(x, y));
            hi = hi.max(mul_up(x, y));
        }
        Self::raw(lo, hi)
    }
}

impl fmt::Debug for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

impl Serialize for RealInterval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [format!("{}", self.lo), format!("{}", self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for RealInterval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let p = |x: &str| x.parse::<f64>().map_err(serde::de::Error::custom);
        RealInterval::new(p(&lo)?, p(&hi)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ulps_between(a: f64, b: f64) -> u64 {
        let mut n = 0;
        let mut x = a;
        while x < b {
            x = x.next_up();
            n += 1;
        }
        n
    }

    #[test]
    fn add_example() {
        let r = RealInterval::new(1.0, 2.0).unwrap() + RealInterval::new(3.0, 4.0).unwrap();
        assert!(r.lo() <= 4.0 && r.hi() >= 6.0);
        assert!(ulps_between(r.lo(), 4.0) + ulps_between(6.0, r.hi()) <= 4);
    }

    #[test]
    fn mul_symmetric() {
        let x = RealInterval::new(-1.0, 1.0).unwrap();
        let r = x * x;
        assert!(r.lo() <= -1.0 && r.hi() >= 1.0);
    }

    #[test]
    fn div_by_zero_rejected() {
        let r = RealInterval::one().div(&RealInterval::new(0.0, 1.0).unwrap());
        assert_eq!(r, Err(IntervalError::DivisorContainsZero));
    }

    #[test]
    fn log_one_to_e() {
        let r = RealInterval::new(1.0, std::f64::consts::E).unwrap().ln().unwrap();
        assert_eq!(r.lo(), 0.0);
        assert!(r.hi() >= 1.0 && r.hi() <= up_ulps(1.0, 4));
    }

    #[test]
    fn atan_range() {
        let r = RealInterval::new(0.0, 1e300).unwrap().atan();
        assert!(r.lo() == 0.0 && r.hi() <= next_up(std::f64::consts::FRAC_PI_2));
    }

    #[test]
    fn pow_sqrt_exact() {
        let r = RealInterval::point(4.0).pow_real(&RealInterval::point(0.5)).unwrap();
        assert_eq!(r, RealInterval::point(2.0));
        let r = RealInterval::point(7.0).pow_real(&RealInterval::zero()).unwrap();
        assert_eq!(r, RealInterval::one());
    }

    #[test]
    fn log1pc_values() {
        let r = RealInterval::new(0.0, 1.0).unwrap().ln_1p_c().unwrap();
        assert_eq!(r.hi(), 1.0);
        assert!(r.contains(2f64.ln()) && r.lo() > 0.69);
        let r = RealInterval::point(1e-300).ln_1p_c().unwrap();
        assert!(r.contains(1.0) || r.hi() >= next_down(1.0));
        assert!(RealInterval::new(-1.0, 0.0).unwrap().ln_1p_c().is_err());
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            RealInterval::new(-1.0, 1.0).unwrap().ln(),
            Err(IntervalError::DomainViolation { .. })
        ));
        assert!(RealInterval::new(-1.0, 1.0).unwrap().sqrt().is_err());
    }

    #[test]
    fn trig_extrema() {
        let x = RealInterval::new(-0.1, 0.1).unwrap();
        assert_eq!(x.cos().hi(), 1.0);
        let x = RealInterval::new(1.5, 1.6).unwrap();
        assert_eq!(x.sin().hi(), 1.0);
        let x = RealInterval::new(3.0, 3.2).unwrap();
        assert_eq!(x.cos().lo(), -1.0);
    }

    #[test]
    fn constants_enclose() {
        // f64 nearest values lie below pi and e
        assert!(RealInterval::pi().lo() < RealInterval::pi().hi());
        assert!(RealInterval::e().width() > 0.0);
    }

    #[test]
    fn serde_roundtrip() {
        let x = RealInterval::ratio(1, 3);
        let s = serde_json::to_string(&x).unwrap();
        let y: RealInterval = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
