use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::round::*;
use super::{IntervalError, RealInterval};

const ATAN2_SLACK: u32 = 2;

/// Axis-aligned rectangle `re × im` in the complex plane.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRect {
    pub re: RealInterval,
    pub im: RealInterval,
}

fn hypot_down(x: f64, y: f64) -> f64 {
    sqrt_down(add_down(mul_down(x, x), mul_down(y, y)))
}

fn hypot_up(x: f64, y: f64) -> f64 {
    sqrt_up(add_up(mul_up(x, x), mul_up(y, y)))
}

impl ComplexRect {
    pub fn new(re: RealInterval, im: RealInterval) -> Self {
        Self { re, im }
    }

    pub fn point(re: f64, im: f64) -> Self {
        Self::new(RealInterval::point(re), RealInterval::point(im))
    }

    pub fn real(re: RealInterval) -> Self {
        Self::new(re, RealInterval::zero())
    }

    pub fn zero() -> Self {
        Self::point(0.0, 0.0)
    }

    pub fn one() -> Self {
        Self::point(1.0, 0.0)
    }

    pub fn contains(&self, re: f64, im: f64) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }

    pub fn contains_rect(&self, o: &Self) -> bool {
        self.re.contains_interval(&o.re) && self.im.contains_interval(&o.im)
    }

    pub fn is_finite_rect(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn intersect(&self, o: &Self) -> Option<Self> {
        Some(Self::new(self.re.intersect(&o.re)?, self.im.intersect(&o.im)?))
    }

    pub fn hull(&self, o: &Self) -> Self {
        Self::new(self.re.hull(&o.re), self.im.hull(&o.im))
    }

    pub fn mid(&self) -> Self {
        Self::point(self.re.mid(), self.im.mid())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn scale(&self, c: &RealInterval) -> Self {
        Self::new(self.re * *c, self.im * *c)
    }

    /// Inflate by a disk of radius `r`, returned as its bounding rectangle.
    pub fn inflate(&self, r: f64) -> Self {
        Self::new(self.re.inflate(r), self.im.inflate(r))
    }

    pub fn sqr(&self) -> Self {
        let re = self.re.sqr() - self.im.sqr();
        let im = (self.re * self.im).mul_f(2.0);
        Self::new(re, im)
    }

    /// Enclosure of `{|w| : w ∈ self}` from per-axis magnitude extremes.
    pub fn abs(&self) -> RealInterval {
        let lo = hypot_down(self.re.mig(), self.im.mig());
        let hi = hypot_up(self.re.mag(), self.im.mag());
        RealInterval::raw(lo, hi.max(lo))
    }

    /// `|w|²`, without the square root.
    pub fn norm_sqr(&self) -> RealInterval {
        self.re.sqr() + self.im.sqr()
    }

    fn off_cut(&self) -> Result<(), IntervalError> {
        if self.re.lo() <= 0.0 && self.im.contains_zero() {
            return Err(IntervalError::BranchCutViolation { op: "log" });
        }
        Ok(())
    }

    /// Principal argument. Rejects rectangles meeting `(-∞, 0]`.
    pub fn arg(&self) -> Result<RealInterval, IntervalError> {
        self.off_cut()?;
        if self.im.is_point() && self.im.lo() == 0.0 {
            return Ok(RealInterval::zero());
        }
        let pi_hi = next_up(std::f64::consts::PI);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in [self.re.lo(), self.re.hi()] {
            for y in [self.im.lo(), self.im.hi()] {
                let a = y.atan2(x);
                if y == 0.0 && x > 0.0 {
                    lo = lo.min(0.0);
                    hi = hi.max(0.0);
                } else {
                    lo = lo.min(down_ulps(a, ATAN2_SLACK));
                    hi = hi.max(up_ulps(a, ATAN2_SLACK));
                }
            }
        }
        Ok(RealInterval::raw(lo.max(-pi_hi), hi.min(pi_hi)))
    }

    /// Principal logarithm.
    pub fn log(&self) -> Result<Self, IntervalError> {
        self.off_cut()?;
        let re = self.abs().ln()?;
        Ok(Self::new(re, self.arg()?))
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Self::new(m * self.im.cos(), m * self.im.sin())
    }

    pub fn recip(&self) -> Result<Self, IntervalError> {
        if self.contains_zero() {
            return Err(IntervalError::DivisorContainsZero);
        }
        if self.im.is_point() && self.im.lo() == 0.0 {
            return Ok(Self::real(self.re.recip()?));
        }
        let d = self.norm_sqr();
        Ok(Self::new(self.re.div(&d)?, (-self.im).div(&d)?))
    }

    pub fn div(&self, o: &Self) -> Result<Self, IntervalError> {
        if o.contains_zero() {
            return Err(IntervalError::DivisorContainsZero);
        }
        if o.im.is_point() && o.im.lo() == 0.0 {
            return Ok(Self::new(self.re.div(&o.re)?, self.im.div(&o.re)?));
        }
        let d = o.norm_sqr();
        let num = *self * o.conj();
        Ok(Self::new(num.re.div(&d)?, num.im.div(&d)?))
    }

    /// `w^p` for real `p` on the principal branch.
    pub fn pow_real(&self, p: &RealInterval) -> Result<Self, IntervalError> {
        if p.is_point() {
            let v = p.lo();
            if v == 0.0 {
                return Ok(Self::one());
            }
            if v == 1.0 {
                return Ok(*self);
            }
            if v.fract() == 0.0 && (1.0..=16.0).contains(&v) {
                let mut acc = *self;
                for _ in 1..(v as i32) {
                    acc = acc * *self;
                }
                return Ok(acc);
            }
        }
        Ok((self.log()?.scale(p)).exp())
    }
}

impl Add for ComplexRect {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for ComplexRect {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for ComplexRect {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for ComplexRect {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl fmt::Debug for ComplexRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

impl fmt::Display for ComplexRect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i·{}", self.re, self.im)
    }
}
