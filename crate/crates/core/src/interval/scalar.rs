//! Exact scalars of the form `r + c·e` or `log r` with rational `r`, `c`,
//! carried with their tightest binary64 enclosure.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::round::{next_down, next_up};
use super::RealInterval;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot parse scalar {text:?} at byte {pos}: {msg}")]
pub struct ScalarParseError {
    pub text: String,
    pub pos: usize,
    pub msg: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Exact {
    r: BigRational,
    ce: BigRational,
}

/// A real parameter. Literals stay exact where possible; `iv` always
/// encloses the exact value.
#[derive(Clone, PartialEq)]
pub struct Scalar {
    iv: RealInterval,
    exact: Option<Exact>,
    /// `Some(r)` when the value is exactly `ln r`.
    log_of: Option<BigRational>,
}

fn cmp_float(f: f64, r: &BigRational) -> Ordering {
    BigRational::from_float(f).expect("finite").cmp(r)
}

/// Tightest binary64 interval containing an exact rational.
pub(crate) fn rational_interval(r: &BigRational) -> RealInterval {
    let mut f = r.to_f64().unwrap_or(0.0);
    if !f.is_finite() {
        f = if r.is_negative() { f64::MIN } else { f64::MAX };
    }
    match cmp_float(f, r) {
        Ordering::Equal => RealInterval::point(f),
        Ordering::Less => {
            let mut lo = f;
            while cmp_float(next_up(lo), r) == Ordering::Less {
                lo = next_up(lo);
            }
            let hi = next_up(lo);
            if cmp_float(hi, r) == Ordering::Equal {
                RealInterval::point(hi)
            } else {
                RealInterval::raw(lo, hi)
            }
        }
        Ordering::Greater => {
            let mut hi = f;
            while cmp_float(next_down(hi), r) == Ordering::Greater {
                hi = next_down(hi);
            }
            let lo = next_down(hi);
            if cmp_float(lo, r) == Ordering::Equal {
                RealInterval::point(lo)
            } else {
                RealInterval::raw(lo, hi)
            }
        }
    }
}

fn exact_interval(x: &Exact) -> RealInterval {
    let r = rational_interval(&x.r);
    if x.ce.is_zero() {
        r
    } else {
        r + rational_interval(&x.ce) * RealInterval::e()
    }
}

fn render_rational(q: &BigRational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    // terminating decimals are written as decimals
    let mut d = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut k2 = 0u32;
    let mut k5 = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        k2 += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        k5 += 1;
    }
    if d.is_one() && k2.max(k5) <= 40 {
        let k = k2.max(k5);
        let scaled = q * BigRational::from_integer(BigInt::from(10).pow(k));
        let n = scaled.to_integer();
        let neg = n.is_negative();
        let digits = n.abs().to_string();
        let digits = format!("{:0>width$}", digits, width = k as usize + 1);
        let (ip, fp) = digits.split_at(digits.len() - k as usize);
        return format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp);
    }
    format!("{}/{}", q.numer(), q.denom())
}

impl Scalar {
    pub fn from_interval(iv: RealInterval) -> Self {
        Self { iv, exact: None, log_of: None }
    }

    pub fn from_rational(r: BigRational) -> Self {
        let x = Exact { r, ce: BigRational::zero() };
        Self { iv: exact_interval(&x), exact: Some(x), log_of: None }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(p.into(), q.into()))
    }

    pub fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    /// `r + c·e`.
    pub fn with_e(r: BigRational, ce: BigRational) -> Self {
        let x = Exact { r, ce };
        Self { iv: exact_interval(&x), exact: Some(x), log_of: None }
    }

    /// `ln r` for a positive rational `r`; `ln 1` collapses to the exact zero.
    pub fn ln_of(r: BigRational) -> Option<Self> {
        if !r.is_positive() {
            return None;
        }
        if r.is_one() {
            return Some(Self::int(0));
        }
        let iv = rational_interval(&r).ln().ok()?;
        Some(Self { iv, exact: None, log_of: Some(r) })
    }

    /// `r` when this scalar is exactly `ln r`.
    pub fn log_argument(&self) -> Option<&BigRational> {
        self.log_of.as_ref()
    }

    pub fn euler() -> Self {
        Self::with_e(BigRational::zero(), BigRational::one())
    }

    pub fn iv(&self) -> RealInterval {
        self.iv
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The exact rational value, if this scalar is rational.
    pub fn rational(&self) -> Option<BigRational> {
        self.exact.as_ref().filter(|x| x.ce.is_zero()).map(|x| x.r.clone())
    }

    pub fn neg(&self) -> Self {
        match &self.exact {
            Some(x) => Self::with_e(-x.r.clone(), -x.ce.clone()),
            None => Self::from_interval(-self.iv),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => Self::with_e(&a.r + &b.r, &a.ce + &b.ce),
            _ => Self::from_interval(self.iv + o.iv),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) if a.ce.is_zero() || b.ce.is_zero() => {
                let (k, x) = if a.ce.is_zero() { (&a.r, b) } else { (&b.r, a) };
                Self::with_e(k * &x.r, k * &x.ce)
            }
            _ => Self::from_interval(self.iv * o.iv),
        }
    }

    /// Division; exact when the divisor is a nonzero rational.
    pub fn div(&self, o: &Self) -> Option<Self> {
        match (&self.exact, o.rational()) {
            (Some(a), Some(q)) if !q.is_zero() => Some(Self::with_e(&a.r / &q, &a.ce / &q)),
            _ => self.iv.div(&o.iv).ok().map(Self::from_interval),
        }
    }

    /// Exact sign if known, else from the enclosure.
    pub fn sign(&self) -> Option<Ordering> {
        if let Some(q) = self.rational() {
            return Some(q.cmp(&BigRational::zero()));
        }
        if self.iv.lo() > 0.0 {
            Some(Ordering::Greater)
        } else if self.iv.hi() < 0.0 {
            Some(Ordering::Less)
        } else if self.iv == RealInterval::zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Parse `r`, `p/q`, decimals, `e`, `c*e`, `pi`, `log(r)`, `[lo, hi]` and
    /// sums of these.
    pub fn parse(text: &str) -> Result<Self, ScalarParseError> {
        Parser { s: text.as_bytes(), pos: 0, text }.parse_sum()
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ScalarParseError {
        ScalarParseError { text: self.text.to_string(), pos: self.pos, msg: msg.to_string() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn parse_sum(&mut self) -> Result<Scalar, ScalarParseError> {
        self.ws();
        let mut acc: Option<Scalar> = None;
        let mut sign = 1;
        if self.peek() == Some(b'-') {
            sign = -1;
            self.pos += 1;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        loop {
            let t = self.parse_term()?;
            let t = if sign > 0 { t } else { t.neg() };
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t),
            });
            self.ws();
            match self.peek() {
                None => return Ok(acc.expect("at least one term")),
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Err(self.err("expected '+', '-' or end")),
            }
            self.pos += 1;
        }
    }

    fn parse_term(&mut self) -> Result<Scalar, ScalarParseError> {
        self.ws();
        match self.peek() {
            Some(b'[') => return self.parse_interval(),
            Some(b'e') => {
                self.pos += 1;
                return Ok(Scalar::euler());
            }
            Some(b'p') => {
                if self.s[self.pos..].starts_with(b"pi") {
                    self.pos += 2;
                    return Ok(Scalar::from_interval(RealInterval::pi()));
                }
                return Err(self.err("unknown identifier"));
            }
            Some(b'l') => {
                if !self.s[self.pos..].starts_with(b"log(") {
                    return Err(self.err("unknown identifier"));
                }
                self.pos += 4;
                self.ws();
                let r = self.parse_rational()?;
                self.ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                return Scalar::ln_of(r).ok_or_else(|| self.err("log needs a positive argument"));
            }
            _ => {}
        }
        let q = self.parse_rational()?;
        self.ws();
        if self.peek() == Some(b'*') {
            self.pos += 1;
            self.ws();
            if self.peek() == Some(b'e') {
                self.pos += 1;
                return Ok(Scalar::with_e(BigRational::zero(), q));
            }
            if self.s[self.pos..].starts_with(b"pi") {
                self.pos += 2;
                return Ok(Scalar::from_rational(q).mul(&Scalar::from_interval(RealInterval::pi())));
            }
            return Err(self.err("expected 'e' or 'pi' after '*'"));
        }
        Ok(Scalar::from_rational(q))
    }

    fn parse_interval(&mut self) -> Result<Scalar, ScalarParseError> {
        self.pos += 1;
        let close = self.s[self.pos..]
            .iter()
            .position(|&c| c == b']')
            .ok_or_else(|| self.err("unterminated interval"))?;
        let body = &self.text[self.pos..self.pos + close];
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(self.err("interval needs two endpoints"));
        }
        let p = |x: &str| x.parse::<f64>().map_err(|_| self.err("bad endpoint"));
        let iv = RealInterval::new(p(parts[0])?, p(parts[1])?).map_err(|_| self.err("lo > hi"))?;
        self.pos += close + 1;
        Ok(if iv.is_point() {
            Scalar::from_rational(BigRational::from_float(iv.lo()).expect("finite"))
        } else {
            Scalar::from_interval(iv)
        })
    }

    fn parse_decimal(&mut self) -> Result<BigRational, ScalarParseError> {
        let start = self.pos;
        let mut digits = String::new();
        let mut frac_len = 0i64;
        let mut seen_dot = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c as char);
                if seen_dot {
                    frac_len += 1;
                }
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        if digits.is_empty() {
            self.pos = start;
            return Err(self.err("expected number"));
        }
        let mut exp10 = -frac_len;
        // scientific exponent only when a digit follows
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            let mut p = self.pos + 1;
            let mut neg = false;
            if matches!(self.s.get(p), Some(b'+') | Some(b'-')) {
                neg = self.s[p] == b'-';
                p += 1;
            }
            let ds = p;
            while self.s.get(p).is_some_and(|c| c.is_ascii_digit()) {
                p += 1;
            }
            if p > ds {
                let e: i64 = self.text[ds..p].parse().map_err(|_| self.err("bad exponent"))?;
                exp10 += if neg { -e } else { e };
                self.pos = p;
            } else {
                self.pos = save;
            }
        }
        let m: BigInt = digits.parse().expect("digits");
        let ten = BigInt::from(10);
        Ok(if exp10 >= 0 {
            BigRational::from_integer(m * ten.pow(exp10 as u32))
        } else {
            BigRational::new(m, ten.pow((-exp10) as u32))
        })
    }

    fn parse_rational(&mut self) -> Result<BigRational, ScalarParseError> {
        let n = self.parse_decimal()?;
        self.ws();
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.ws();
            let d = self.parse_decimal()?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            return Ok(n / d);
        }
        Ok(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = &self.log_of {
            return write!(f, "log({})", render_rational(r));
        }
        match &self.exact {
            None => write!(f, "[{}, {}]", self.iv.lo(), self.iv.hi()),
            Some(x) => {
                let mut out = String::new();
                if !x.ce.is_zero() {
                    if x.ce.is_one() {
                        out.push('e');
                    } else if (-x.ce.clone()).is_one() {
                        out.push_str("-e");
                    } else {
                        out.push_str(&format!("{}*e", render_rational(&x.ce)));
                    }
                }
                if !x.r.is_zero() || out.is_empty() {
                    let r = render_rational(&x.r);
                    if out.is_empty() {
                        out = r;
                    } else if x.r.is_negative() {
                        out.push_str(&r);
                    } else {
                        out.push('+');
                        out.push_str(&r);
                    }
                }
                f.write_str(&out)
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self} ⊆ {:?})", self.iv)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            _ => return Err(serde::de::Error::custom("expected a number or scalar string")),
        };
        Scalar::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_is_tight() {
        let s = Scalar::parse("1.93").unwrap();
        let iv = s.iv();
        assert!(!iv.is_point());
        assert_eq!(next_up(iv.lo()), iv.hi());
        assert!(iv.contains(1.93));
        let s = Scalar::parse("0.5").unwrap();
        assert!(s.iv().is_point());
    }

    #[test]
    fn fraction_five_sevenths() {
        let s = Scalar::parse("5/7").unwrap();
        assert_eq!(next_up(s.iv().lo()), s.iv().hi());
        assert_eq!(s.to_string(), "5/7");
    }

    #[test]
    fn euler_forms() {
        let s = Scalar::parse("4*e+2").unwrap();
        assert_eq!(s.to_string(), "4*e+2");
        let w = Scalar::parse("e+2").unwrap().sub(&Scalar::parse("e").unwrap());
        assert_eq!(w.rational(), Some(BigRational::from_integer(2.into())));
        assert!(Scalar::parse("1e5").unwrap().iv().is_point());
        assert_eq!(Scalar::parse("1e5").unwrap().iv().lo(), 1e5);
    }

    #[test]
    fn log_form() {
        let s = Scalar::parse("log(1.546)").unwrap();
        assert_eq!(s.log_argument(), Some(&BigRational::new(1546.into(), 1000.into())));
        assert!(s.iv().contains(1.546f64.ln()));
        assert_eq!(Scalar::parse("log(1)").unwrap(), Scalar::int(0));
        assert!(Scalar::parse("log(0)").is_err());
        assert!(s.add(&Scalar::int(1)).log_argument().is_none());
    }

    #[test]
    fn text_roundtrip() {
        for t in ["1.93", "-44.02", "27/164", "e", "-e+1/3", "1.731", "[1, 2]", "58.096", "pi", "log(1.546)"] {
            let a = Scalar::parse(t).unwrap();
            let b = Scalar::parse(&a.to_string()).unwrap();
            assert_eq!(a, b, "{t}");
            assert_eq!(a.to_string(), b.to_string());
        }
    }
}
