//! MPFR reference values and random enclosure inputs shared by the
//! property suites.

#![allow(dead_code)]

use plcert::interval::{ComplexRect, RealInterval};
use rand::Rng;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

pub const PREC: u32 = 192;

fn fl(x: f64) -> Float {
    Float::with_val(PREC, x)
}

/// `true` when `r` lies in `iv`, with a relative slack far below one ulp of
/// binary64 so that rounding of the reference cannot cause a false alarm.
pub fn encloses(iv: &RealInterval, r: &Float) -> bool {
    if r.is_nan() {
        return false;
    }
    let slack = Float::with_val(PREC, r.abs_ref()) * Float::with_val(PREC, Float::i_exp(1, -160)) + Float::with_val(PREC, Float::i_exp(1, -1060));
    let lo = Float::with_val(PREC, r - &slack);
    let hi = Float::with_val(PREC, r + &slack);
    !(hi < iv.lo() || lo > iv.hi())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqr,
    Recip,
    Abs,
    Sqrt,
    Exp,
    ExpM1,
    Ln,
    Ln1p,
    Atan,
    Atanc,
    Sqrt1pm1,
    Ln1pC,
    Sin,
    Cos,
    Powi(i32),
    PowReal,
}

pub const REAL_OPS: [RealOp; 20] = [
    RealOp::Add,
    RealOp::Sub,
    RealOp::Mul,
    RealOp::Div,
    RealOp::Sqr,
    RealOp::Recip,
    RealOp::Abs,
    RealOp::Sqrt,
    RealOp::Exp,
    RealOp::ExpM1,
    RealOp::Ln,
    RealOp::Ln1p,
    RealOp::Atan,
    RealOp::Atanc,
    RealOp::Sqrt1pm1,
    RealOp::Ln1pC,
    RealOp::Sin,
    RealOp::Cos,
    RealOp::Powi(-3),
    RealOp::PowReal,
];

impl RealOp {
    pub fn binary(self) -> bool {
        matches!(self, RealOp::Add | RealOp::Sub | RealOp::Mul | RealOp::Div | RealOp::PowReal)
    }

    pub fn eval(self, x: &RealInterval, y: &RealInterval) -> Option<RealInterval> {
        match self {
            RealOp::Add => Some(*x + *y),
            RealOp::Sub => Some(*x - *y),
            RealOp::Mul => Some(*x * *y),
            RealOp::Div => x.div(y).ok(),
            RealOp::Sqr => Some(x.sqr()),
            RealOp::Recip => x.recip().ok(),
            RealOp::Abs => Some(x.abs()),
            RealOp::Sqrt => x.sqrt().ok(),
            RealOp::Exp => Some(x.exp()),
            RealOp::ExpM1 => Some(x.exp_m1()),
            RealOp::Ln => x.ln().ok(),
            RealOp::Ln1p => x.ln_1p().ok(),
            RealOp::Atan => Some(x.atan()),
            RealOp::Atanc => Some(x.atanc()),
            RealOp::Sqrt1pm1 => x.sqrt1pm1().ok(),
            RealOp::Ln1pC => x.ln_1p_c().ok(),
            RealOp::Sin => Some(x.sin()),
            RealOp::Cos => Some(x.cos()),
            RealOp::Powi(n) => x.powi(n).ok(),
            RealOp::PowReal => x.pow_real(y).ok(),
        }
    }

    /// Exact value at a point, or `None` outside the domain.
    pub fn reference(self, x: f64, y: f64) -> Option<Float> {
        let (a, b) = (fl(x), fl(y));
        let r = match self {
            RealOp::Add => a + b,
            RealOp::Sub => a - b,
            RealOp::Mul => a * b,
            RealOp::Div => {
                if y == 0.0 {
                    return None;
                }
                a / b
            }
            RealOp::Sqr => a.square(),
            RealOp::Recip => {
                if x == 0.0 {
                    return None;
                }
                a.recip()
            }
            RealOp::Abs => a.abs(),
            RealOp::Sqrt => {
                if x < 0.0 {
                    return None;
                }
                a.sqrt()
            }
            RealOp::Exp => a.exp(),
            RealOp::ExpM1 => a.exp_m1(),
            RealOp::Ln => {
                if x <= 0.0 {
                    return None;
                }
                a.ln()
            }
            RealOp::Ln1p => {
                if x <= -1.0 {
                    return None;
                }
                a.ln_1p()
            }
            RealOp::Atan => a.atan(),
            RealOp::Atanc => {
                if x == 0.0 {
                    fl(1.0)
                } else {
                    a.clone().atan() / a
                }
            }
            RealOp::Sqrt1pm1 => {
                if x < -1.0 {
                    return None;
                }
                (a + 1u32).sqrt() - 1u32
            }
            RealOp::Ln1pC => {
                if x <= -1.0 {
                    return None;
                }
                if x == 0.0 {
                    fl(1.0)
                } else {
                    a.clone().ln_1p() / a
                }
            }
            RealOp::Sin => a.sin(),
            RealOp::Cos => a.cos(),
            RealOp::Powi(n) => {
                if x == 0.0 && n < 0 {
                    return None;
                }
                a.pow(n)
            }
            RealOp::PowReal => {
                if x < 0.0 || (x == 0.0 && y <= 0.0) {
                    return None;
                }
                if x == 0.0 {
                    fl(0.0)
                } else {
                    a.pow(b)
                }
            }
        };
        Some(r)
    }

    /// Input ranges where the operation is meaningful and finite.
    pub fn input(self, rng: &mut impl Rng) -> (RealInterval, RealInterval) {
        let any = |rng: &mut _| random_interval(rng, -12, 12, true);
        match self {
            RealOp::Exp | RealOp::ExpM1 => (random_interval(rng, -12, 9, true), any(rng)),
            RealOp::Sqrt | RealOp::Ln => (random_interval(rng, -12, 12, false), any(rng)),
            RealOp::Ln1p | RealOp::Ln1pC | RealOp::Sqrt1pm1 => {
                let x = random_interval(rng, -12, 6, false);
                let shifted = RealInterval::new(x.lo() - 1.0, x.hi() - 1.0).unwrap();
                (if rng.gen_bool(0.5) { shifted } else { x }, any(rng))
            }
            RealOp::Sin | RealOp::Cos => (random_interval(rng, -12, 25, true), any(rng)),
            RealOp::PowReal => (random_interval(rng, -6, 6, false), random_interval(rng, -6, 3, true)),
            RealOp::Powi(_) => (random_interval(rng, -6, 6, true), any(rng)),
            _ => (any(rng), any(rng)),
        }
    }
}

/// `m·2^e` with `e` uniform in `[emin, emax]`.
pub fn random_f64(rng: &mut impl Rng, emin: i32, emax: i32, signed: bool) -> f64 {
    let m: f64 = rng.gen_range(1.0..2.0);
    let e = rng.gen_range(emin..=emax);
    let x = m * 2f64.powi(e);
    if signed && rng.gen_bool(0.5) {
        -x
    } else {
        x
    }
}

/// Points, ulp-wide, relatively narrow, wide and zero-straddling intervals.
pub fn random_interval(rng: &mut impl Rng, emin: i32, emax: i32, signed: bool) -> RealInterval {
    let c = random_f64(rng, emin, emax, signed);
    let iv = match rng.gen_range(0..5) {
        0 => (c, c),
        1 => {
            let k = rng.gen_range(1..64);
            let mut hi = c;
            for _ in 0..k {
                hi = hi.next_up();
            }
            (c, hi)
        }
        2 => {
            let w = c.abs() * 10f64.powi(-rng.gen_range(1..16));
            (c, c + w)
        }
        3 => {
            let d = random_f64(rng, emin, emax, signed);
            (c.min(d), c.max(d))
        }
        _ => {
            if signed {
                let d = random_f64(rng, emin, emax, false);
                (-c.abs(), d)
            } else {
                let d = random_f64(rng, emin, emax, false);
                (c.min(d), c.max(d))
            }
        }
    };
    RealInterval::new(iv.0, iv.1).unwrap()
}

/// Endpoints and an interior point.
pub fn sample_points(rng: &mut impl Rng, x: &RealInterval) -> [f64; 3] {
    let t: f64 = rng.gen();
    let m = x.lo() + t * (x.hi() - x.lo());
    [x.lo(), x.hi(), m.clamp(x.lo(), x.hi())]
}

/// One contained point: an endpoint half of the time, otherwise interior.
pub fn one_point(rng: &mut impl Rng, x: &RealInterval) -> f64 {
    match rng.gen_range(0..4) {
        0 => x.lo(),
        1 => x.hi(),
        _ => sample_points(rng, x)[2],
    }
}

/// Single-point containment check used by the large fuzz runs.
pub fn fuzz_real(op: RealOp, x: &RealInterval, y: &RealInterval, rng: &mut impl Rng) -> Option<String> {
    let out = op.eval(x, y)?;
    let (px, py) = (one_point(rng, x), if op.binary() { one_point(rng, y) } else { y.lo() });
    let r = op.reference(px, py)?;
    if r.is_finite() && !encloses(&out, &r) {
        return Some(format!("{op:?}({x:?}, {y:?}) = {out:?} misses {r} at ({px:e}, {py:e})"));
    }
    None
}

/// Returns a description of the first containment violation.
pub fn check_real(op: RealOp, x: &RealInterval, y: &RealInterval, rng: &mut impl Rng) -> Option<String> {
    let out = op.eval(x, y)?;
    let ys = if op.binary() { sample_points(rng, y) } else { [y.lo(); 3] };
    for px in sample_points(rng, x) {
        for &py in &ys {
            if let Some(r) = op.reference(px, py) {
                if !r.is_finite() {
                    continue;
                }
                if !encloses(&out, &r) {
                    return Some(format!("{op:?}({x:?}, {y:?}) = {out:?} misses {r} at ({px:e}, {py:e})"));
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexOp {
    Add,
    Mul,
    Div,
    Sqr,
    Exp,
    Log,
    Abs,
    Arg,
    PowReal,
}

pub const COMPLEX_OPS: [ComplexOp; 9] = [
    ComplexOp::Add,
    ComplexOp::Mul,
    ComplexOp::Div,
    ComplexOp::Sqr,
    ComplexOp::Exp,
    ComplexOp::Log,
    ComplexOp::Abs,
    ComplexOp::Arg,
    ComplexOp::PowReal,
];

pub fn random_rect(rng: &mut impl Rng, emin: i32, emax: i32) -> ComplexRect {
    ComplexRect::new(random_interval(rng, emin, emax, true), random_interval(rng, emin, emax, true))
}

fn atan2(y: &Float, x: &Float) -> Float {
    Float::with_val(PREC, y.atan2_ref(x))
}

impl ComplexOp {
    pub fn input(self, rng: &mut impl Rng) -> (ComplexRect, ComplexRect) {
        match self {
            ComplexOp::Exp => (
                ComplexRect::new(random_interval(rng, -12, 8, true), random_interval(rng, -12, 20, true)),
                random_rect(rng, -12, 12),
            ),
            ComplexOp::PowReal => (random_rect(rng, -8, 8), ComplexRect::real(random_interval(rng, -6, 2, true))),
            _ => (random_rect(rng, -12, 12), random_rect(rng, -12, 12)),
        }
    }

    /// Enclosures of the real and imaginary parts (imaginary is `0` for
    /// real-valued operations).
    pub fn eval(self, z: &ComplexRect, w: &ComplexRect) -> Option<ComplexRect> {
        match self {
            ComplexOp::Add => Some(*z + *w),
            ComplexOp::Mul => Some(*z * *w),
            ComplexOp::Div => z.div(w).ok(),
            ComplexOp::Sqr => Some(z.sqr()),
            ComplexOp::Exp => Some(z.exp()),
            ComplexOp::Log => z.log().ok(),
            ComplexOp::Abs => Some(ComplexRect::real(z.abs())),
            ComplexOp::Arg => z.arg().ok().map(ComplexRect::real),
            ComplexOp::PowReal => z.pow_real(&w.re).ok(),
        }
    }

    pub fn reference(self, z: (f64, f64), w: (f64, f64)) -> Option<(Float, Float)> {
        let (a, b, c, d) = (fl(z.0), fl(z.1), fl(w.0), fl(w.1));
        let zero = || fl(0.0);
        Some(match self {
            ComplexOp::Add => (a + c, b + d),
            ComplexOp::Mul => {
                let re = Float::with_val(PREC, &a * &c) - Float::with_val(PREC, &b * &d);
                let im = Float::with_val(PREC, &a * &d) + Float::with_val(PREC, &b * &c);
                (re, im)
            }
            ComplexOp::Div => {
                if w == (0.0, 0.0) {
                    return None;
                }
                let den = Float::with_val(PREC, c.square_ref()) + Float::with_val(PREC, d.square_ref());
                let re = (Float::with_val(PREC, &a * &c) + Float::with_val(PREC, &b * &d)) / &den;
                let im = (Float::with_val(PREC, &b * &c) - Float::with_val(PREC, &a * &d)) / &den;
                (re, im)
            }
            ComplexOp::Sqr => {
                let re = Float::with_val(PREC, a.square_ref()) - Float::with_val(PREC, b.square_ref());
                let im = Float::with_val(PREC, &a * &b) * 2u32;
                (re, im)
            }
            ComplexOp::Exp => {
                let m = a.exp();
                (Float::with_val(PREC, &m * &Float::with_val(PREC, b.cos_ref())), m * b.sin())
            }
            ComplexOp::Log => {
                if z.1 == 0.0 && z.0 <= 0.0 {
                    return None;
                }
                (Float::with_val(PREC, a.hypot_ref(&b)).ln(), atan2(&b, &a))
            }
            ComplexOp::Abs => (a.hypot(&b), zero()),
            ComplexOp::Arg => {
                if z.1 == 0.0 && z.0 <= 0.0 {
                    return None;
                }
                (atan2(&b, &a), zero())
            }
            ComplexOp::PowReal => {
                if z == (0.0, 0.0) {
                    return None;
                }
                let l = Float::with_val(PREC, a.hypot_ref(&b)).ln();
                let t = atan2(&b, &a);
                let m = (l * &c).exp();
                let ang = t * &c;
                (Float::with_val(PREC, &m * &Float::with_val(PREC, ang.cos_ref())), m * ang.sin())
            }
        })
    }
}

pub fn check_complex(op: ComplexOp, z: &ComplexRect, w: &ComplexRect, rng: &mut impl Rng) -> Option<String> {
    let out = op.eval(z, w)?;
    let binary = matches!(op, ComplexOp::Add | ComplexOp::Mul | ComplexOp::Div | ComplexOp::PowReal);
    let (r, i) = (sample_points(rng, &z.re), sample_points(rng, &z.im));
    let zs = [(r[0], i[0]), (r[1], i[1]), (r[0], i[1]), (r[1], i[0]), (r[2], i[2])];
    let ws: Vec<(f64, f64)> = if binary {
        let im = if op == ComplexOp::PowReal { [0.0; 3] } else { sample_points(rng, &w.im) };
        sample_points(rng, &w.re).into_iter().zip(im).collect()
    } else {
        vec![(0.0, 0.0)]
    };
    for &pz in &zs {
        for &pw in &ws {
            if let Some((re, im)) = op.reference(pz, pw) {
                if !re.is_finite() || !im.is_finite() {
                    continue;
                }
                if !encloses(&out.re, &re) || !encloses(&out.im, &im) {
                    return Some(format!("{op:?}({z:?}, {w:?}) = {out:?} misses ({re}, {im}) at {pz:?}, {pw:?}"));
                }
            }
        }
    }
    None
}

/// Single-point containment check used by the large fuzz runs.
pub fn fuzz_complex(op: ComplexOp, z: &ComplexRect, w: &ComplexRect, rng: &mut impl Rng) -> Option<String> {
    let out = op.eval(z, w)?;
    let pz = (one_point(rng, &z.re), one_point(rng, &z.im));
    let pw = match op {
        ComplexOp::PowReal => (one_point(rng, &w.re), 0.0),
        ComplexOp::Add | ComplexOp::Mul | ComplexOp::Div => (one_point(rng, &w.re), one_point(rng, &w.im)),
        _ => (0.0, 0.0),
    };
    let (re, im) = op.reference(pz, pw)?;
    if re.is_finite() && im.is_finite() && (!encloses(&out.re, &re) || !encloses(&out.im, &im)) {
        return Some(format!("{op:?}({z:?}, {w:?}) = {out:?} misses ({re}, {im}) at {pz:?}, {pw:?}"));
    }
    None
}

/// `π` at working precision, for branch-cut checks.
pub fn pi() -> Float {
    Float::with_val(PREC, Constant::Pi)
}
