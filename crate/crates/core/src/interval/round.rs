//! Directed rounding on top of round-to-nearest kernels.
//!
//! Each `*_down`/`*_up` pair returns a float that is a lower/upper bound of
//! the exact real result. The exactness test uses error-free transforms, so an
//! exactly representable result is returned unchanged.

#[inline]
pub fn next_up(x: f64) -> f64 {
    x.next_up()
}

#[inline]
pub fn next_down(x: f64) -> f64 {
    x.next_down()
}

/// Move `x` down by `n` representable steps.
#[inline]
pub fn down_ulps(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_down();
    }
    x
}

/// Move `x` up by `n` representable steps.
#[inline]
pub fn up_ulps(mut x: f64, n: u32) -> f64 {
    for _ in 0..n {
        x = x.next_up();
    }
    x
}

#[inline]
fn overflow_down(s: f64) -> f64 {
    if s == f64::INFINITY {
        f64::MAX
    } else {
        s
    }
}

#[inline]
fn overflow_up(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        f64::MIN
    } else {
        s
    }
}

/// Sign of the rounding error of `a + b`: exact sum minus computed sum.
#[inline]
fn sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return overflow_down(s);
    }
    if sum_err(a, b, s) < 0.0 {
        next_down(s)
    } else {
        s
    }
}

pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return overflow_up(s);
    }
    if sum_err(a, b, s) > 0.0 {
        next_up(s)
    } else {
        s
    }
}

pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Residual-based direction for a product: +1 if exact > computed, -1 if
/// below, 0 if exact, 2 if the residual is unreliable (tiny results).
#[inline]
fn mul_dir(a: f64, b: f64, p: f64) -> i32 {
    if a == 0.0 || b == 0.0 {
        return 0;
    }
    if p.abs() < f64::MIN_POSITIVE * 4.0 {
        return 2;
    }
    let e = a.mul_add(b, -p);
    if e > 0.0 {
        1
    } else if e < 0.0 {
        -1
    } else {
        0
    }
}

pub fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_nan() {
        // 0 * inf: treat as 0, the only value this kernel uses it for
        return 0.0;
    }
    if !p.is_finite() {
        return overflow_down(p);
    }
    match mul_dir(a, b, p) {
        0 | 1 => p,
        _ => next_down(p),
    }
}

pub fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_nan() {
        return 0.0;
    }
    if !p.is_finite() {
        return overflow_up(p);
    }
    match mul_dir(a, b, p) {
        0 | -1 => p,
        _ => next_up(p),
    }
}

#[inline]
fn div_dir(a: f64, b: f64, q: f64) -> i32 {
    if a == 0.0 {
        return 0;
    }
    if !(q.is_normal() && a.abs() > f64::MIN_POSITIVE * 1e20) {
        return 2;
    }
    // a - q*b is exact here
    let r = (-q).mul_add(b, a);
    let s = r * b.signum();
    if s > 0.0 {
        1
    } else if s < 0.0 {
        -1
    } else {
        0
    }
}

pub fn div_down(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return overflow_down(q);
    }
    match div_dir(a, b, q) {
        0 | 1 => q,
        _ => next_down(q),
    }
}

pub fn div_up(a: f64, b: f64) -> f64 {
    let q = a / b;
    if !q.is_finite() {
        return overflow_up(q);
    }
    match div_dir(a, b, q) {
        0 | -1 => q,
        _ => next_up(q),
    }
}

pub fn sqrt_down(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let r = x.sqrt();
    if x < f64::MIN_POSITIVE * 1e20 || !r.is_finite() {
        return next_down(r).max(0.0);
    }
    if (-r).mul_add(r, x) < 0.0 {
        next_down(r)
    } else {
        r
    }
}

pub fn sqrt_up(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let r = x.sqrt();
    if x < f64::MIN_POSITIVE * 1e20 || !r.is_finite() {
        return next_up(r);
    }
    if (-r).mul_add(r, x) > 0.0 {
        next_up(r)
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_results_stay_exact() {
        assert_eq!(add_down(1.0, 2.0), 3.0);
        assert_eq!(add_up(1.0, 2.0), 3.0);
        assert_eq!(sub_down(2.0, 2.0), 0.0);
        assert_eq!(mul_up(3.0, 0.5), 1.5);
        assert_eq!(div_down(1.0, 4.0), 0.25);
        assert_eq!(sqrt_up(4.0), 2.0);
    }

    #[test]
    fn inexact_results_bracket() {
        let lo = div_down(1.0, 3.0);
        let hi = div_up(1.0, 3.0);
        assert_eq!(next_up(lo), hi);
        assert!(lo * 3.0 <= 1.0 && hi * 3.0 >= 1.0);
        let lo = add_down(0.1, 0.2);
        let hi = add_up(0.1, 0.2);
        assert_eq!(next_up(lo), hi);
        let lo = sqrt_down(2.0);
        let hi = sqrt_up(2.0);
        assert_eq!(next_up(lo), hi);
    }
}
