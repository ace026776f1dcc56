use num_complex::Complex64;
use plcert::interval::{ComplexRect, RealInterval};
use plcert::verifier::{verify_sup, Config, Mode, Region, ZetaKind, ZetaTarget};
use plcert::zeta::{auto_params, f_zeta_auto, zeta_auto, zeta_em, EMParams, ZetaError, MAX_K};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

fn pt(sigma: f64, t: f64) -> ComplexRect {
    ComplexRect::point(sigma, t)
}

fn ulps(x: &RealInterval, n: f64) -> f64 {
    n * f64::EPSILON * x.mag().max(f64::MIN_POSITIVE)
}

#[test]
fn f_at_one_two_and_local_max() {
    let one = f_zeta_auto(&pt(1.0, 0.0)).unwrap();
    assert!(one.contains(1.0, 0.0));
    let two = f_zeta_auto(&pt(2.0, 0.0)).unwrap();
    let half_zeta2 = RealInterval::pi().sqr().div_f(12.0).unwrap();
    assert!(two.re.intersect(&half_zeta2).is_some());
    let m = f_zeta_auto(&pt(1.0, 27.7)).unwrap().abs();
    assert!(m.hi() <= 2.1 && m.lo() > 2.0, "{m}");
}

#[test]
fn real_axis_matches_mpfr() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..300 {
        let sigma: f64 = rng.gen_range(0.2..6.0);
        if (sigma - 1.0).abs() < 1e-3 {
            continue;
        }
        let z = zeta_auto(&pt(sigma, 0.0)).unwrap();
        let r = Float::with_val(192, sigma).zeta().to_f64();
        assert!(z.re.inflate(ulps(&z.re, 1.0)).contains(r), "ζ({sigma}) = {z} vs {r}");
        assert!(z.im.contains(0.0));
    }
}

#[test]
fn auto_params_examples() {
    let p = auto_params(&pt(2.0, 0.0), 1e-12);
    assert!(!p.unreachable);
    assert!(zeta_em(&pt(2.0, 0.0), p.params).unwrap().re.width() < 1e-12);
    let c = auto_params(&pt(1.0, 30.0), 1e-8);
    assert!(c.remainder < 2.5e-9);
    assert!(auto_params(&pt(2.0, 0.0), 1e-300).unreachable);
}

#[test]
fn pole_and_domain_errors() {
    assert_eq!(zeta_auto(&pt(1.0, 0.0)), Err(ZetaError::PoleProximity));
    assert!(matches!(zeta_auto(&pt(-0.5, 3.0)), Err(ZetaError::DomainViolation(_))));
    assert!(matches!(EMParams::new(1, 3), Err(ZetaError::BadParams { .. })));
    assert!(EMParams::new(10, MAX_K + 1).is_err());
}

#[test]
fn doubled_parameters_refine() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut n = 0;
    while n < 1000 {
        let (sigma, t) = (rng.gen_range(0.4..3.0), rng.gen_range(-50.0..50.0));
        if (sigma - 1.0f64).hypot(t) < 0.1 {
            continue;
        }
        n += 1;
        let s = pt(sigma, t);
        let base = auto_params(&s, 1e-10).params;
        let fine = EMParams::new(2 * base.n, (base.k + 2).min(MAX_K)).unwrap();
        let (x, y) = (zeta_em(&s, base).unwrap(), zeta_em(&s, fine).unwrap());
        assert!(x.intersect(&y).is_some(), "ζ({sigma} + {t}i): {x} vs {y}");
        let grown = ComplexRect::new(x.re.inflate(ulps(&x.re, 4.0)), x.im.inflate(ulps(&x.im, 4.0)));
        assert!(grown.contains_rect(&y), "ζ({sigma} + {t}i): {y} not inside {x}");
    }
}

/// Up to the `N` that `auto_params` picks, the truncation remainder dominates
/// the width; past it, accumulated rounding makes the width grow again.
#[test]
fn width_shrinks_with_n() {
    let k = 6;
    for (sigma, t, d) in [(0.5, 14.0, 0.0), (1.5, 3.0, 0.0), (2.0, 40.0, 0.0), (0.8, 0.0, 0.0), (0.5, 50.0, 1e-9), (2.0, 40.0, 1e-9)] {
        let s = ComplexRect::new(RealInterval::new(sigma, sigma + d).unwrap(), RealInterval::new(t, t + d).unwrap());
        let top = auto_params(&s, 1e-8).params.n;
        let mut prev = f64::INFINITY;
        let mut n = 2;
        while n <= top {
            let z = zeta_em(&s, EMParams::new(n, k).unwrap()).unwrap();
            let w = z.re.width().max(z.im.width());
            assert!(w <= prev + 8.0 * f64::EPSILON * z.abs().hi(), "s = {sigma}+{t}i, N = {n}: {w} > {prev}");
            prev = w;
            n += 1;
        }
    }
}

/// Lanczos approximation (g = 7), accurate to about 1e-15 relative.
fn gamma(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let pi = std::f64::consts::PI;
    if z.re < 0.5 {
        return pi / ((pi * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(C[0], 0.0);
    for (i, c) in C.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    (2.0 * pi).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

#[test]
fn functional_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let pi = std::f64::consts::PI;
    for _ in 0..100 {
        let (sigma, t) = (rng.gen_range(0.4..0.9), rng.gen_range(-30.0..30.0));
        let s = Complex64::new(sigma, t);
        let chi = Complex64::new(2.0, 0.0).powc(s) * Complex64::new(pi, 0.0).powc(s - 1.0) * (pi * s / 2.0).sin() * gamma(1.0 - s);
        let z = zeta_auto(&pt(sigma, t)).unwrap();
        let w = zeta_auto(&pt(1.0 - sigma, -t)).unwrap();
        let lhs = Complex64::new(z.re.mid(), z.im.mid()) / chi;
        let tol = 1e-10 * lhs.norm().max(1.0) + (w.re.width() + w.im.width() + z.re.width() + z.im.width()) / chi.norm();
        assert!(
            (lhs.re - w.re.mid()).abs() <= tol + w.re.width() && (lhs.im - w.im.mid()).abs() <= tol + w.im.width(),
            "s = {sigma}+{t}i: ζ(s)/χ(s) = {lhs} vs ζ(1−s) = {w}"
        );
    }
}

#[test]
fn f_at_most_one_on_the_line_one() {
    let region = Region::new((1.0, 1.0), (0.1, 3.0)).unwrap();
    // |f(1+it)| ≈ 1 − 0.26·t² near 0, so 0.999 leaves a visible margin.
    let v = verify_sup(&ZetaTarget::new(ZetaKind::F), region, Mode::FullRegion, 0.999, &Config::default()).unwrap();
    let fact = v.fact().expect("verified");
    assert!(v.is_verified() && fact.margin > 0.0, "{v:?}");
}

#[test]
fn first_zero() {
    let z = zeta_auto(&pt(0.5, 14.134725)).unwrap().abs();
    assert!(z.hi() < 1e-4);
    let z = zeta_auto(&pt(0.5, 14.134725141734693)).unwrap();
    assert!(z.contains_zero(), "{z}");
}
