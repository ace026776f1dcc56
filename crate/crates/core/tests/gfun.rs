use plcert::gfun::{build_catalog, CatalogError, GExpr, Sign};
use plcert::interval::{ComplexRect, RealInterval, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

const PREC: u32 = 200;

fn ex1(i: usize) -> GExpr {
    build_catalog(&format!("Ex1G{i}"), &[], None).unwrap().expr
}

fn catalog_exprs() -> Vec<(String, GExpr)> {
    let mut v: Vec<(String, GExpr)> = (1..=5).map(|i| (format!("G{i}"), ex1(i))).collect();
    v.push(("Ex2G".into(), build_catalog("Ex2G", &[], None).unwrap().expr));
    v.push(("Ex3G".into(), build_catalog("Ex3G", &[], None).unwrap().expr));
    v.push(("Linear".into(), build_catalog("Linear", &[Scalar::int(1)], None).unwrap().expr));
    v
}

#[derive(Clone)]
struct C(Float, Float);

impl C {
    fn add(&self, o: &C) -> C {
        C(Float::with_val(PREC, &self.0 + &o.0), Float::with_val(PREC, &self.1 + &o.1))
    }
    fn scale(&self, k: &Float) -> C {
        C(Float::with_val(PREC, &self.0 * k), Float::with_val(PREC, &self.1 * k))
    }
    fn div(&self, o: &C) -> C {
        let den = Float::with_val(PREC, o.0.square_ref()) + Float::with_val(PREC, o.1.square_ref());
        let re = Float::with_val(PREC, &self.0 * &o.0) + Float::with_val(PREC, &self.1 * &o.1);
        let im = Float::with_val(PREC, &self.1 * &o.0) - Float::with_val(PREC, &self.0 * &o.1);
        C(re / &den, im / den)
    }
    fn log(&self) -> C {
        let m = Float::with_val(PREC, self.0.hypot_ref(&self.1)).ln();
        C(m, Float::with_val(PREC, self.1.atan2_ref(&self.0)))
    }
}

/// `G₄(s)` evaluated independently: `1.731·(L₁+L₂) / (2·log(½(L₁+L₂)))`.
fn g4_reference(sigma: f64, t: f64) -> C {
    let e = Float::with_val(PREC, 1).exp();
    let l1 = C(Float::with_val(PREC, &e + sigma), Float::with_val(PREC, t)).log();
    let l2 = C(Float::with_val(PREC, &e + 2) - sigma, Float::with_val(PREC, -t)).log();
    let sum = l1.add(&l2);
    let half = Float::with_val(PREC, 0.5);
    let den = sum.scale(&half).log().scale(&Float::with_val(PREC, 2));
    let c = Float::with_val(PREC, 1731) / 1000;
    sum.scale(&c).div(&den)
}

fn within(iv: &RealInterval, r: &Float, tol: f64) -> bool {
    let r = r.to_f64();
    iv.lo() <= r + tol && r - tol <= iv.hi()
}

#[test]
fn g4_matches_high_precision_reference() {
    let v = ex1(4).eval(&ComplexRect::point(1.0, 3.0)).unwrap();
    let r = g4_reference(1.0, 3.0);
    assert!(within(&v.re, &r.0, 1e-15) && within(&v.im, &r.1, 1e-15), "{v} vs {} {}", r.0, r.1);
    assert!(v.re.width() < 1e-12 && v.im.width() < 1e-12);
}

#[test]
fn g1_real_point_value() {
    let v = ex1(1).eval(&ComplexRect::point(1.0, 0.0)).unwrap();
    let want = (std::f64::consts::E + 1.0).ln();
    assert!(v.re.contains(want) && v.im.contains(0.0));
}

#[test]
fn affine_is_exact_shift() {
    let g = build_catalog("Linear", &[Scalar::int(1)], None).unwrap().expr;
    let v = g.eval(&ComplexRect::point(1.25, 7.5)).unwrap();
    assert!(v.contains(2.25, 7.5));
}

#[test]
fn abs_of_log_at_real_point() {
    let g = GExpr::affine(Scalar::int(3), Sign::Plus).log();
    let v = g.abs_eval(&ComplexRect::point(2.0, 0.0)).unwrap();
    assert!(v.contains(5f64.ln()));
}

#[test]
fn g1_dominates_log_t() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = ex1(1);
    for _ in 0..1000 {
        let (sigma, t) = (rng.gen_range(1.0..=2.0), rng.gen_range(3.0..1e6));
        let a = g.abs_eval(&ComplexRect::point(sigma, t)).unwrap();
        assert!(a.hi() >= RealInterval::point(t).ln().unwrap().lo(), "σ = {sigma}, t = {t}");
    }
}

#[test]
fn abs_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (name, g) in catalog_exprs() {
        for _ in 0..1250 {
            let s = ComplexRect::point(rng.gen_range(0.5..2.5), rng.gen_range(-100.0..100.0));
            let (Ok(a), Ok(z)) = (g.abs_eval(&s), g.eval(&s)) else { continue };
            assert!(a.intersect(&z.abs()).is_some(), "{name} at {s}");
        }
    }
}

#[test]
fn deriv_of_g2_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = ex1(2);
    let d = g.deriv();
    let h = 1e-5;
    for _ in 0..20 {
        let (sigma, t) = (rng.gen_range(1.0..2.0), rng.gen_range(-50.0..50.0));
        let at = |x: f64| g.eval(&ComplexRect::point(x, t)).unwrap().mid();
        let (p, m) = (at(sigma + h), at(sigma - h));
        let fd = ((p.re.mid() - m.re.mid()) / (2.0 * h), (p.im.mid() - m.im.mid()) / (2.0 * h));
        let v = d.eval(&ComplexRect::point(sigma, t)).unwrap();
        let (dr, di) = (v.re.mid() - fd.0, v.im.mid() - fd.1);
        let rel = dr.hypot(di) / v.re.mid().hypot(v.im.mid());
        assert!(rel < 1e-6, "σ = {sigma}, t = {t}: relative {rel}");
    }
}

#[test]
fn deriv_rules() {
    let q = Scalar::parse("e").unwrap();
    let lin = GExpr::affine(q.clone(), Sign::Plus);
    assert_eq!(lin.deriv(), GExpr::Const(Scalar::int(1)));
    let log = lin.clone().log();
    assert_eq!(log.deriv(), GExpr::Const(Scalar::int(1)).over(lin));
}

#[test]
fn conjugate_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let exprs = catalog_exprs();
    for k in 0..10_000 {
        let (name, g) = &exprs[k % exprs.len()];
        let (sigma, t) = (rng.gen_range(0.5..2.5), rng.gen_range(-100.0..100.0));
        let (Ok(z), Ok(w)) = (g.eval(&ComplexRect::point(sigma, t)), g.eval(&ComplexRect::point(sigma, -t))) else {
            continue;
        };
        assert!(w.contains_rect(&z.conj()) && z.conj().contains_rect(&w), "{name} at {sigma}±{t}i");
        assert!(g.conjugate_symmetric());
    }
}

#[test]
fn symlog_sum_matches_log_of_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let g = ex1(1);
    let e = RealInterval::e();
    for _ in 0..2000 {
        let (sigma, t) = (rng.gen_range(1.0..2.0), rng.gen_range(-20.0..20.0));
        let s = ComplexRect::point(sigma, t);
        let prod = (ComplexRect::real(e) + s) * (ComplexRect::real(e.add_f(2.0)) - s);
        let Ok(l) = prod.log() else { continue };
        let other = l.scale(&RealInterval::point(0.5));
        let v = g.eval(&s).unwrap();
        assert!(v.intersect(&other).is_some(), "σ = {sigma}, t = {t}: {v} vs {other}");
        let ulps = 8.0 * f64::EPSILON * (v.re.mag() + v.im.mag() + 1.0);
        assert!(v.re.width() < ulps && v.im.width() < ulps);
    }
}

#[test]
fn quotient_domain_reported() {
    let g4 = ex1(4);
    // On the real axis left of −e the first logarithm meets its cut.
    let err = g4.eval(&ComplexRect::point(-3.0, 0.0)).unwrap_err();
    assert!(err.is_branch_cut(), "{err}");
}

#[test]
fn catalog_rejects_bad_symlog_strip() {
    let (a, b) = (Scalar::int(0), Scalar::int(5));
    let e = build_catalog("Ex1G1", &[], Some((&a, &b))).unwrap_err();
    assert!(matches!(e, CatalogError::BadBuilderParams { .. }));
    assert!(matches!(build_catalog("Nope", &[], None), Err(CatalogError::Unknown(_))));
}

#[test]
fn text_round_trip() {
    for (name, g) in catalog_exprs() {
        let text = g.to_string();
        assert_eq!(GExpr::parse(&text).unwrap(), g, "{name}");
    }
}

fn rect(sigma: f64, t: f64, ws: f64, wt: f64) -> ComplexRect {
    ComplexRect::new(RealInterval::new(sigma, sigma + ws).unwrap(), RealInterval::new(t, t + wt).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn abs_eval_inclusion_isotone(
        i in 1usize..=5, sigma in 1.0f64..2.0, t in 3.0f64..1e4,
        ws in 0.0f64..0.5, wt in 0.0f64..5.0, fs in 0.0f64..1.0, ft in 0.0f64..1.0,
    ) {
        let g = ex1(i);
        let big = rect(sigma, t, ws, wt);
        let small = rect(sigma + fs * ws * 0.5, t + ft * wt * 0.5, ws * 0.25, wt * 0.25);
        let (a, b) = (g.abs_eval(&small).unwrap(), g.abs_eval(&big).unwrap());
        let slack = 8.0 * f64::EPSILON * b.mag();
        prop_assert!(b.lo() - slack <= a.lo() && a.hi() <= b.hi() + slack);
    }

    #[test]
    fn deriv_is_linear_over_sums(i in 1usize..=5, j in 1usize..=5) {
        let (g, h) = (ex1(i), ex1(j));
        let sum = GExpr::Sum(vec![g.clone(), h.clone()]);
        prop_assert_eq!(sum.deriv(), GExpr::Sum(vec![g.deriv(), h.deriv()]));
    }
}
