use std::path::PathBuf;

use plcert::interval::Scalar;
use plcert::job::{load_jobspec, parse_jobspec, CurveSpec, JobError, JobKind, JobSpec, PointSpec, RegionSpec};
use plcert::report::{bound_curve, curve_csv};
use plcert::run::run_job;
use plcert::theorem::{certify_strip, FTarget};
use plcert::verifier::{Config, Mode};

fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn shipped() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(specs_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    assert!(!v.is_empty());
    v
}

#[test]
fn shipped_specs_round_trip() {
    for p in shipped() {
        let first = load_jobspec(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display())).to_json();
        let second = parse_jobspec(&first).unwrap().to_json();
        assert_eq!(first, second, "{}", p.display());
        assert_eq!(first, std::fs::read_to_string(&p).unwrap(), "{} is not in normal form", p.display());
    }
}

#[test]
fn decimals_become_exact_or_outward() {
    let text = std::fs::read_to_string(specs_dir().join("example2-certify.json")).unwrap();
    let spec = parse_jobspec(&text).unwrap();
    let h = spec.strip_hypotheses().unwrap().unwrap();
    assert_eq!(h.a, Scalar::ratio(5, 7));
    let a = h.factors[0].alpha.iv();
    assert!(a.contains(1.546f64.ln()) && a.width() < 1e-15);
    let p = Scalar::parse("0.1").unwrap();
    assert_eq!(p, Scalar::ratio(1, 10));
    // 1/10 is not a binary64 number, so its enclosure has two endpoints.
    assert!(p.iv().lo() < p.iv().hi() && p.iv().contains(0.1));
}

#[test]
fn missing_file_reported() {
    let e = load_jobspec(&specs_dir().join("absent.json")).unwrap_err();
    assert!(matches!(e, JobError::Read { .. }), "{e}");
}

#[test]
fn schema_errors_carry_pointers() {
    let text = std::fs::read_to_string(specs_dir().join("example2-certify.json")).unwrap();
    let bad = text.replacen("\"1/14\",", "", 1);
    match parse_jobspec(&bad).unwrap_err() {
        JobError::Schema(e) => assert_eq!(e.pointer, "/hypotheses/alpha"),
        e => panic!("{e}"),
    }
    let bad = text.replacen("\"c3\": 1.0", "\"c3\": 12.0", 1);
    match parse_jobspec(&bad).unwrap_err() {
        JobError::Schema(e) => assert!(e.pointer.ends_with("/growth/c3") && e.message.contains("π/(b−a)"), "{e:?}"),
        e => panic!("{e}"),
    }
    let bad = text.replacen("\"kind\": \"certify\"", "\"kind\": \"certify\", \"extra\": 1", 1);
    match parse_jobspec(&bad).unwrap_err() {
        JobError::Schema(e) => assert_eq!(e.pointer, "/extra"),
        e => panic!("{e}"),
    }
}

#[test]
fn certify_job_with_curve() {
    let spec = load_jobspec(&specs_dir().join("example2-certify.json")).unwrap();
    let out = run_job(&spec, &Config::default()).unwrap();
    assert!(out.success(), "{}", out.report());
    assert_eq!(out.exit_code(), 0);
    assert_eq!(out.bounds.len(), 1);
    let curve = &out.curve;
    assert_eq!(curve.len(), 15);
    assert!(String::from_utf8(curve_csv(curve)).unwrap().starts_with("sigma,t,bound_upper\n"));
}

/// Every factor of the second example is nonincreasing in σ at fixed
/// `t ≥ 10`: the constant and `|s|` exponents decrease and `|G|` is
/// certified decreasing, so the bound curve must be too.
#[test]
fn curve_monotone_where_implied() {
    let h = plcert::repro::example2_package(Scalar::int(2), Scalar::int(4));
    let c = certify_strip(&h, &Config::default()).unwrap();
    let pts = bound_curve(&c, &CurveSpec { sigma_points: 41, t: vec![10.0, 1e3, 1e5, 1e7] }).unwrap();
    for w in pts.windows(2).filter(|w| w[0].t == w[1].t) {
        assert!(w[1].bound_upper <= w[0].bound_upper * (1.0 + 1e-12), "{:?} then {:?}", w[0], w[1]);
    }
}

#[test]
fn zeta_and_region_jobs() {
    let spec = load_jobspec(&specs_dir().join("zeta-points.json")).unwrap();
    let out = run_job(&spec, &Config::default()).unwrap();
    assert_eq!(out.values.len(), 2);
    assert!(out.values[0].value.re.contains(1.6449340668482264));
    assert_eq!(out.exit_code(), 0);

    let spec = load_jobspec(&specs_dir().join("f-zeta-region.json")).unwrap();
    assert_eq!(run_job(&spec, &Config::default()).unwrap().exit_code(), 0);

    let mut spec = JobSpec::new(JobKind::VerifyRegion);
    spec.region = Some(RegionSpec {
        target: FTarget::FZeta,
        sigma: [Scalar::int(1), Scalar::int(2)],
        t: [Scalar::int(0), Scalar::int(3)],
        bound: 0.99,
        mode: Mode::FullRegion,
    });
    let out = run_job(&spec, &Config::default()).unwrap();
    assert_eq!(out.exit_code(), 1);
    assert!(out.report().contains("refuted"), "{}", out.report());
}

#[test]
fn zeta_job_domain_error() {
    let mut spec = JobSpec::new(JobKind::Zeta);
    spec.points = vec![PointSpec { sigma: Scalar::int(1), t: Scalar::int(0) }];
    assert!(run_job(&spec, &Config::default()).is_err());
}

#[test]
fn conditional_results_are_watermarked() {
    let mut h = plcert::repro::example3_package();
    h.attestations[0].acknowledged = false;
    let mut spec = JobSpec::new(JobKind::Certify);
    spec.hypotheses = Some(plcert::job::HypothesesSpec::from_hypotheses(&h));
    spec.ratio = Some(plcert::repro::example3_ratio().unwrap());
    spec.t0 = vec![1e5];
    let out = run_job(&spec, &Config::default()).unwrap();
    assert!(out.report().contains("[CONDITIONAL]"), "{}", out.report());
    assert_eq!(out.exit_code(), 1);
}
