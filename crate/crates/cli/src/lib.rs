//! Command-line front end of `plcert`.
//!
//! Exit codes: 0 when every requested fact is certified, 1 when something
//! is refuted or inconclusive, 2 for usage and domain errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use plcert::interval::{ComplexRect, RealInterval, Scalar};
use plcert::job::{load_jobspec, JobKind, JobSpec, PointSpec, RegionSpec};
use plcert::report::{bound_curve, curve_csv, write_atomic, write_json};
use plcert::run::{run_job, JobOutcome};
use plcert::theorem::{FTarget, Status};
use plcert::verifier::{verify_sup, Config, Events, Mode, Region, ZetaKind, ZetaTarget};
use plcert::zeta::zeta_auto;

pub const THREADS_ENV: &str = "PLCERT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "plcert", version, about = "Certified Phragmén–Lindelöf bounds on vertical strips")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Cap on boxes per verifier check.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Height of the finite verification range before the tail envelope.
    #[arg(long = "t-cap")]
    pub t_cap: Option<f64>,
    /// Write the result as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the bound curve (sigma, t, bound_upper) as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write progress events as line-delimited JSON.
    #[arg(long)]
    pub events: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify a hypothesis package.
    Certify {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Certify a package and extract explicit constants of a ratio.
    Constant {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',')]
        t0: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Constants C_i(t0) of the first worked example at one η.
    Table {
        #[arg(long)]
        eta: Option<String>,
        #[arg(long, value_delimiter = ',')]
        t0: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce one of the three worked zeta examples.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        example: u8,
        /// η grid for the first example (comma separated).
        #[arg(long, value_delimiter = ',')]
        eta: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        t0: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Rigorous enclosure of ζ(σ + it).
    Zeta {
        #[arg(long, num_args = 2, value_names = ["SIGMA", "T"], allow_negative_numbers = true)]
        point: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Check sup |target| ≤ bound over a rectangle.
    VerifyRegion {
        #[arg(long, conflicts_with_all = ["target", "sigma", "t", "bound"])]
        spec: Option<PathBuf>,
        /// `f_zeta`, `zeta` or an expression in the prefix grammar.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        sigma: Vec<String>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        t: Vec<String>,
        #[arg(long)]
        bound: Option<f64>,
        #[arg(long, value_enum, default_value = "full")]
        mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Quick checks of the zeta enclosures and the verifier.
    Selftest,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum ModeArg {
    Full,
    Boundary,
}

#[derive(Debug)]
struct Usage(String);

fn usage(msg: impl Into<String>) -> Usage {
    Usage(msg.into())
}

fn scalar(text: &str) -> Result<Scalar, Usage> {
    Scalar::parse(text).map_err(|e| usage(format!("{text:?}: {e}")))
}

fn load(path: &Path, kind: &[JobKind]) -> Result<JobSpec, Usage> {
    let spec = load_jobspec(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if !kind.contains(&spec.kind) {
        return Err(usage(format!("{}: kind {} does not fit this subcommand", path.display(), spec.kind)));
    }
    Ok(spec)
}

fn apply(spec: &mut JobSpec, c: &Common) {
    if c.budget.is_some() {
        spec.budget = c.budget;
    }
    if c.t_cap.is_some() {
        spec.t_cap = c.t_cap;
    }
    for (field, flag) in [
        (&mut spec.output.certificate, &c.out),
        (&mut spec.output.csv, &c.csv),
        (&mut spec.output.events, &c.events),
    ] {
        if flag.is_some() {
            field.clone_from(flag);
        }
    }
}

fn build(cmd: Command) -> Result<JobSpec, Usage> {
    let (mut spec, common) = match cmd {
        Command::Certify { spec, common } => (load(&spec, &[JobKind::Certify])?, common),
        Command::Constant { spec, t0, common } => {
            let mut j = load(&spec, &[JobKind::Constant])?;
            if !t0.is_empty() {
                j.t0 = t0;
            }
            (j, common)
        }
        Command::Table { eta, t0, common } => {
            let mut j = JobSpec::new(JobKind::Table);
            j.eta = eta.as_deref().map(scalar).transpose()?.into_iter().collect();
            j.t0 = t0;
            (j, common)
        }
        Command::Reproduce { example, eta, t0, common } => {
            let kind = match example {
                1 => JobKind::ReproduceExample1,
                2 => JobKind::ReproduceExample2,
                _ => JobKind::ReproduceExample3,
            };
            if example != 1 && !eta.is_empty() {
                return Err(usage("--eta applies to the first example only"));
            }
            let mut j = JobSpec::new(kind);
            j.eta = eta.iter().map(|e| scalar(e)).collect::<Result<_, _>>()?;
            j.t0 = t0;
            (j, common)
        }
        Command::Zeta { point, common } => {
            if point.is_empty() {
                return Err(usage("at least one --point SIGMA T is required"));
            }
            let mut j = JobSpec::new(JobKind::Zeta);
            for p in point.chunks(2) {
                j.points.push(PointSpec { sigma: scalar(&p[0])?, t: scalar(&p[1])? });
            }
            (j, common)
        }
        Command::VerifyRegion { spec: Some(path), common, .. } => (load(&path, &[JobKind::VerifyRegion])?, common),
        Command::VerifyRegion { spec: None, target, sigma, t, bound, mode, common } => {
            let target = match target.as_deref() {
                Some("f_zeta") => FTarget::FZeta,
                Some("zeta") => FTarget::Zeta,
                Some(e) => FTarget::Expr { expr: e.into() },
                None => return Err(usage("--target is required without --spec")),
            };
            let pair = |v: &[String], name: &str| -> Result<[Scalar; 2], Usage> {
                match v {
                    [lo, hi] => Ok([scalar(lo)?, scalar(hi)?]),
                    _ => Err(usage(format!("--{name} LO HI is required without --spec"))),
                }
            };
            let mut j = JobSpec::new(JobKind::VerifyRegion);
            j.region = Some(RegionSpec {
                target,
                sigma: pair(&sigma, "sigma")?,
                t: pair(&t, "t")?,
                bound: bound.ok_or_else(|| usage("--bound is required without --spec"))?,
                mode: match mode {
                    ModeArg::Full => Mode::FullRegion,
                    ModeArg::Boundary => Mode::BoundaryOnly,
                },
            });
            (j, common)
        }
        Command::Selftest => unreachable!("handled before"),
    };
    apply(&mut spec, &common);
    spec.check().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

fn configure_threads() -> Result<(), Usage> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| usage(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn write_outputs(spec: &JobSpec, outcome: &JobOutcome) -> Result<(), String> {
    let io = |p: &Path, e: std::io::Error| format!("{}: {e}", p.display());
    if let Some(p) = &spec.output.certificate {
        let r = match (spec.kind, outcome.certificates.as_slice()) {
            (JobKind::Certify, [one]) => write_json(p, &one.certificate),
            _ => write_json(p, outcome),
        };
        r.map_err(|e| io(p, e))?;
    }
    if let Some(p) = &spec.output.report {
        write_atomic(p, outcome.report().as_bytes()).map_err(|e| io(p, e))?;
    }
    if let Some(p) = &spec.output.csv {
        let points = if !outcome.curve.is_empty() {
            outcome.curve.clone()
        } else {
            let usable: Vec<_> = outcome
                .certificates
                .iter()
                .filter(|c| matches!(c.certificate.status, Status::Certified | Status::Conditional))
                .collect();
            match usable.as_slice() {
                [one] => bound_curve(&one.certificate, &spec.curve.clone().unwrap_or_default()).map_err(|e| e.to_string())?,
                _ => return Err("a bound curve needs exactly one certified package".into()),
            }
        };
        write_atomic(p, &curve_csv(&points)).map_err(|e| io(p, e))?;
    }
    Ok(())
}

fn selftest() -> i32 {
    let mut ok = true;
    let mut line = |name: &str, pass: bool, detail: String| {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };
    let pi2_6 = RealInterval::pi().sqr().div(&RealInterval::point(6.0)).expect("nonzero");
    match zeta_auto(&ComplexRect::point(2.0, 0.0)) {
        Ok(z) => line(
            "zeta(2)",
            !(z.re.hi() < pi2_6.lo() || pi2_6.hi() < z.re.lo()) && z.re.width() < 1e-12 && z.im.contains(0.0),
            format!("{z}"),
        ),
        Err(e) => line("zeta(2)", false, e.to_string()),
    }
    match zeta_auto(&ComplexRect::point(0.5, 14.134725)) {
        Ok(z) => line("first zero", z.abs().hi() < 1e-4, format!("|ζ| ≤ {:.3e}", z.abs().hi())),
        Err(e) => line("first zero", false, e.to_string()),
    }
    let region = Region::new((1.0, 2.0), (0.0, 3.0)).expect("valid region");
    let cfg = Config::default();
    let f = ZetaTarget::new(ZetaKind::F);
    match verify_sup(&f, region.clone(), Mode::BoundaryOnly, 1.0, &cfg) {
        Ok(v) => line("|f| ≤ 1 on [1,2]×[0,3]", v.is_verified(), v.label().into()),
        Err(e) => line("|f| ≤ 1 on [1,2]×[0,3]", false, e.to_string()),
    }
    match verify_sup(&f, region, Mode::BoundaryOnly, 0.99, &cfg) {
        Ok(v) => line("|f| ≤ 0.99 refuted", v.counter().is_some(), v.label().into()),
        Err(e) => line("|f| ≤ 0.99 refuted", false, e.to_string()),
    }
    if ok {
        0
    } else {
        1
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(Usage(m)) = configure_threads() {
        eprintln!("error: {m}");
        return 2;
    }
    if matches!(cli.command, Command::Selftest) {
        return selftest();
    }
    let spec = match build(cli.command) {
        Ok(s) => s,
        Err(Usage(m)) => {
            eprintln!("error: {m}");
            return 2;
        }
    };
    if spec.output.csv.is_some() && matches!(spec.kind, JobKind::ReproduceExample1 | JobKind::Table) {
        eprintln!("error: --csv needs a job with a single package");
        return 2;
    }
    let mut cfg = Config::default();
    if let Some(p) = &spec.output.events {
        match File::create(p) {
            Ok(f) => cfg.events = Events::to_writer(Box::new(BufWriter::new(f))),
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return 2;
            }
        }
    }
    let outcome = match run_job(&spec, &cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    print!("{}", outcome.report());
    if let Err(m) = write_outputs(&spec, &outcome) {
        eprintln!("error: {m}");
        return 2;
    }
    let code = outcome.exit_code();
    if code != 0 {
        eprintln!("not all requested facts were certified");
    }
    code
}
