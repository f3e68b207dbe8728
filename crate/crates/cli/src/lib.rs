//! The `sumzeta` command line.
//!
//! Exit codes: `0` success, `1` computational diagnostic (nothing found,
//! failed verification), `2` invalid arguments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use sumzeta_core::kronecker::{find_translations, zero_near_line, DEFAULT_T_RANGE};
use sumzeta_core::levelcurve::{
    branch_count, interval_certificate, level_line_intersect, trace, DEFAULT_Y_CAP,
};
use sumzeta_core::strip::{prime_strip, x_bounds};
use sumzeta_core::torus::{
    certify, g4_certificate, lift_certificate, pullback_from_zero, scan, Certification,
    TorusCertificate, G4_RANGE,
};
use sumzeta_core::zerofinder::{find_zeros, refine_zero, Rectangle};
use sumzeta_core::{Error, PartialSum, Target, TorusPoint};

pub mod json;

use json::{float, write_line, DatabaseHeader, HeaderLine, ZeroJson};

#[derive(Debug, Parser)]
#[command(
    name = "sumzeta",
    version,
    about = "Zeros of 1 + 2^s + ... + n^s and the real projection of their zeros"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "SUMZETA_THREADS")]
    threads: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Prime basis and exponent vectors.
    Spec(NArg),
    /// Zeros in a rectangle, as a JSON-lines database.
    Zeros(ZerosArgs),
    /// The abscissas x_{n,0} and x_{n,1}.
    Bounds(BoundsArgs),
    /// For prime n, the strip where all zeros are simple.
    PrimeStrip(BoundsArgs),
    /// A torus certificate for sigma.
    Certify(CertifyArgs),
    /// Optimizer certificates on a sigma grid, as CSV.
    Scan(ScanArgs),
    /// Zeros of A_n(sigma, .) on [0, y_max].
    Intersect(IntersectArgs),
    /// An interval inside R_n grown from a zero of G*_n.
    IntervalCert(IntervalArgs),
    /// A level curve |G*_n| = k, as CSV.
    Trace(TraceArgs),
    /// Branches of the level curve through a point.
    Branches(BranchArgs),
    /// Heights T whose phases match a torus point.
    Translations(TranslationArgs),
    /// A zero of G_n close to Re s = sigma.
    NearLine(NearLineArgs),
    /// Real parts of zeros in a window against the bounds and estimates.
    Report(ReportArgs),
    /// Re-evaluates a certificate or a zero database.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct NArg {
    #[arg(long)]
    n: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FunctionArg {
    G,
    Gp,
    Gstar,
}

impl From<FunctionArg> for Target {
    fn from(f: FunctionArg) -> Self {
        match f {
            FunctionArg::G => Target::G,
            FunctionArg::Gp => Target::GDerivative,
            FunctionArg::Gstar => Target::GStar,
        }
    }
}

#[derive(Debug, Args)]
struct ZerosArgs {
    #[arg(long)]
    n: usize,
    /// x_lo,x_hi,y_lo,y_hi
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rect)]
    rect: Rectangle,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value = "g")]
    function: FunctionArg,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Optimizer,
    G4,
    Lift,
    Pullback,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 64)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    #[arg(long, value_enum, default_value = "optimizer")]
    method: MethodArg,
    /// Base certificate for `lift` (JSON file).
    #[arg(long)]
    from: Option<PathBuf>,
    /// Approximate zero re,im for `pullback`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    zero: Option<Complex64>,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    hi: f64,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 64)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct IntersectArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    sigma: f64,
    #[arg(long, default_value_t = 500.0)]
    y_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Debug, Args)]
struct IntervalArgs {
    #[arg(long)]
    n: usize,
    /// Approximate zero of G*_n, re,im.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    zero: Complex64,
    #[arg(long, default_value_t = 0.5)]
    r_max: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    start: Complex64,
    /// Defaults to |G*_n(start)|.
    #[arg(long)]
    level: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 10_000)]
    max_points: usize,
    #[arg(long, default_value_t = DEFAULT_Y_CAP)]
    y_cap: f64,
}

#[derive(Debug, Args)]
struct BranchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    z0: Complex64,
    /// Defaults to |G*_n(z0)|.
    #[arg(long)]
    level: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    radius: f64,
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

#[derive(Debug, Args)]
struct TranslationArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    /// Torus point as comma-separated phases.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_phases)]
    x: Option<Phases>,
    /// Certificate (JSON file) supplying sigma and x.
    #[arg(long)]
    cert: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_T_RANGE)]
    t_range: f64,
    #[arg(long, default_value_t = 1)]
    count: usize,
}

#[derive(Debug, Args)]
struct NearLineArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    #[arg(long)]
    cert: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 50.0)]
    y_max: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}

#[derive(Debug, Clone)]
struct Phases(Vec<f64>);

fn parse_phases(s: &str) -> Result<Phases, String> {
    parse_list(s).map(Phases)
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    match parse_list(s)?.as_slice() {
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err("expected re,im".into()),
    }
}

fn parse_rect(s: &str) -> Result<Rectangle, String> {
    match parse_list(s)?.as_slice() {
        [a, b, c, d] => Rectangle::new(*a, *b, *c, *d).map_err(|e| e.to_string()),
        _ => Err("expected x_lo,x_hi,y_lo,y_hi".into()),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Diagnostic(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            other => Failure::Diagnostic(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Diagnostic(format!("i/o: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_certificate(path: &PathBuf) -> Result<TorusCertificate, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| usage(format!("{} is not a certificate: {e}", path.display())))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| usage(format!("{flag} is required here")))
}

/// Certificate for `sigma`: explicit construction for `n = 4` on its range,
/// otherwise the optimizer.
fn auto_certificate(
    spec: &PartialSum,
    sigma: f64,
    search: &SearchArgs,
) -> Result<TorusCertificate, Failure> {
    if spec.n() == 4 && (G4_RANGE.0..=G4_RANGE.1).contains(&sigma) {
        return Ok(g4_certificate(sigma, search.tol)?);
    }
    match certify(spec, sigma, search.tol, search.budget, search.seed)? {
        Certification::Found(c) => Ok(c),
        Certification::NotFound { best_residual } => Err(Failure::Diagnostic(format!(
            "no certificate for sigma = {sigma} (best residual {best_residual:e})"
        ))),
    }
}

#[derive(Serialize)]
struct NotFound {
    n: usize,
    sigma: f64,
    found: bool,
    best_residual: f64,
}

fn cmd_certify(a: &CertifyArgs, out: &mut Vec<u8>) -> Outcome {
    let spec = PartialSum::new(a.n)?;
    let cert = match a.method {
        MethodArg::Optimizer => {
            let sigma = require(a.sigma, "--sigma")?;
            match certify(&spec, sigma, a.search.tol, a.search.budget, a.search.seed)? {
                Certification::Found(c) => c,
                Certification::NotFound { best_residual } => {
                    write_line(
                        out,
                        &NotFound {
                            n: a.n,
                            sigma,
                            found: false,
                            best_residual,
                        },
                    )?;
                    return Err(Failure::Diagnostic(format!(
                        "no certificate found (best residual {best_residual:e})"
                    )));
                }
            }
        }
        MethodArg::G4 => {
            if a.n != 4 {
                return Err(usage("method g4 needs --n 4"));
            }
            g4_certificate(require(a.sigma, "--sigma")?, a.search.tol)?
        }
        MethodArg::Lift => {
            if a.n < 3 {
                return Err(usage("lift needs a target n >= 3"));
            }
            let base_spec = PartialSum::new(a.n - 1)?;
            let base = match &a.from {
                Some(path) => read_certificate(path)?,
                None => auto_certificate(&base_spec, require(a.sigma, "--sigma")?, &a.search)?,
            };
            if let Some(sigma) = a.sigma {
                if sigma != base.sigma {
                    return Err(usage(format!(
                        "--sigma {sigma} disagrees with the base certificate ({})",
                        base.sigma
                    )));
                }
            }
            lift_certificate(&base_spec, &base, a.search.tol)?
        }
        MethodArg::Pullback => {
            let guess = require(a.zero, "--zero")?;
            let zero = refine_zero(&spec, Target::G, guess, 1e-13)?;
            pullback_from_zero(&spec, &zero)?
        }
    };
    write_line(out, &cert)?;
    Ok(())
}

fn cmd_zeros(a: &ZerosArgs, out: &mut Vec<u8>) -> Outcome {
    let spec = PartialSum::new(a.n)?;
    let target = Target::from(a.function);
    target.validate(&spec)?;
    let zeros = find_zeros(&spec, target, &a.rect, a.tol)?;
    let r = a.rect;
    let header = HeaderLine {
        header: DatabaseHeader {
            n: a.n,
            function: target,
            window: [r.x_lo, r.x_hi, r.y_lo, r.y_hi],
            tol: a.tol,
            version: env!("CARGO_PKG_VERSION").to_string(),
            count: zeros.len(),
        },
    };
    write_line(out, &header)?;
    for z in &zeros {
        write_line(out, &ZeroJson::from(z))?;
    }
    Ok(())
}

fn cmd_scan(a: &ScanArgs, out: &mut Vec<u8>) -> Outcome {
    let spec = PartialSum::new(a.n)?;
    let result = scan(&spec, a.lo, a.hi, a.step, a.tol, a.budget, a.seed)?;
    writeln!(out, "sigma,found,residual")?;
    for (sigma, r) in result.grid.iter().zip(&result.results) {
        writeln!(
            out,
            "{},{},{}",
            float(*sigma),
            r.is_found(),
            float(r.residual())
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Intersections {
    n: usize,
    sigma: f64,
    y_max: f64,
    ys: Vec<f64>,
}

#[derive(Serialize)]
struct Branches {
    n: usize,
    z0: [f64; 2],
    level: f64,
    radius: f64,
    branches: usize,
}

fn cmd_translations(a: &TranslationArgs, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Outcome {
    let spec = PartialSum::new(a.n)?;
    let (sigma, x) = match &a.cert {
        Some(path) => {
            let c = read_certificate(path)?;
            (a.sigma.unwrap_or(c.sigma), c.x)
        }
        None => (
            require(a.sigma, "--sigma")?,
            TorusPoint::new(require(a.x.clone(), "--x or --cert")?.0),
        ),
    };
    let search = find_translations(&spec, sigma, &x, a.epsilon, a.t_range, a.count)?;
    write_line(out, &search)?;
    if let Some(d) = &search.diagnostic {
        writeln!(err, "{d}")?;
    }
    if search.hits.is_empty() {
        return Err(Failure::Diagnostic("no translation found".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct NearLine {
    zero: ZeroJson,
    deviation: f64,
    t: f64,
    certificate: TorusCertificate,
}

fn cmd_near_line(a: &NearLineArgs, out: &mut Vec<u8>) -> Outcome {
    let spec = PartialSum::new(a.n)?;
    let cert = match &a.cert {
        Some(path) => read_certificate(path)?,
        None => auto_certificate(&spec, require(a.sigma, "--sigma")?, &a.search)?,
    };
    let near = zero_near_line(&spec, &cert, a.epsilon)?;
    write_line(
        out,
        &NearLine {
            zero: ZeroJson::from(&near.zero),
            deviation: near.deviation,
            t: near.t,
            certificate: cert,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct Report {
    n: usize,
    window: [f64; 4],
    zeros: usize,
    min_re: Option<f64>,
    max_re: Option<f64>,
    x0: f64,
    x1: f64,
    a_estimate: Option<f64>,
    b_estimate: Option<f64>,
    estimate_note: &'static str,
}

fn cmd_report(a: &ReportArgs, out: &mut Vec<u8>) -> Outcome {
    let spec = PartialSum::new(a.n)?;
    let b = x_bounds(&spec, 1e-12)?;
    let rect = Rectangle::new(b.x0 - 1.0, b.x1 + 1.0, 0.0, a.y_max)?;
    let zeros = find_zeros(&spec, Target::G, &rect, a.tol)?;
    let res = zeros.iter().map(|z| z.location.re);
    let report = Report {
        n: a.n,
        window: [rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi],
        zeros: zeros.len(),
        min_re: res.clone().reduce(f64::min),
        max_re: res.reduce(f64::max),
        x0: b.x0,
        x1: b.x1,
        a_estimate: b.a_est,
        b_estimate: b.b_est,
        estimate_note: "estimate (o(1) dropped)",
    };
    write_line(out, &report)?;
    Ok(())
}

#[derive(Serialize)]
struct Verification {
    kind: &'static str,
    checked: usize,
    failures: usize,
    max_residual: f64,
}

fn cmd_verify(a: &VerifyArgs, out: &mut Vec<u8>) -> Outcome {
    let text = fs::read_to_string(&a.file)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.file.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines.next().ok_or_else(|| usage("empty file"))?;
    let report = if let Ok(h) = serde_json::from_str::<HeaderLine>(first) {
        verify_database(&h.header, lines, a.tol)?
    } else {
        let cert: TorusCertificate = serde_json::from_str(first)
            .map_err(|e| usage(format!("neither a certificate nor a zero database: {e}")))?;
        let spec = PartialSum::new(cert.n)?;
        let r = cert.recompute_residual(&spec)?;
        let agrees = (r - cert.residual).abs() <= 1e-12 + 1e-9 * cert.residual;
        Verification {
            kind: "certificate",
            checked: 1,
            failures: usize::from(!(r <= a.tol && agrees)),
            max_residual: r,
        }
    };
    write_line(out, &report)?;
    if report.failures > 0 {
        return Err(Failure::Diagnostic(format!(
            "{} of {} checks failed",
            report.failures, report.checked
        )));
    }
    Ok(())
}

fn verify_database<'a>(
    header: &DatabaseHeader,
    lines: impl Iterator<Item = &'a str>,
    tol: f64,
) -> Result<Verification, Failure> {
    let spec = PartialSum::new(header.n)?;
    header.function.validate(&spec)?;
    let mut records = Vec::new();
    for line in lines {
        let z: ZeroJson =
            serde_json::from_str(line).map_err(|e| usage(format!("bad record: {e}")))?;
        records.push(z);
    }
    let [x_lo, x_hi, y_lo, y_hi] = header.window;
    let mut failures = usize::from(records.len() != header.count);
    let mut max_residual: f64 = 0.0;
    for (i, z) in records.iter().enumerate() {
        let r = header.function.value(&spec, z.location()).norm();
        max_residual = max_residual.max(r);
        let inside = (x_lo..=x_hi).contains(&z.re) && (y_lo..=y_hi).contains(&z.im);
        let ordered = i == 0 || {
            let p = &records[i - 1];
            (p.im, p.re) < (z.im, z.re) && (p.location() - z.location()).norm() >= 1e-7
        };
        if !(r <= tol) || !inside || !ordered || z.function != header.function {
            failures += 1;
        }
    }
    Ok(Verification {
        kind: "zeros",
        checked: records.len(),
        failures,
        max_residual,
    })
}

fn dispatch(command: &Command, out: &mut Vec<u8>, err: &mut Vec<u8>) -> Outcome {
    match command {
        Command::Spec(a) => write_line(out, &PartialSum::new(a.n)?)?,
        Command::Zeros(a) => cmd_zeros(a, out)?,
        Command::Bounds(a) => write_line(out, &x_bounds(&PartialSum::new(a.n)?, a.tol)?)?,
        Command::PrimeStrip(a) => write_line(out, &prime_strip(&PartialSum::new(a.n)?, a.tol)?)?,
        Command::Certify(a) => cmd_certify(a, out)?,
        Command::Scan(a) => cmd_scan(a, out)?,
        Command::Intersect(a) => {
            let spec = PartialSum::new(a.n)?;
            let ys = level_line_intersect(&spec, a.sigma, a.y_max, a.step)?;
            write_line(
                out,
                &Intersections {
                    n: a.n,
                    sigma: a.sigma,
                    y_max: a.y_max,
                    ys,
                },
            )?;
        }
        Command::IntervalCert(a) => {
            let spec = PartialSum::new(a.n)?;
            let zero = refine_zero(&spec, Target::GStar, a.zero, 1e-13)?;
            write_line(
                out,
                &interval_certificate(&spec, zero.location, a.r_max, a.tol)?,
            )?;
        }
        Command::Trace(a) => {
            let spec = PartialSum::new(a.n)?;
            let level = match a.level {
                Some(k) => k,
                None => spec.g_star(a.start)?.norm(),
            };
            let line = trace(&spec, level, a.start, a.step, a.max_points, a.y_cap)?;
            line.write_csv(&mut *out)?;
        }
        Command::Branches(a) => {
            let spec = PartialSum::new(a.n)?;
            let level = match a.level {
                Some(k) => k,
                None => spec.g_star(a.z0)?.norm(),
            };
            let branches = branch_count(&spec, a.z0, level, a.radius, a.samples)?;
            write_line(
                out,
                &Branches {
                    n: a.n,
                    z0: [a.z0.re, a.z0.im],
                    level,
                    radius: a.radius,
                    branches,
                },
            )?;
        }
        Command::Translations(a) => cmd_translations(a, out, err)?,
        Command::NearLine(a) => cmd_near_line(a, out)?,
        Command::Report(a) => cmd_report(a, out)?,
        Command::Verify(a) => cmd_verify(a, out)?,
    }
    Ok(())
}

/// Runs one invocation, writing results to `out` (or the `--out` file) and
/// messages to `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker threads: {e}");
            return 1;
        }
    };
    let mut buf = Vec::new();
    let mut notes = Vec::new();
    let result = pool.install(|| dispatch(&cli.command, &mut buf, &mut notes));
    let _ = err.write_all(&notes);
    let written = match &cli.out {
        Some(path) => fs::write(path, &buf),
        None => out.write_all(&buf),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return 1;
    }
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Diagnostic(msg)) => {
            let _ = writeln!(err, "{msg}");
            1
        }
    }
}

/// [`run_with`] on the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
