//! Command-line front end. `run` maps every outcome to an exit code:
//! 0 ok, 1 certificate failure, 2 usage error, 3 resolution/feasibility error.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::adic::{parse_interval, Config, Norm, StepFunction};
use crate::correction::{
    correct_function, lemma1_construct, lemma2_construct, universal_series, verify, BudgetProfile, Certificate,
    DriverOptions, SelectionMode, WalshIndex,
};
use crate::error::Error;
use crate::generate::Generator;
use crate::greedy::{curve_csv, greedy_error_curve};
use crate::io;
use crate::walsh::{analyze, synthesize, Method};

/// Relative `--out` paths are resolved against this directory when set.
pub const OUT_DIR_ENV: &str = "CHRESTENSON_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "chrestenson", version, about = "Generalized Walsh transforms and constructive coefficient correction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fast or naive analysis of a step function, or synthesis with --inverse.
    Transform(TransformArgs),
    /// Greedy m-term error curve as CSV.
    Greedy(GreedyArgs),
    /// Kernel polynomial for a single a-adic interval.
    Lemma1(Lemma1Args),
    /// Whole-function corrector with non-increasing coefficient moduli.
    Lemma2(Lemma2Args),
    /// Iterated correction with shrinking budgets.
    Correct(CorrectArgs),
    /// One series over the first dictionary elements.
    Universal(UniversalArgs),
    /// Recompute a stored certificate and compare.
    Verify(VerifyArgs),
    /// Time the fast transform.
    Bench(BenchArgs),
    /// Run the seeded property suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct Input {
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// Step function JSON file.
    #[arg(long = "in", conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Builtin generator: linear, centered, sign or rand.
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, default_value_t = 4)]
    level: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Input {
    fn load(&self) -> Result<StepFunction, Error> {
        let f = match (&self.input, &self.gen) {
            (Some(path), _) => io::step_from_json(&io::read_json(path)?)?,
            (None, Some(name)) => Generator::parse(name)?.build(self.order, self.level, self.seed)?,
            (None, None) => return Err(Error::InvalidArgument("give --in FILE or --gen NAME".into())),
        };
        if f.order() != self.order && self.input.is_none() {
            return Err(Error::OrderMismatch(self.order, f.order()));
        }
        Ok(f)
    }
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "fast")]
    method: String,
    /// Read a spectrum and synthesize it at --level.
    #[arg(long)]
    inverse: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GreedyArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = usize::MAX)]
    m_max: usize,
    /// 1 or 2.
    #[arg(long, default_value_t = 1)]
    p: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Lemma1Args {
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// Real value, or "re,im".
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    #[arg(long, default_value_t = 2)]
    n0: u64,
    #[arg(long)]
    eps: f64,
    /// "m:k" for the k-th interval of length a^-m.
    #[arg(long)]
    interval: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Lemma2Args {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    eps: f64,
    /// Lower end of the index range, decimal or "d*a^p+..." form.
    #[arg(long, default_value = "2")]
    n0: String,
    #[arg(long)]
    max_blocks: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorrectArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 8)]
    q_max: u32,
    /// verbatim, relaxed or geometric.
    #[arg(long, default_value = "verbatim")]
    profile: String,
    /// Correct dictionary elements within this depth instead of the residual.
    #[arg(long)]
    strict: Option<usize>,
    #[arg(long)]
    max_blocks: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct UniversalArgs {
    #[arg(long, default_value_t = 2)]
    order: u32,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 3)]
    n_max: u64,
    #[arg(long, default_value = "geometric")]
    profile: String,
    #[arg(long)]
    max_blocks: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    order: u32,
    #[arg(long, default_value_t = 20)]
    level: u32,
    #[arg(long, default_value = "fast")]
    method: String,
    #[arg(long, default_value_t = 3)]
    repeats: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resolution { .. }
        | Error::NaiveTooLarge { .. }
        | Error::Infeasible { .. }
        | Error::NonConvergence { .. }
        | Error::Precision(_) => EXIT_INFEASIBLE,
        _ => EXIT_USAGE,
    }
}

fn dispatch(command: Command) -> Result<i32, Error> {
    match command {
        Command::Transform(a) => transform(a),
        Command::Greedy(a) => greedy(a),
        Command::Lemma1(a) => lemma1(a),
        Command::Lemma2(a) => lemma2(a),
        Command::Correct(a) => correct(a),
        Command::Universal(a) => universal(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Bench(a) => bench(a),
        Command::Selftest(a) => selftest(a),
    }
}

fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn emit_json(out: &Option<PathBuf>, value: &serde_json::Value) -> Result<(), Error> {
    match out {
        Some(p) => io::write_json(&out_path(p), value),
        None => {
            print!("{}", io::to_string(value)?);
            Ok(())
        }
    }
}

fn emit_text(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => Ok(std::fs::write(out_path(p), text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn method(s: &str) -> Result<Method, Error> {
    match s {
        "fast" => Ok(Method::Fast),
        "naive" => Ok(Method::Naive),
        other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
    }
}

fn config(order: u32, max_blocks: Option<usize>) -> Result<Config, Error> {
    let mut c = Config::for_order(order)?;
    if let Some(m) = max_blocks {
        c.max_blocks = m;
    }
    Ok(c)
}

fn parse_gamma(s: &str) -> Result<Complex64, Error> {
    let bad = || Error::InvalidArgument(format!("gamma must be 're' or 're,im', got '{s}'"));
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(bad()),
    }
}

/// Prints a certificate summary to stderr and writes it out.
fn finish(cert: &Certificate, out: &Option<PathBuf>) -> Result<i32, Error> {
    eprint!("{cert}");
    emit_json(out, &io::certificate_to_json(cert))?;
    Ok(if cert.passed() { EXIT_OK } else { EXIT_CERTIFICATE })
}

fn transform(a: TransformArgs) -> Result<i32, Error> {
    let value = if a.inverse {
        let path = a.input.input.as_ref().ok_or_else(|| Error::InvalidArgument("--inverse needs --in".into()))?;
        let spec = io::spectrum_from_json(&io::read_json(path)?)?;
        io::step_to_json(&synthesize(&spec, a.input.level)?)
    } else {
        io::spectrum_to_json(&analyze(&a.input.load()?, method(&a.method)?)?)
    };
    emit_json(&a.out, &value)?;
    Ok(EXIT_OK)
}

fn greedy(a: GreedyArgs) -> Result<i32, Error> {
    let p = match a.p {
        1 => Norm::L1,
        2 => Norm::L2,
        other => return Err(Error::InvalidArgument(format!("--p must be 1 or 2, got {other}"))),
    };
    let curve = greedy_error_curve(&a.input.load()?, a.m_max, p)?;
    emit_text(&a.out, &curve_csv(&curve))?;
    Ok(EXIT_OK)
}

fn lemma1(a: Lemma1Args) -> Result<i32, Error> {
    let interval = parse_interval(a.order, &a.interval)?;
    let r = lemma1_construct(parse_gamma(&a.gamma)?, a.n0, a.eps, &interval, &config(a.order, None)?)?;
    finish(&r.certificate, &a.out)
}

fn lemma2(a: Lemma2Args) -> Result<i32, Error> {
    let f = a.input.load()?;
    let n0 = WalshIndex::parse(f.order(), &a.n0)?;
    let r = lemma2_construct(&f, &n0, a.eps, &config(f.order(), a.max_blocks)?)?;
    finish(&r.certificate, &a.out)
}

fn correct(a: CorrectArgs) -> Result<i32, Error> {
    let f = a.input.load()?;
    let opts = DriverOptions {
        eps: a.eps,
        tol: a.tol,
        q_max: a.q_max,
        profile: BudgetProfile::parse(&a.profile)?,
        mode: a.strict.map_or(SelectionMode::Direct, |depth| SelectionMode::Strict { depth }),
        n0: 2,
    };
    let r = correct_function(&f, &opts, &config(f.order(), a.max_blocks)?)?;
    finish(&r.certificate, &a.out)
}

fn universal(a: UniversalArgs) -> Result<i32, Error> {
    let s = universal_series(
        a.eps,
        a.n_max,
        &WalshIndex::from_u64(a.order, 2),
        BudgetProfile::parse(&a.profile)?,
        &config(a.order, a.max_blocks)?,
    )?;
    finish(&s.certificate, &a.out)
}

fn verify_cmd(a: VerifyArgs) -> Result<i32, Error> {
    let cert = io::certificate_from_json(&io::read_json(&a.input)?)?;
    let report = verify(&cert)?;
    for m in &report.mismatches {
        eprintln!("mismatch: {m}");
    }
    eprint!("{}", report.recomputed);
    if report.passed() {
        println!("verified: {} ({} conclusions)", cert.kind, cert.conclusions.len());
        Ok(EXIT_OK)
    } else {
        println!("NOT verified: {}", cert.kind);
        Ok(EXIT_CERTIFICATE)
    }
}

fn bench(a: BenchArgs) -> Result<i32, Error> {
    let m = method(&a.method)?;
    let f = Generator::Random.build(a.order, a.level, a.seed)?;
    let mut best = f64::INFINITY;
    for _ in 0..a.repeats.max(1) {
        let t = Instant::now();
        let spec = analyze(&f, m)?;
        best = best.min(t.elapsed().as_secs_f64());
        std::hint::black_box(spec);
    }
    println!(
        "analyze order={} level={} cells={} method={}: best of {} = {:.6} s",
        a.order,
        a.level,
        f.len(),
        a.method,
        a.repeats.max(1),
        best
    );
    Ok(EXIT_OK)
}

fn selftest(a: SelftestArgs) -> Result<i32, Error> {
    let mut ok = true;
    for s in crate::selftest::run_all(a.seed) {
        println!("{:<16} {:>6} checks  {}", s.name, s.checks, if s.passed() { "ok" } else { "FAILED" });
        for f in &s.failures {
            eprintln!("  {f}");
        }
        ok &= s.passed();
    }
    Ok(if ok { EXIT_OK } else { EXIT_CERTIFICATE })
}
