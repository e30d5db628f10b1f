//! The `expmath` command line.
//!
//! Every numeric result is printed as a decimal string with at most the
//! requested number of significant digits. `EXPMATH_DIGITS` sets the default
//! precision; an explicit `--digits` always wins.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::agmpi::{self, AgmKind, CubicArgument};
use crate::bbopt::{self, Objective, Quadratic, QuarticBowl, Rosenbrock, Safeguard, Variant};
use crate::error::Error;
use crate::ising::{self, CnSolver};
use crate::numkernel::{bessel_k0, exp, ln, pi, ten_to_minus, BigReal, PrecisionContext};
use crate::quadrature::{integrate_finite, integrate_semi_infinite};
use crate::recognize::{self, BASIS_NAMES};
use crate::sinclab;
use crate::walks::{self, ColorMode, Constant, ImageFormat};

pub const DIGITS_ENV: &str = "EXPMATH_DIGITS";
pub const MAX_DIGITS: u32 = 100_000;
/// Error columns never print more digits than this.
const ERROR_DIGITS: u32 = 6;

#[derive(Debug, Parser)]
#[command(name = "expmath", version, about = "Arbitrary-precision experimental mathematics workbench")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write output here instead of stdout (for `walk`, the image).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gauss–Legendre π with the per-iteration error table.
    Pi {
        /// Iterations; by default just enough for the requested digits.
        #[arg(long)]
        iterations: Option<u32>,
        /// Significant digits (default 50).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// C_n = 2^n/n! ∫₀^∞ t K₀(t)^n dt for one n or a range `a..b`.
    Cn {
        #[arg(long)]
        n: String,
        /// Significant digits (default 30).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// The limit 2e^(−2γ).
    Cinf {
        /// Significant digits (default 50).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Both sides of Σ sinc-product = ∫ sinc-product for one N or a range.
    Sinc {
        #[arg(long, default_value = "1..7")]
        n: String,
        /// Significant digits (default 30).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Least N with Σ_{k=0}^N 1/(2k+1) above a threshold (`2pi`, `4/3`, `1.5`).
    Threshold {
        #[arg(long, default_value = "2pi")]
        value: String,
        /// Working digits for irrational thresholds (default 40).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Barzilai–Borwein minimization with its trace.
    Bb {
        #[arg(long, value_enum, default_value_t = Problem::Quad)]
        problem: Problem,
        #[arg(long, value_enum, default_value_t = VariantArg::Bb2)]
        variant: VariantArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Start point, comma separated.
        #[arg(long)]
        x0: Option<String>,
        /// Nonmonotone safeguard; `auto` enables it for nonconvex problems.
        #[arg(long, value_enum, default_value_t = SafeguardArg::Auto)]
        safeguard: SafeguardArg,
        /// Also run steepest descent from the same start.
        #[arg(long)]
        compare: bool,
        /// Significant digits, at most 17 (default 17).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Quadratic or cubic arithmetic-geometric mean.
    Agm {
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value = "0.5")]
        b: String,
        #[arg(long, value_enum, default_value_t = AgmKindArg::Quadratic)]
        kind: AgmKindArg,
        /// Residuals of the hypergeometric identities at k = b/a.
        #[arg(long)]
        identity: bool,
        /// Significant digits (default 50).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Rational combinations of basis constants matching a decimal value.
    Recognize {
        #[arg(long)]
        value: String,
        /// Comma-separated names from: one, pi, pi2, gamma, exp_m2gamma, zeta3, ln2, e.
        #[arg(long, default_value = "exp_m2gamma,zeta3,pi2,one")]
        basis: String,
        /// Digits the value is trusted to (default 50).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Double-exponential quadrature on a built-in integrand.
    Quad {
        #[arg(long, value_enum, default_value_t = Integrand::Pi4)]
        integrand: Integrand,
        /// Power of K₀ for `tk0n`.
        #[arg(long, default_value_t = 4)]
        n: u32,
        /// Significant digits (default 30).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Planar walk on the digits of a constant, written as SVG or PPM.
    Walk {
        #[arg(long, default_value = "pi")]
        constant: String,
        #[arg(long, default_value_t = 4)]
        base: u32,
        /// Number of digits, i.e. steps.
        #[arg(long, default_value_t = 1000)]
        digits: usize,
        /// Image format; by default taken from the `--out` extension, else SVG.
        #[arg(long, value_enum)]
        image: Option<ImageArg>,
        /// Image width and height in pixels.
        #[arg(long, default_value_t = 1024)]
        size: u32,
        #[arg(long, value_enum, default_value_t = ColorArg::Progress)]
        color: ColorArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Problem {
    /// ½(x₁² + 100x₂²)
    Quad,
    Rosenbrock,
    /// Σ x⁴/4 + x²/2 − c·x with c = (1, 2, 3)
    Quartic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Bb1,
    Bb2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SafeguardArg {
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AgmKindArg {
    Quadratic,
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Integrand {
    /// 4/(1+x²) on [0,1] = π
    Pi4,
    /// e^(−x²) on [0,∞) = √π/2
    Gauss,
    /// −ln x on [0,1] = 1
    Log,
    /// t·K₀(t) on [0,∞) = 1
    Tk0,
    /// t·K₀(t)^n on [0,∞)
    Tk0n,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ImageArg {
    Svg,
    Ppm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColorArg {
    Mono,
    Progress,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CmdResult<T> {
    Err(Failure::Usage(msg.into()))
}

/// Named scalar fields plus an optional table of rows.
#[derive(Debug, Default)]
struct Report {
    fields: Vec<(String, Value)>,
    table: Option<Table>,
}

#[derive(Debug)]
struct Table {
    name: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Report {
    fn field(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.fields.push((key.to_string(), v.into()));
        self
    }

    fn table(mut self, name: &'static str, columns: Vec<&'static str>, rows: Vec<Vec<Value>>) -> Self {
        self.table = Some(Table { name, columns, rows });
        self
    }

    fn to_json(&self) -> String {
        let mut m = Map::new();
        for (k, v) in &self.fields {
            m.insert(k.clone(), v.clone());
        }
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|r| Value::Object(t.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
                .collect();
            m.insert(t.name.to_string(), Value::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("values serialize");
        s.push('\n');
        s
    }

    fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.fields {
            s.push_str(&format!("{k}: {}\n", plain(v)));
        }
        if let Some(t) = &self.table {
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(plain).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|i| cells.iter().map(|r| r[i].chars().count()).chain([t.columns[i].len()]).max().unwrap_or(0))
                .collect();
            if !self.fields.is_empty() {
                s.push('\n');
            }
            let line = |items: Vec<&str>| {
                let padded: Vec<String> = items.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            s.push_str(&line(t.columns.clone()));
            for r in &cells {
                s.push_str(&line(r.iter().map(|c| c.as_str()).collect()));
            }
        }
        s
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                w.write_record(&t.columns).expect("in-memory write");
                for r in &t.rows {
                    w.write_record(r.iter().map(plain)).expect("in-memory write");
                }
            }
            None => {
                w.write_record(self.fields.iter().map(|(k, _)| k)).expect("in-memory write");
                w.write_record(self.fields.iter().map(|(_, v)| plain(v))).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.to_text(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(plain).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn dec(x: &BigReal, digits: u32) -> Value {
    Value::String(x.to_string_digits(digits as usize))
}

fn err_dec(x: &BigReal, digits: u32) -> Value {
    dec(x, digits.min(ERROR_DIGITS))
}

fn f64_dec(x: f64, digits: u32) -> Value {
    if x == 0.0 {
        return Value::String("0".into());
    }
    match BigReal::from_f64(x, 64) {
        Some(b) => dec(&b, digits),
        None => Value::String(format!("{x}")),
    }
}

/// Runs the command line with `argv[0]` being the program name. Exit codes:
/// 0 success, 1 computation failure, 2 usage error.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(DIGITS_ENV).ok();
    run_with_env(argv, env.as_deref(), out, err)
}

/// [`run`] with the `EXPMATH_DIGITS` value passed in explicitly.
pub fn run_with_env<I, T>(argv: I, env_digits: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let result = dispatch(&cli, env_digits);
    match result {
        Ok(Output::Report(r)) => {
            let text = r.render(cli.format);
            emit(&cli.out, text.as_bytes(), out, err)
        }
        Ok(Output::Image { bytes, summary }) => match &cli.out {
            None => {
                let _ = out.write_all(&bytes);
                0
            }
            Some(path) => {
                if let Err(e) = std::fs::write(path, &bytes) {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    return 1;
                }
                let _ = out.write_all(summary.render(cli.format).as_bytes());
                0
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn emit(path: &Option<PathBuf>, bytes: &[u8], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match path {
        None => {
            let _ = out.write_all(bytes);
            0
        }
        Some(p) => match std::fs::write(p, bytes) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: cannot write {}: {e}", p.display());
                1
            }
        },
    }
}

enum Output {
    Report(Report),
    Image { bytes: Vec<u8>, summary: Report },
}

fn resolve_digits(flag: Option<u32>, env: Option<&str>, default: u32) -> CmdResult<u32> {
    let d = match (flag, env) {
        (Some(d), _) => d,
        (None, Some(s)) => match s.trim().parse::<u32>() {
            Ok(d) => d,
            Err(_) => return usage(format!("{DIGITS_ENV}={s:?} is not a digit count")),
        },
        (None, None) => default,
    };
    if d == 0 || d > MAX_DIGITS {
        return usage(format!("--digits must satisfy 1 ≤ digits ≤ {MAX_DIGITS}, got {d}"));
    }
    Ok(d)
}

fn dispatch(cli: &Cli, env: Option<&str>) -> CmdResult<Output> {
    let report = match &cli.command {
        Command::Pi { iterations, digits } => cmd_pi(*iterations, resolve_digits(*digits, env, 50)?)?,
        Command::Cn { n, digits } => cmd_cn(n, resolve_digits(*digits, env, 30)?)?,
        Command::Cinf { digits } => {
            let d = resolve_digits(*digits, env, 50)?;
            let v = ising::c_infinity(&PrecisionContext::new(d))?;
            Report::default().field("value", dec(&v, d))
        }
        Command::Sinc { n, digits } => cmd_sinc(n, resolve_digits(*digits, env, 30)?)?,
        Command::Threshold { value, digits } => cmd_threshold(value, resolve_digits(*digits, env, 40)?)?,
        Command::Bb { problem, variant, tol, max_iter, x0, safeguard, compare, digits } => {
            let d = resolve_digits(*digits, env, 17)?.min(17);
            cmd_bb(*problem, *variant, *tol, *max_iter, x0.as_deref(), *safeguard, *compare, d)?
        }
        Command::Agm { a, b, kind, identity, digits } => cmd_agm(a, b, *kind, *identity, resolve_digits(*digits, env, 50)?)?,
        Command::Recognize { value, basis, digits } => cmd_recognize(value, basis, resolve_digits(*digits, env, 50)?)?,
        Command::Quad { integrand, n, digits } => cmd_quad(*integrand, *n, resolve_digits(*digits, env, 30)?)?,
        Command::Walk { constant, base, digits, image, size, color } => {
            return cmd_walk(constant, *base, *digits, *image, *size, *color, cli.out.as_ref());
        }
    };
    Ok(Output::Report(report))
}

/// `4`, `1..32` or `1..=32`, both ends inclusive.
fn parse_range(s: &str, name: &str) -> CmdResult<Vec<u32>> {
    let parse = |t: &str| -> CmdResult<u32> {
        t.trim().parse::<u32>().map_err(|_| Failure::Usage(format!("--{name}: `{t}` is not a nonnegative integer")))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo == 0 {
        return usage(format!("{name} must satisfy {name} ≥ 1"));
    }
    if hi < lo {
        return usage(format!("empty range {s}"));
    }
    Ok((lo..=hi).collect())
}

/// Decimal digits after `k` Gauss–Legendre iterations, roughly.
fn pi_iterations_for(digits: u32) -> u32 {
    let mut good = 3u64;
    let mut k = 1;
    while good < digits as u64 + 2 {
        good = 2 * good + 2;
        k += 1;
    }
    k
}

fn cmd_pi(iterations: Option<u32>, d: u32) -> CmdResult<Report> {
    let k = iterations.unwrap_or_else(|| pi_iterations_for(d));
    if k == 0 {
        return usage("--iterations must be at least 1");
    }
    let r = agmpi::gauss_legendre_pi(k, &PrecisionContext::new(d))?;
    let rows = r
        .per_iteration_error
        .iter()
        .enumerate()
        .map(|(i, e)| vec![json!(i + 1), err_dec(e, d)])
        .collect();
    Ok(Report::default()
        .field("value", dec(&r.value, d))
        .field("iterations", r.iterations)
        .table("errors", vec!["iteration", "error"], rows))
}

fn cmd_cn(n: &str, d: u32) -> CmdResult<Report> {
    let ns = parse_range(n, "n")?;
    let ctx = PrecisionContext::new(d);
    let eps = ten_to_minus(d as i64 + 1, &ctx);
    let solver = CnSolver::new(&ctx)?;
    let mut rows = Vec::new();
    for n in ns {
        let c = solver.c_n(n, &eps)?;
        rows.push(vec![json!(n), dec(&c.value, d), err_dec(&c.error_estimate, d)]);
    }
    if rows.len() == 1 {
        let r = rows.pop().expect("one row");
        let mut it = r.into_iter();
        return Ok(Report::default()
            .field("n", it.next().expect("n"))
            .field("value", it.next().expect("value"))
            .field("error_estimate", it.next().expect("error")));
    }
    Ok(Report::default().table("records", vec!["n", "value", "error_estimate"], rows))
}

fn cmd_sinc(n: &str, d: u32) -> CmdResult<Report> {
    let ns = parse_range(n, "n")?;
    let ctx = PrecisionContext::new(d);
    let eps = ten_to_minus(d as i64, &ctx);
    let mut rows = Vec::new();
    for n in ns {
        let r = sinclab::sinc_identity(n, &eps, &ctx)?;
        rows.push(vec![
            json!(n),
            dec(&r.lhs, d),
            dec(&r.rhs, d),
            err_dec(&r.difference, d),
            err_dec(&r.truncation_bound, d),
        ]);
    }
    Ok(Report::default().table("records", vec!["n", "sum", "integral", "difference", "truncation_bound"], rows))
}

/// Exact rational from `3`, `-1.25`, `4/3` or `2.5e3`.
fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (p, q) = (parse_rational(a)?, parse_rational(b)?);
        return (!q.is_zero()).then(|| p / q);
    }
    let (mant, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let scale = exp10 - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        q = -q;
    }
    Some(q)
}

fn cmd_threshold(value: &str, d: u32) -> CmdResult<Report> {
    let ctx = PrecisionContext::new(d);
    let v = value.trim();
    let n = if let Some(coef) = v.strip_suffix("pi").or_else(|| v.strip_suffix('π')) {
        let coef = coef.trim_end_matches('*');
        let q = if coef.is_empty() {
            BigRational::one()
        } else {
            match parse_rational(coef) {
                Some(q) => q,
                None => return usage(format!("cannot read threshold `{value}`")),
            }
        };
        if !q.is_positive() {
            return usage("the threshold must be positive");
        }
        let num = BigReal::from_bigint(q.numer().clone(), ctx.bits());
        let den = BigReal::from_bigint(q.denom().clone(), ctx.bits());
        sinclab::threshold_scan(&(pi(&ctx) * num / den), &ctx)?
    } else {
        let Some(q) = parse_rational(v) else {
            return usage(format!("cannot read threshold `{value}`"));
        };
        if !q.is_positive() {
            return usage("the threshold must be positive");
        }
        sinclab::threshold_scan_rational(&q, &ctx)?
    };
    Ok(Report::default().field("threshold", value).field("n", n))
}

#[allow(clippy::too_many_arguments)]
fn cmd_bb(
    problem: Problem,
    variant: VariantArg,
    tol: f64,
    max_iter: usize,
    x0: Option<&str>,
    safeguard: SafeguardArg,
    compare: bool,
    d: u32,
) -> CmdResult<Report> {
    if tol.is_nan() || tol <= 0.0 {
        return usage("--tol must be positive");
    }
    let (obj, start, convex): (Box<dyn Objective>, Vec<f64>, bool) = match problem {
        Problem::Quad => (Box::new(Quadratic::diagonal(&[1.0, 100.0])), vec![100.0, 1.0], true),
        Problem::Rosenbrock => (Box::new(Rosenbrock::default()), vec![-1.2, 1.0], false),
        Problem::Quartic => (Box::new(QuarticBowl { c: vec![1.0, 2.0, 3.0] }), vec![0.0; 3], true),
    };
    let x0 = match x0 {
        None => start,
        Some(s) => {
            let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
            match v {
                Ok(v) if v.len() == obj.dimension() && v.iter().all(|c| c.is_finite()) => v,
                _ => return usage(format!("--x0 needs {} comma-separated finite numbers", obj.dimension())),
            }
        }
    };
    let guard = match (safeguard, convex) {
        (SafeguardArg::On, _) | (SafeguardArg::Auto, false) => Safeguard::default(),
        _ => Safeguard::off(),
    };
    let v = match variant {
        VariantArg::Bb1 => Variant::Bb1,
        VariantArg::Bb2 => Variant::Bb2,
    };
    let r = bbopt::bb_minimize(obj.as_ref(), &x0, tol, max_iter, v, guard)?;
    let mut rep = Report::default()
        .field("problem", obj.name())
        .field("variant", if v == Variant::Bb1 { "bb1" } else { "bb2" })
        .field("safeguard", guard.enabled)
        .field("converged", r.converged)
        .field("iterations", r.iterations)
        .field("f", f64_dec(r.f, d))
        .field("x", Value::Array(r.x.iter().map(|c| f64_dec(*c, d)).collect()));
    if compare {
        let sd = bbopt::steepest_descent_baseline(obj.as_ref(), &x0, tol, max_iter)?;
        rep = rep.field("steepest_descent_iterations", sd.iterations).field("steepest_descent_converged", sd.converged);
    }
    let rows = r
        .trace
        .iter()
        .map(|t| {
            vec![json!(t.k), f64_dec(t.f, d), f64_dec(t.grad_norm, d), t.gamma.map_or(Value::Null, |g| f64_dec(g, d))]
        })
        .collect();
    Ok(rep.table("trace", vec!["k", "f", "grad_norm", "gamma"], rows))
}

fn parse_real(s: &str, name: &str, ctx: &PrecisionContext) -> CmdResult<BigReal> {
    BigReal::parse_decimal(s.trim(), ctx.bits()).map_err(|_| Failure::Usage(format!("--{name}: `{s}` is not a decimal number")))
}

fn cmd_agm(a: &str, b: &str, kind: AgmKindArg, identity: bool, d: u32) -> CmdResult<Report> {
    let ctx = PrecisionContext::new(d);
    let (a, b) = (parse_real(a, "a", &ctx)?, parse_real(b, "b", &ctx)?);
    if !a.is_positive() || !b.is_positive() {
        return usage("the AGM needs a > 0 and b > 0");
    }
    let k = match kind {
        AgmKindArg::Quadratic => AgmKind::Quadratic,
        AgmKindArg::Cubic => AgmKind::Cubic,
    };
    let trace = agmpi::agm_trace(k, &a, &b, &ctx)?;
    let last = trace.last().expect("trace starts with the inputs");
    let mut rep = Report::default()
        .field("kind", if k == AgmKind::Quadratic { "quadratic" } else { "cubic" })
        .field("value", dec(&last.a, d))
        .field("iterations", last.iteration);
    if identity {
        let ratio = &b / &a;
        if ratio >= BigReal::one(ctx.bits()) {
            return usage("--identity needs b < a");
        }
        match k {
            AgmKind::Quadratic => {
                rep = rep.field("residual", err_dec(&agmpi::gauss_identity_residual(&ratio, &ctx)?, d));
            }
            AgmKind::Cubic => {
                for arg in [CubicArgument::OneMinusKSquared, CubicArgument::OneMinusKCubed] {
                    let r = agmpi::cubic_identity_residual(&ratio, arg, &ctx)?;
                    rep = rep.field(&format!("residual_{}", arg.label()), err_dec(&r, d));
                }
            }
        }
    }
    let rows = trace
        .iter()
        .map(|s| vec![json!(s.iteration), dec(&s.a, d), dec(&s.b, d), err_dec(&s.gap(), d)])
        .collect();
    Ok(rep.table("trace", vec!["iteration", "a", "b", "gap"], rows))
}

/// Significant digits written in a decimal literal.
fn significant_digits(s: &str) -> usize {
    let mant = s.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.trim_start_matches('0').len()
}

fn cmd_recognize(value: &str, basis: &str, d: u32) -> CmdResult<Report> {
    let have = significant_digits(value);
    if have < d as usize {
        return usage(format!("--value carries {have} significant digits but --digits asks for {d}"));
    }
    if d <= recognize::DEFAULT_SAFETY_DIGITS {
        return usage(format!("recognize needs --digits above {}", recognize::DEFAULT_SAFETY_DIGITS));
    }
    let ctx = PrecisionContext::new(d);
    let x = parse_real(value, "value", &ctx)?;
    let names: Vec<&str> = basis.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return usage("--basis is empty");
    }
    if let Some(bad) = names.iter().find(|n| !BASIS_NAMES.contains(n) && **n != "1") {
        return usage(format!("unknown basis constant `{bad}` (known: {})", BASIS_NAMES.join(", ")));
    }
    let b = recognize::basis(&names, &ctx)?;
    let matches = recognize::recognize(&x, &b, d)?;
    let rows = matches
        .iter()
        .map(|m| {
            vec![
                json!(m.rendering),
                Value::Array(m.coefficients.iter().map(|c| json!(c)).collect()),
                Value::Array(m.names.iter().map(|c| json!(c)).collect()),
                err_dec(&m.residual, d),
                json!(m.confidence_digits),
            ]
        })
        .collect();
    Ok(Report::default()
        .field("value", dec(&x, d))
        .field("digits", d)
        .field("basis", Value::Array(names.iter().map(|n| json!(n)).collect()))
        .table("matches", vec!["rendering", "coefficients", "constants", "residual", "confidence_digits"], rows))
}

fn cmd_quad(integrand: Integrand, n: u32, d: u32) -> CmdResult<Report> {
    let ctx = PrecisionContext::new(d);
    let bits = ctx.bits();
    let eps = ten_to_minus(d as i64, &ctx);
    let zero = BigReal::zero(bits);
    let one = BigReal::one(bits);
    let r = match integrand {
        Integrand::Pi4 => integrate_finite(|x| Ok(BigReal::from_i64(4, bits) / (&one + &x.square())), &zero, &one, &eps, &ctx)?,
        Integrand::Log => integrate_finite(|x| Ok(-ln(x, &ctx)?), &zero, &one, &eps, &ctx)?,
        Integrand::Gauss => integrate_semi_infinite(|x| exp(&-x.square(), &ctx), &zero, &eps, &ctx, None)?,
        Integrand::Tk0 => integrate_semi_infinite(|t| Ok(t * &bessel_k0(t, &ctx)?), &zero, &eps, &ctx, None)?,
        Integrand::Tk0n => {
            if n == 0 {
                return usage("n must satisfy n ≥ 1");
            }
            let solver = CnSolver::new(&ctx)?;
            solver.moment(n, &eps)?
        }
    };
    Ok(Report::default()
        .field("integrand", integrand.to_possible_value().expect("named").get_name())
        .field("value", dec(&r.value, d))
        .field("error_estimate", err_dec(&r.error_estimate, d))
        .field("levels", r.levels_used)
        .field("evaluations", r.evaluations)
        .field("converged", r.converged))
}

fn cmd_walk(
    constant: &str,
    base: u32,
    count: usize,
    image: Option<ImageArg>,
    size: u32,
    color: ColorArg,
    out: Option<&PathBuf>,
) -> CmdResult<Output> {
    let c: Constant = constant.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    if !(2..=36).contains(&base) {
        return usage(format!("--base must lie in 2..=36, got {base}"));
    }
    if count == 0 {
        return usage("--digits must be at least 1");
    }
    if size < walks::MIN_IMAGE_SIZE {
        return usage(format!("--size must be at least {}", walks::MIN_IMAGE_SIZE));
    }
    let format = match image {
        Some(ImageArg::Ppm) => ImageFormat::Ppm,
        Some(ImageArg::Svg) => ImageFormat::Svg,
        None => match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ppm") => ImageFormat::Ppm,
            _ => ImageFormat::Svg,
        },
    };
    let color = match color {
        ColorArg::Mono => ColorMode::Mono,
        ColorArg::Progress => ColorMode::Progress,
    };
    let stream = walks::digits_auto(c, base, count)?;
    let path = walks::walk(&stream)?;
    let bytes = walks::render(&path, format, size, size, color)?;
    let (min_x, min_y, max_x, max_y) = path.bounding_box();
    let (ex, ey) = path.endpoint();
    let summary = Report::default()
        .field("constant", c.name())
        .field("base", base)
        .field("steps", path.steps())
        .field("endpoint", json!([ex, ey]))
        .field("bounding_box", json!([min_x, min_y, max_x, max_y]))
        .field("format", if format == ImageFormat::Ppm { "ppm" } else { "svg" })
        .field("bytes", bytes.len());
    Ok(Output::Image { bytes, summary })
}
