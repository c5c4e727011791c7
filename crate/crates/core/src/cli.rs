//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a verification or method comparison
//! fails, 2 on invalid input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fixedpoints::{betti_histogram, euler_by_count, BettiTable};
use crate::flagcore::{FlagShape, Multidegree};
use crate::genfun::{
    betti_from_series, euler_from_series, euler_series, theorem1_series, SeriesRequest, ZCap, Z,
};
use crate::identity::{
    cross_check, verify_comb, verify_euler_substitution, verify_pointwise_weights, verify_xpf,
    VerificationReport,
};
use crate::mpoly::SparsePoly;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const THREADS_ENV: &str = "HYPERQUOT_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Betti,
    Euler,
    Series,
    EulerSeries,
    Verify,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Count,
    Series,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    #[default]
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Weights,
    Comb,
    Xpf,
    Cross,
    Euler,
    All,
}

/// One unit of work, from flags or from a line of a `--jobs` file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    pub n: usize,
    pub s: Vec<usize>,
    /// Multidegree, or per-variable caps for the series and verify commands.
    #[serde(default)]
    pub d: Option<Vec<u32>>,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub zmax: ZCap,
    #[serde(default)]
    pub checks: Option<Vec<Check>>,
}

#[derive(Debug, Parser)]
#[command(
    name = "hyperquot",
    version,
    about = "Betti numbers and Euler characteristics of hyperquot schemes"
)]
struct Cli {
    /// Run every JSON job spec in FILE (one per line) instead of a single command.
    #[arg(long, value_name = "FILE")]
    jobs: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<CliCommand>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Betti numbers b_{2M} of HQ_d
    Betti(JobArgs),
    /// Euler characteristic of HQ_d
    Euler(JobArgs),
    /// Poincaré generating function, truncated at t^d
    Series(JobArgs),
    /// Euler characteristic generating function, truncated at t^d
    EulerSeries(JobArgs),
    /// Run structural identity checks for every degree up to --d
    Verify(JobArgs),
    /// Compare fixed-point counting against the series at one degree
    Compare(JobArgs),
}

#[derive(Debug, Args)]
struct JobArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated subspace dimensions s_1,...,s_l
    #[arg(long, value_delimiter = ',', required = true)]
    s: Vec<usize>,
    /// Comma-separated multidegree (or caps)
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    method: Method,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Cap on the z exponent: `auto` or an integer
    #[arg(long, default_value = "auto")]
    zmax: ZCap,
    #[arg(long, value_enum, value_delimiter = ',')]
    checks: Option<Vec<Check>>,
}

impl JobArgs {
    fn into_spec(self, command: Command) -> JobSpec {
        JobSpec {
            command,
            n: self.n,
            s: self.s,
            d: self.d,
            method: self.method,
            format: self.format,
            zmax: self.zmax,
            checks: self.checks,
        }
    }
}

/// Captured result of a CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub status: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            status: EXIT_OK,
        }
    }

    fn invalid(msg: impl std::fmt::Display) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            status: EXIT_INVALID,
        }
    }
}

/// Parse `args` (including the program name) and run. `threads` is the raw
/// value of `HYPERQUOT_THREADS`, if set.
pub fn main_with(args: impl IntoIterator<Item = OsString>, threads: Option<String>) -> Outcome {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(e.to_string()),
                _ => {
                    let rendered = e.to_string();
                    let line = rendered
                        .lines()
                        .map(str::trim)
                        .take_while(|l| !l.starts_with("Usage:"))
                        .filter(|l| {
                            !l.is_empty()
                                && !l.starts_with("tip:")
                                && !l.starts_with("For more information")
                        })
                        .collect::<Vec<_>>()
                        .join(" ");
                    Outcome::invalid(line.trim_start_matches("error: "))
                }
            };
        }
    };
    let pool = match thread_pool(threads.as_deref()) {
        Ok(pool) => pool,
        Err(msg) => return Outcome::invalid(msg),
    };
    pool.install(|| match (cli.jobs, cli.command) {
        (Some(_), Some(_)) => Outcome::invalid("--jobs cannot be combined with a subcommand"),
        (None, None) => Outcome::invalid("expected a subcommand or --jobs FILE"),
        (Some(path), None) => run_batch(&path),
        (None, Some(cmd)) => {
            let spec = match cmd {
                CliCommand::Betti(a) => a.into_spec(Command::Betti),
                CliCommand::Euler(a) => a.into_spec(Command::Euler),
                CliCommand::Series(a) => a.into_spec(Command::Series),
                CliCommand::EulerSeries(a) => a.into_spec(Command::EulerSeries),
                CliCommand::Verify(a) => a.into_spec(Command::Verify),
                CliCommand::Compare(a) => a.into_spec(Command::Compare),
            };
            run(&spec)
        }
    })
}

fn thread_pool(threads: Option<&str>) -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(raw) = threads {
        let count: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
        builder = builder.num_threads(count);
    }
    builder.build().map_err(|e| e.to_string())
}

/// Run every job in the file concurrently; output is emitted in input order.
fn run_batch(path: &PathBuf) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::invalid(format!("cannot read {}: {e}", path.display())),
    };
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    let outcomes: Vec<Outcome> = lines
        .par_iter()
        .map(
            |&(lineno, line)| match serde_json::from_str::<JobSpec>(line) {
                Ok(spec) => run(&spec),
                Err(e) => Outcome::invalid(format!("job on line {lineno}: {e}")),
            },
        )
        .collect();
    let mut merged = Outcome::ok(String::new());
    for o in outcomes {
        merged.stdout.push_str(&o.stdout);
        merged.stderr.push_str(&o.stderr);
        merged.status = merged.status.max(o.status);
    }
    merged
}

/// Execute one job.
pub fn run(job: &JobSpec) -> Outcome {
    let shape = match FlagShape::new(job.n, job.s.clone()) {
        Ok(s) => s,
        Err(e) => return Outcome::invalid(e),
    };
    let d = Multidegree::new(job.d.clone().unwrap_or_else(|| vec![0; shape.l()]));
    if let Err(e) = shape.check_degree(&d) {
        return Outcome::invalid(e);
    }
    let result = match job.command {
        Command::Betti => betti(job, &shape, &d),
        Command::Euler => euler(job, &shape, &d),
        Command::Series => series(job, &shape, &d, false),
        Command::EulerSeries => series(job, &shape, &d, true),
        Command::Verify => verify(job, &shape, &d),
        Command::Compare => compare(job, &shape, &d),
    };
    result.unwrap_or_else(Outcome::invalid)
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct BettiEntry {
    #[serde(rename = "M")]
    m: usize,
    b: String,
}

#[derive(Serialize)]
struct BettiOutput<'a> {
    n: usize,
    s: &'a [usize],
    d: &'a [u32],
    dimension: u64,
    euler: String,
    betti: Vec<BettiEntry>,
    method: Method,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    mismatch: Option<String>,
}

fn first_mismatch(a: &BettiTable, b: &BettiTable) -> Option<String> {
    let width = a.counts.len().max(b.counts.len());
    (0..width).find(|&m| a.get(m) != b.get(m)).map(|m| {
        format!(
            "b_{} differs: {} by counting, {} by series",
            2 * m,
            a.get(m),
            b.get(m)
        )
    })
}

fn betti(job: &JobSpec, shape: &FlagShape, d: &Multidegree) -> Result<Outcome, Error> {
    let dimension = shape.hyperquot_dimension(d)?;
    let (table, mismatch) = match job.method {
        Method::Count => (betti_histogram(shape, d)?, None),
        Method::Series => (betti_from_series(shape, d, job.zmax)?, None),
        Method::Both => {
            let counted = betti_histogram(shape, d)?;
            let series = betti_from_series(shape, d, job.zmax)?;
            let mismatch = first_mismatch(&counted, &series);
            (counted, mismatch)
        }
    };
    let euler = table.total();
    let mut out = String::new();
    match job.format {
        Format::Json => {
            let payload = BettiOutput {
                n: shape.n(),
                s: shape.subspace_dims(),
                d: d.as_slice(),
                dimension,
                euler: euler.to_string(),
                betti: table
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(m, b)| BettiEntry {
                        m,
                        b: b.to_string(),
                    })
                    .collect(),
                method: job.method,
                version: VERSION,
                mismatch: mismatch.clone(),
            };
            out.push_str(&to_json(&payload));
        }
        Format::Table => {
            let width = table
                .counts
                .iter()
                .map(|b| b.to_string().len())
                .max()
                .unwrap_or(1)
                .max(4);
            let mwidth = table.counts.len().to_string().len().max(2);
            let _ = writeln!(out, "# {shape} d={d} method={}", method_name(job.method));
            let _ = writeln!(out, "{:>mwidth$}  {:>width$}", "M", "b_2M");
            for (m, b) in table.counts.iter().enumerate() {
                let _ = writeln!(out, "{:>mwidth$}  {:>width$}", m, b.to_string());
            }
            let _ = writeln!(out, "chi = {euler}, dimension = {dimension}");
            if let Some(msg) = &mismatch {
                let _ = writeln!(out, "MISMATCH: {msg}");
            }
        }
        Format::Csv => {
            out.push_str("n,s,d,dimension,euler,method,version,M,b\n");
            for (m, b) in table.counts.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    shape.n(),
                    join(shape.subspace_dims(), ";"),
                    join(d.as_slice(), ";"),
                    dimension,
                    euler,
                    method_name(job.method),
                    VERSION,
                    m,
                    b
                );
            }
        }
    }
    let status = if mismatch.is_some() {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        stdout: out,
        stderr: String::new(),
        status,
    })
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Count => "count",
        Method::Series => "series",
        Method::Both => "both",
    }
}

#[derive(Serialize)]
struct EulerOutput<'a> {
    n: usize,
    s: &'a [usize],
    d: &'a [u32],
    dimension: u64,
    euler: String,
    method: Method,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    mismatch: Option<String>,
}

fn euler(job: &JobSpec, shape: &FlagShape, d: &Multidegree) -> Result<Outcome, Error> {
    let dimension = shape.hyperquot_dimension(d)?;
    let (value, mismatch): (BigUint, Option<String>) = match job.method {
        Method::Count => (euler_by_count(shape, d)?, None),
        Method::Series => (euler_from_series(shape, d)?, None),
        Method::Both => {
            let a = euler_by_count(shape, d)?;
            let b = euler_from_series(shape, d)?;
            let mismatch = (a != b).then(|| format!("{a} fixed points but series coefficient {b}"));
            (a, mismatch)
        }
    };
    let out = match job.format {
        Format::Json => to_json(&EulerOutput {
            n: shape.n(),
            s: shape.subspace_dims(),
            d: d.as_slice(),
            dimension,
            euler: value.to_string(),
            method: job.method,
            version: VERSION,
            mismatch: mismatch.clone(),
        }),
        Format::Table => match &mismatch {
            None => format!("{value}\n"),
            Some(msg) => format!("{value}\nMISMATCH: {msg}\n"),
        },
        Format::Csv => format!(
            "n,s,d,dimension,euler,method,version\n{},{},{},{},{},{},{}\n",
            shape.n(),
            join(shape.subspace_dims(), ";"),
            join(d.as_slice(), ";"),
            dimension,
            value,
            method_name(job.method),
            VERSION
        ),
    };
    let status = if mismatch.is_some() {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        stdout: out,
        stderr: String::new(),
        status,
    })
}

#[derive(Serialize)]
struct SeriesTerm {
    d: Vec<u32>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    m: Option<u32>,
    c: String,
}

#[derive(Serialize)]
struct SeriesOutput<'a> {
    n: usize,
    s: &'a [usize],
    caps: &'a [u32],
    #[serde(skip_serializing_if = "Option::is_none")]
    zmax: Option<u32>,
    kind: &'static str,
    terms: Vec<SeriesTerm>,
    version: &'static str,
}

fn series(
    job: &JobSpec,
    shape: &FlagShape,
    caps: &Multidegree,
    euler_only: bool,
) -> Result<Outcome, Error> {
    let req = SeriesRequest::new(shape.clone(), caps.as_slice().to_vec(), job.zmax)?;
    let poly: SparsePoly = if euler_only {
        euler_series(&req)?
    } else {
        theorem1_series(&req)?
    };
    let terms: Vec<SeriesTerm> = poly
        .terms()
        .map(|(e, c)| SeriesTerm {
            d: e.as_slice()[1..].to_vec(),
            m: (!euler_only).then(|| e.get(Z)),
            c: c.to_string(),
        })
        .collect();
    // order by d, then M
    let mut terms = terms;
    terms.sort_by(|a, b| (&a.d, a.m).cmp(&(&b.d, b.m)));
    let kind = if euler_only { "euler" } else { "poincare" };
    let out = match job.format {
        Format::Json => to_json(&SeriesOutput {
            n: shape.n(),
            s: shape.subspace_dims(),
            caps: caps.as_slice(),
            zmax: (!euler_only).then(|| req.resolved_z_cap()),
            kind,
            terms,
            version: VERSION,
        }),
        Format::Table => {
            let mut out = format!("# {shape} caps={caps} {kind}\n");
            for d in Multidegree::all_within(caps.as_slice()) {
                let row: Vec<&SeriesTerm> = terms.iter().filter(|t| t.d == d.as_slice()).collect();
                let body = if euler_only {
                    row.first().map_or("0".to_string(), |t| t.c.clone())
                } else if row.is_empty() {
                    "0".to_string()
                } else {
                    row.iter()
                        .map(|t| match t.m {
                            Some(0) | None => t.c.clone(),
                            Some(m) => {
                                let zpow = if m == 1 {
                                    "z".to_string()
                                } else {
                                    format!("z^{m}")
                                };
                                if t.c == "1" {
                                    zpow
                                } else {
                                    format!("{}*{zpow}", t.c)
                                }
                            }
                        })
                        .collect::<Vec<_>>()
                        .join(" + ")
                };
                let _ = writeln!(out, "{d}  {body}");
            }
            out
        }
        Format::Csv => {
            let mut out = String::from(if euler_only { "d,c\n" } else { "d,M,c\n" });
            for t in &terms {
                match t.m {
                    Some(m) => {
                        let _ = writeln!(out, "{},{},{}", join(&t.d, ";"), m, t.c);
                    }
                    None => {
                        let _ = writeln!(out, "{},{}", join(&t.d, ";"), t.c);
                    }
                }
            }
            out
        }
    };
    Ok(Outcome::ok(out))
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    n: usize,
    s: &'a [usize],
    caps: &'a [u32],
    verdict: &'static str,
    reports: &'a [VerificationReport],
    version: &'static str,
}

fn verify(job: &JobSpec, shape: &FlagShape, caps: &Multidegree) -> Result<Outcome, Error> {
    let mut checks = job.checks.clone().unwrap_or_else(|| vec![Check::All]);
    if checks.contains(&Check::All) {
        checks = vec![
            Check::Weights,
            Check::Comb,
            Check::Xpf,
            Check::Cross,
            Check::Euler,
        ];
    }
    checks.sort();
    checks.dedup();
    let degrees = Multidegree::all_within(caps.as_slice());
    let req = SeriesRequest::new(shape.clone(), caps.as_slice().to_vec(), job.zmax)?;
    let mut reports = Vec::new();
    for check in checks {
        match check {
            Check::Weights => {
                for d in &degrees {
                    reports.push(verify_pointwise_weights(shape, d)?);
                }
            }
            Check::Comb => reports.push(verify_comb(&req)?),
            Check::Xpf => reports.push(verify_xpf(shape)),
            Check::Cross => {
                for d in &degrees {
                    reports.push(cross_check(shape, d)?);
                }
            }
            Check::Euler => reports.push(verify_euler_substitution(&req)?),
            Check::All => unreachable!("expanded above"),
        }
    }
    let passed = reports.iter().all(VerificationReport::passed);
    let out = match job.format {
        Format::Json => to_json(&VerifyOutput {
            n: shape.n(),
            s: shape.subspace_dims(),
            caps: caps.as_slice(),
            verdict: if passed { "pass" } else { "fail" },
            reports: &reports,
            version: VERSION,
        }),
        Format::Table => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(out, "{r}");
            }
            let _ = writeln!(
                out,
                "{}",
                if passed {
                    "all checks passed"
                } else {
                    "verification FAILED"
                }
            );
            out
        }
        Format::Csv => {
            let mut out = String::from("check,parameters,verdict,cases,counterexample\n");
            for r in &reports {
                let ce = r
                    .counterexample
                    .as_ref()
                    .map(|c| c.to_string())
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},\"{}\",{},{},\"{}\"",
                    r.check,
                    r.parameters,
                    if r.passed() { "pass" } else { "fail" },
                    r.cases,
                    ce.replace('"', "'")
                );
            }
            out
        }
    };
    let status = if passed { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Outcome {
        stdout: out,
        stderr: String::new(),
        status,
    })
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    n: usize,
    s: &'a [usize],
    d: &'a [u32],
    dimension: u64,
    count: Vec<String>,
    series: Vec<String>,
    report: &'a VerificationReport,
    version: &'static str,
}

fn compare(job: &JobSpec, shape: &FlagShape, d: &Multidegree) -> Result<Outcome, Error> {
    let dimension = shape.hyperquot_dimension(d)?;
    let counted = betti_histogram(shape, d)?;
    let series = betti_from_series(shape, d, job.zmax)?;
    let report = cross_check(shape, d)?;
    let strings = |t: &BettiTable| t.counts.iter().map(BigUint::to_string).collect::<Vec<_>>();
    let out = match job.format {
        Format::Json => to_json(&CompareOutput {
            n: shape.n(),
            s: shape.subspace_dims(),
            d: d.as_slice(),
            dimension,
            count: strings(&counted),
            series: strings(&series),
            report: &report,
            version: VERSION,
        }),
        Format::Table => {
            let mut out = format!("# {shape} d={d}\n");
            let _ = writeln!(out, "{:>3}  {:>12}  {:>12}", "M", "count", "series");
            let width = counted.counts.len().max(series.counts.len());
            for m in 0..width {
                let _ = writeln!(
                    out,
                    "{:>3}  {:>12}  {:>12}",
                    m,
                    counted.get(m).to_string(),
                    series.get(m).to_string()
                );
            }
            let _ = writeln!(out, "{report}");
            out
        }
        Format::Csv => {
            let mut out = String::from("M,count,series\n");
            let width = counted.counts.len().max(series.counts.len());
            for m in 0..width {
                let _ = writeln!(out, "{},{},{}", m, counted.get(m), series.get(m));
            }
            out
        }
    };
    let status = if report.passed() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    };
    Ok(Outcome {
        stdout: out,
        stderr: String::new(),
        status,
    })
}
