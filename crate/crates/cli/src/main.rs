//! `prolate`: tables, figure data and verification suites for prolate
//! spheroidal wave functions.
//!
//! Exit codes: 0 success, 1 verification failure or failed rows,
//! 2 configuration error, 3 numerical non-convergence.

mod cache;
mod output;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use prolate::experiments::{
    experiment1, experiment1_sweep, experiment2, experiment2_figure, experiment3, Outcome,
};
use prolate::verify::run_plan;
use prolate::{NPolicy, OutputFormat, RunConfig, Session, VerifyPlan, VerifyReport};
use serde::Serialize;

use cache::ChiCache;
use output::{write_csv, write_json, write_rows, CsvRow};

const EXIT_VERIFY: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "prolate", version, about = "Prolate spheroidal eigenvalues, bounds and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(clap::Args)]
struct Opts {
    /// JSON file mirroring the run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Band limits, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    c: Option<Vec<f64>>,
    /// Explicit indices, comma separated.
    #[arg(long, global = true, value_delimiter = ',', conflicts_with = "n_range")]
    n: Option<Vec<usize>>,
    /// Half-open index range `START..END`.
    #[arg(long, global = true, value_parser = parse_range)]
    n_range: Option<(usize, usize)>,
    /// Thresholds, comma separated; `e^-50` means exp(-50).
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_eps)]
    eps: Option<Vec<f64>>,
    /// Output file (directory for `report`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Adds c = 1e5 to the default band limits.
    #[arg(long, global = true)]
    large: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    /// Fixed block dimension instead of automatic truncation.
    #[arg(long, global = true)]
    truncation_dim: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// |λ_n| and μ_n at n = 0, ⌊c/π⌋, ⌊2c/π⌋.
    Table1 {
        /// Every n from 0 to ⌊2c/π⌋ instead.
        #[arg(long)]
        sweep: bool,
    },
    /// First indices where |λ_n| and ζ fall below each threshold.
    Table2,
    /// log|λ_n| and log ζ for even n in (2c/π, 2c/π + 20 log c).
    Figures,
    /// Figure columns plus -δ(n), log ξ and the ordering check.
    Experiment3,
    /// Runs the property suites; one record per check per sample.
    Verify(VerifyArgs),
    /// Writes every table, the figure data and the verification records
    /// into the `--out` directory.
    Report(VerifyArgs),
}

#[derive(clap::Args, Clone)]
struct VerifyArgs {
    /// Multiplies every χ_n by (1 + FRACTION) before the structure checks.
    #[arg(long, value_name = "FRACTION")]
    perturb_chi: Option<f64>,
    /// Grid size for the auxiliary-function checks.
    #[arg(long)]
    aux_points: Option<usize>,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected START..END, got {s}"))?;
    let start = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let end = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok((start, end))
}

fn parse_eps(s: &str) -> Result<f64, String> {
    let s = s.trim();
    match s.strip_prefix("e^") {
        Some(exp) => exp.parse::<f64>().map(f64::exp).map_err(|e| format!("{s}: {e}")),
        None => s.parse().map_err(|e| format!("{s}: {e}")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::config(format!("i/o error: {e}"))
    }
}

fn load_config(opts: &Opts, default_c: Option<Vec<f64>>) -> Result<RunConfig, Failure> {
    let mut config = match &opts.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?
        }
        None => {
            let mut c = RunConfig::default();
            if let Some(list) = default_c {
                c.c_list = list;
            }
            c
        }
    };
    if let Some(c) = &opts.c {
        config.c_list = c.clone();
    }
    if let Some(n) = &opts.n {
        config.n_policy = NPolicy::List(n.clone());
    }
    if let Some((start, end)) = opts.n_range {
        config.n_policy = NPolicy::Range { start, end };
    }
    if let Some(eps) = &opts.eps {
        config.epsilon_list = eps.clone();
    }
    if let Some(out) = &opts.out {
        config.out = Some(out.to_string_lossy().into_owned());
    }
    if let Some(f) = opts.format {
        config.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    config.large |= opts.large;
    if opts.parallel.is_some() {
        config.parallel = opts.parallel;
    }
    if opts.truncation_dim.is_some() {
        config.truncation_dim = opts.truncation_dim;
    }
    config.validate().map_err(|e| Failure::config(e.to_string()))?;
    Ok(config)
}

fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn row_status<T>(outcome: &Outcome<T>) -> u8 {
    for f in &outcome.failures {
        let at = f.n.map_or_else(String::new, |n| format!(" n = {n}"));
        eprintln!("row failed (c = {}{at}): {}", f.c, f.error);
    }
    if outcome.failures.iter().any(|f| f.non_convergence) {
        EXIT_NONCONVERGENCE
    } else if outcome.failures.is_empty() {
        0
    } else {
        EXIT_VERIFY
    }
}

fn emit<T: CsvRow + Serialize>(
    outcome: &Outcome<T>,
    format: OutputFormat,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let mut sink = open_sink(out)?;
    write_rows(&mut sink, format, outcome)?;
    sink.flush()?;
    Ok(row_status(outcome))
}

fn verify_plan(config: &RunConfig, args: &VerifyArgs) -> VerifyPlan {
    let mut plan = VerifyPlan {
        c_list: config.c_list.clone(),
        ..VerifyPlan::default()
    };
    if let Some(p) = args.perturb_chi {
        plan.chi_scale = 1.0 + p;
    }
    if let Some(k) = args.aux_points {
        plan.aux_points = k;
    }
    plan
}

fn emit_verify(report: &VerifyReport, format: OutputFormat, out: Option<&Path>) -> Result<u8, Failure> {
    let mut sink = open_sink(out)?;
    match format {
        OutputFormat::Csv => write_csv(&mut sink, &report.records)?,
        OutputFormat::Json => write_json(&mut sink, report)?,
    }
    sink.flush()?;
    let summary = report.summary();
    let failed: usize = summary.iter().map(|s| s.3).sum();
    let applicable: usize = summary.iter().map(|s| s.2).sum();
    for (suite, check, _, bad) in summary.iter().filter(|s| s.3 > 0) {
        eprintln!("FAIL {suite}/{check}: {bad} violations");
    }
    eprintln!(
        "{} records, {applicable} applicable, {failed} failed",
        report.records.len()
    );
    Ok(if failed > 0 { EXIT_VERIFY } else { 0 })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let verify_default = VerifyPlan::default().c_list;
    let default_c = match cli.command {
        Command::Verify(_) => Some(verify_default),
        _ => None,
    };
    let config = load_config(&cli.opts, default_c)?;
    let session = Session::new(config.clone()).map_err(|e| Failure::config(e.to_string()))?;
    let cache = ChiCache::from_env(config.truncation_dim);
    if let Some(cache) = &cache {
        session.contexts().iter().for_each(|ctx| cache.load(ctx));
    }
    let out = config.out.as_deref().map(Path::new);
    let format = config.format;
    let code = match &cli.command {
        Command::Table1 { sweep } => {
            let rows = if *sweep {
                experiment1_sweep(&session)
            } else {
                experiment1(&session)
            };
            emit(&rows, format, out)?
        }
        Command::Table2 => emit(&experiment2(&session), format, out)?,
        Command::Figures => emit(&experiment2_figure(&session), format, out)?,
        Command::Experiment3 => emit(&experiment3(&session), format, out)?,
        Command::Verify(args) => {
            let report = session.install(|| run_plan(&verify_plan(&config, args), session.contexts()));
            emit_verify(&report, format, out)?
        }
        Command::Report(args) => {
            let dir = out.ok_or_else(|| Failure::config("report needs --out DIRECTORY"))?;
            fs::create_dir_all(dir)?;
            let ext = match format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            let path = |name: &str| dir.join(format!("{name}.{ext}"));
            let codes = [
                emit(&experiment1(&session), format, Some(&path("table1")))?,
                emit(&experiment1_sweep(&session), format, Some(&path("table1_sweep")))?,
                emit(&experiment2(&session), format, Some(&path("table2")))?,
                emit(&experiment2_figure(&session), format, Some(&path("figures")))?,
                emit(&experiment3(&session), format, Some(&path("experiment3")))?,
                emit_verify(
                    &session.install(|| run_plan(&verify_plan(&config, args), session.contexts())),
                    format,
                    Some(&path("verify")),
                )?,
            ];
            codes.into_iter().max().unwrap_or(0)
        }
    };
    if let Some(cache) = &cache {
        for ctx in session.contexts() {
            if let Err(e) = cache.store(ctx) {
                eprintln!("warning: could not write cache: {e}");
            }
        }
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
