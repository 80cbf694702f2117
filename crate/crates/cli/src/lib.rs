//! Experiment runner for the `smallball` library: bound evaluation, Monte
//! Carlo estimation, LCD search, oracle suites and t-grid sweeps.
//!
//! Exit codes: 0 when every check passes, 1 on a bound violation or oracle
//! failure, 2 on a usage or configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use smallball::lcd::{lcd_search, LcdParams};
use smallball::models::Matrix;
use smallball::TheoremId;

pub mod config;
pub mod experiment;
pub mod fixtures;
pub mod oracle;
pub mod output;

use config::{BoundParams, ExperimentConfig, Format};
use output::num;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad flags, config or parameters (exit 2).
    Usage(String),
    /// A check failed or a computation did not converge (exit 1).
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(name = "smallball", version, about = "Small-ball probability bounds and their numerical verification")]
pub struct Cli {
    /// Base seed for every Monte Carlo stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Confidence level of the Clopper–Pearson intervals [default: 0.99].
    #[arg(long, global = true)]
    pub confidence: Option<f64>,
    /// JSON experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format for tabular commands.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one bound and print its report as JSON.
    Bound(BoundArgs),
    /// Monte Carlo small-ball estimates on the config's t grid.
    Estimate,
    /// Bound vs Monte Carlo on the t grid; exit 1 if any row fails.
    Verify,
    /// Bracket the least common denominator of a matrix.
    Lcd(LcdArgs),
    /// Run an oracle suite: lemma22, prop23, m-identity, gamma-ts, lo-lemma.
    Oracle { suite: String },
    /// Tabulate every applicable bound across the t grid.
    Sweep,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Theorem id (overrides the config's).
    #[arg(long)]
    pub theorem: Option<TheoremId>,
    /// Bound parameter override, `key=value` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
}

#[derive(Debug, Args)]
pub struct LcdArgs {
    /// Matrix file: a JSON array of rows, or one row per line of
    /// whitespace- or comma-separated numbers.
    pub matrix: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = experiment::DEFAULT_LCD_RADIUS)]
    pub radius_max: f64,
    #[arg(long, default_value_t = experiment::DEFAULT_LCD_STEP)]
    pub grid_step: f64,
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.samples.is_some() {
        cfg.samples = cli.samples;
    }
    if cli.confidence.is_some() {
        cfg.confidence = cli.confidence;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_path<'a>(cli: &'a Cli, cfg: &'a ExperimentConfig) -> Option<&'a Path> {
    cli.out.as_deref().or(cfg.output.as_ref().and_then(|o| o.path.as_deref()))
}

fn out_format(cli: &Cli, cfg: &ExperimentConfig) -> Format {
    cli.format.or(cfg.output.as_ref().and_then(|o| o.format)).unwrap_or_default()
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = load_config(cli)?;
    let path = out_path(cli, &cfg);
    let format = out_format(cli, &cfg);
    match &cli.command {
        Command::Bound(args) => {
            let base = match (&cfg.bound, args.theorem) {
                (Some(b), Some(th)) => BoundParams { theorem: th, ..b.clone() },
                (Some(b), None) => b.clone(),
                (None, Some(th)) => BoundParams::new(th),
                (None, None) => return Err(CliError::Usage("no theorem given (--theorem or config bound)".into())),
            };
            let params = base.with_overrides(&args.sets)?;
            let cfg = ExperimentConfig { bound: Some(params), ..cfg.clone() };
            let mut reports = experiment::bound_reports(&cfg)?;
            let out = output::open(path)?;
            if reports.len() == 1 {
                output::write_json(out, &reports.remove(0))?;
            } else {
                output::write_json(out, &reports)?;
            }
            Ok(0)
        }
        Command::Estimate => {
            let rows = experiment::estimate(&cfg)?;
            let out = output::open(path)?;
            match format {
                Format::Json => {
                    let v: Vec<_> = rows.iter().map(|(t, e)| serde_json::json!({"t": t, "estimate": e})).collect();
                    output::write_json(out, &v)?;
                }
                Format::Csv => output::write_csv(
                    out,
                    &["t", "p_hat", "ci_low", "ci_high", "hits", "samples"],
                    rows.iter().map(|(t, e)| {
                        vec![
                            num(*t),
                            num(e.p_hat),
                            num(e.ci_low),
                            num(e.ci_high),
                            e.hits.to_string(),
                            e.samples.to_string(),
                        ]
                    }),
                )?,
            }
            Ok(0)
        }
        Command::Verify => {
            let rows = experiment::verify(&cfg)?;
            let out = output::open(path)?;
            match format {
                Format::Json => output::write_json(out, &rows)?,
                Format::Csv => output::write_csv(
                    out,
                    &experiment::VERIFY_HEADER,
                    rows.iter().map(|r| {
                        vec![
                            num(r.t),
                            num(r.p_hat),
                            num(r.ci_low),
                            num(r.ci_high),
                            num(r.bound_value),
                            r.branch.clone(),
                            r.pass.to_string(),
                        ]
                    }),
                )?,
            }
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                eprintln!("{failed} of {} rows violate the bound", rows.len());
                return Ok(1);
            }
            Ok(0)
        }
        Command::Lcd(args) => {
            let a = read_matrix(&args.matrix)?;
            let params = LcdParams::new(args.alpha, args.gamma)?;
            let res = lcd_search(&a, &params, args.radius_max, args.grid_step)?;
            output::write_json(output::open(path)?, &res)?;
            Ok(0)
        }
        Command::Oracle { suite } => {
            let suite: oracle::Suite = suite.parse()?;
            let settings =
                oracle::OracleSettings { samples: cfg.samples(), seed: cfg.seed(), confidence: cfg.confidence() };
            let report = oracle::run_suite(suite, &settings)?;
            let out = output::open(path)?;
            match format {
                Format::Json => output::write_json(out, &report)?,
                Format::Csv => output::write_csv(
                    out,
                    &oracle::ORACLE_HEADER,
                    report
                        .rows
                        .iter()
                        .map(|r| vec![r.label.clone(), num(r.lhs), num(r.rhs), num(r.margin), r.pass.to_string()]),
                )?,
            }
            eprintln!("{}", report.summary());
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Sweep => {
            let rows = experiment::sweep(&cfg)?;
            let out = output::open(path)?;
            match format {
                Format::Json => output::write_json(out, &rows)?,
                Format::Csv => output::write_csv(
                    out,
                    &experiment::SWEEP_HEADER,
                    rows.iter().map(|r| vec![num(r.t), r.theorem.to_string(), num(r.bound_value), r.branch.clone()]),
                )?,
            }
            Ok(0)
        }
    }
}

/// Reads a matrix from a JSON array of rows or from plain text.
pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read matrix {}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn parse_matrix(text: &str) -> Result<Matrix, CliError> {
    let bad = |m: String| CliError::Usage(format!("malformed matrix: {m}"));
    let rows: Vec<Vec<f64>> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))?
    } else {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}"))))
                    .collect()
            })
            .collect::<Result<_, _>>()?
    };
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(bad("entries must be finite".into()));
    }
    Matrix::from_rows(rows).map_err(|e| bad(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_formats() {
        let a = parse_matrix("[[1, 0], [0, 1]]").unwrap();
        assert_eq!((a.nrows(), a.ncols()), (2, 2));
        let b = parse_matrix("# comment\n1 0\n0,1\n").unwrap();
        assert_eq!(a, b);
        assert!(parse_matrix("1 2\n3").is_err());
        assert!(parse_matrix("1 x").is_err());
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("[[1], [").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Failed("x".into()).exit_code(), 1);
    }
}
