//! The `wauc` command line tool.
//!
//! * `run`: stream `index,estimate` rows.
//! * `validate`: stream `index,estimate,exact,rel_error` and check the error guarantee.
//! * `bench`: time the estimator against exact recomputation.
//! * `gen`: write a synthetic `score,label` stream.
//!
//! Exit codes: 0 success, 1 I/O or configuration error, 2 malformed input,
//! 3 error guarantee breached (`validate` only).

pub mod bench;
pub mod io;
pub mod synth;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::estimator::{Epsilon, EstimatorConfig};
use crate::model::AucValue;
use crate::window::SlidingAucEstimator;

pub use bench::{bench, BenchReport};
pub use io::{read_events, EventReader};
pub use synth::{synthetic_stream, GenConfig};

#[derive(Debug, Parser)]
#[command(name = "wauc", version, about = "Sliding-window AUC estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the approximate AUC of the sliding window.
    Run(StreamArgs),
    /// Emit approximate and exact AUC side by side and check the guarantee.
    Validate(StreamArgs),
    /// Compare throughput against recomputing the exact AUC per event.
    Bench(StreamArgs),
    /// Generate a synthetic score stream.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StreamArgs {
    /// Window size k.
    #[arg(short = 'k', long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub window: u64,
    /// Approximation parameter; the relative error is at most epsilon/2.
    #[arg(short, long, default_value = "0.1")]
    pub epsilon: Epsilon,
    /// Emit one row every N events.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub emit_every: u64,
    /// Bound the error by (1 - auc) * epsilon / 2 instead, via flipped labels.
    #[arg(long)]
    pub flip: bool,
    /// Input CSV; standard input when omitted or "-".
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when omitted or "-".
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl StreamArgs {
    pub fn config(&self) -> EstimatorConfig {
        EstimatorConfig::new(self.epsilon).flipped(self.flip)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Number of events.
    #[arg(short = 'n', long, default_value_t = 100_000)]
    pub events: usize,
    /// Probability that an event is positive.
    #[arg(long, default_value_t = 0.3)]
    pub positive_rate: f64,
    /// Distance between the class score means, in standard deviations.
    #[arg(long, default_value_t = 1.5)]
    pub separation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Round scores to this many decimals.
    #[arg(long)]
    pub decimals: Option<u32>,
    /// Output file; standard output when omitted or "-".
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl From<&GenArgs> for GenConfig {
    fn from(a: &GenArgs) -> Self {
        GenConfig {
            events: a.events,
            positive_rate: a.positive_rate,
            separation: a.separation,
            seed: a.seed,
            decimals: a.decimals,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Config(String),
    #[error("row {row}: {message}")]
    Malformed { row: u64, message: String },
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<crate::error::AucError> for CliError {
    fn from(e: crate::error::AucError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Config(_) => 1,
            CliError::Malformed { .. } => 2,
        }
    }
}

pub const EXIT_BREACH: u8 = 3;

/// `|estimate - exact| / exact`, zero when both are zero.
pub fn relative_error(estimate: f64, exact: f64) -> f64 {
    let diff = (estimate - exact).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / exact
    }
}

fn fmt_auc(v: AucValue) -> String {
    match v {
        AucValue::Defined(x) => format!("{x}"),
        AucValue::Undefined => "nan".to_string(),
    }
}

fn window_for(args: &StreamArgs) -> Result<SlidingAucEstimator, CliError> {
    let k = usize::try_from(args.window).map_err(|_| CliError::Config("window too large".into()))?;
    Ok(SlidingAucEstimator::new(k, args.config())?)
}

/// Writes `index,estimate` every `emit_every` events. `index` is the
/// zero-based position of the newest event in the window.
pub fn run_stream<R: Read, W: Write>(args: &StreamArgs, input: R, mut out: W) -> Result<(), CliError> {
    let mut window = window_for(args)?;
    writeln!(out, "index,estimate")?;
    for (i, event) in EventReader::new(input).enumerate() {
        window.push(event?);
        if (i as u64 + 1) % args.emit_every == 0 {
            writeln!(out, "{i},{}", fmt_auc(window.estimate()))?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateSummary {
    /// Windows with a defined AUC.
    pub windows: usize,
    pub avg_rel_error: f64,
    pub max_rel_error: f64,
    /// Windows whose error exceeded the guarantee.
    pub breaches: usize,
}

impl ValidateSummary {
    pub fn exit_code(&self) -> u8 {
        if self.breaches > 0 {
            EXIT_BREACH
        } else {
            0
        }
    }
}

/// Compares estimate and exact AUC on every event. Rows are emitted every
/// `emit_every` events; the summary covers every window with a defined AUC.
///
/// The guarantee is `rel_error <= epsilon/2 + 1e-9`, or with `flip`,
/// `|estimate - exact| <= (1 - exact) * epsilon/2 + 1e-9`.
pub fn validate_stream<R: Read, W: Write>(
    args: &StreamArgs,
    input: R,
    mut out: W,
) -> Result<ValidateSummary, CliError> {
    let mut window = window_for(args)?;
    let half_eps = args.epsilon.as_f64() / 2.0;
    let (mut windows, mut sum, mut max, mut breaches) = (0usize, 0.0f64, 0.0f64, 0usize);
    writeln!(out, "index,estimate,exact,rel_error")?;
    for (i, event) in EventReader::new(input).enumerate() {
        window.push(event?);
        let (estimate, exact) = (window.estimate(), window.exact());
        let rel = match (estimate, exact) {
            (AucValue::Defined(a), AucValue::Defined(e)) => {
                let rel = relative_error(a, e);
                let breached = if args.flip {
                    (a - e).abs() > (1.0 - e) * half_eps + 1e-9
                } else {
                    rel > half_eps + 1e-9
                };
                breaches += breached as usize;
                windows += 1;
                sum += rel;
                max = max.max(rel);
                Some(rel)
            }
            _ => None,
        };
        if (i as u64 + 1) % args.emit_every == 0 {
            let rel = rel.map_or_else(|| "nan".to_string(), |r| format!("{r}"));
            writeln!(out, "{i},{},{},{rel}", fmt_auc(estimate), fmt_auc(exact))?;
        }
    }
    out.flush()?;
    Ok(ValidateSummary {
        windows,
        avg_rel_error: if windows > 0 { sum / windows as f64 } else { 0.0 },
        max_rel_error: max,
        breaches,
    })
}

pub fn bench_stream<R: Read>(args: &StreamArgs, input: R) -> Result<BenchReport, CliError> {
    let events = read_events(input)?;
    let k = usize::try_from(args.window).map_err(|_| CliError::Config("window too large".into()))?;
    Ok(bench(&events, k, args.config())?)
}

pub fn gen_synthetic<W: Write>(config: &GenConfig, mut out: W) -> Result<(), CliError> {
    config.validate().map_err(CliError::Config)?;
    writeln!(out, "score,label")?;
    for e in synthetic_stream(config) {
        writeln!(out, "{},{}", e.score, e.label.bit())?;
    }
    out.flush()?;
    Ok(())
}

fn open_input(path: &Option<PathBuf>) -> Result<Box<dyn Read>, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let f = File::open(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufReader::new(f)))
        }
        _ => Ok(Box::new(std::io::stdin().lock())),
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        _ => Ok(Box::new(BufWriter::new(std::io::stdout().lock()))),
    }
}

/// Runs a parsed command and returns the process exit code. Diagnostics and
/// the validate summary go to standard error.
pub fn execute(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Run(args) => open_input(&args.input)
            .and_then(|i| Ok((i, open_output(&args.output)?)))
            .and_then(|(i, o)| run_stream(args, i, o))
            .map(|_| 0),
        Command::Validate(args) => open_input(&args.input)
            .and_then(|i| Ok((i, open_output(&args.output)?)))
            .and_then(|(i, o)| validate_stream(args, i, o))
            .map(|summary| {
                eprintln!("windows={}", summary.windows);
                eprintln!("avg_rel_error={:e}", summary.avg_rel_error);
                eprintln!("max_rel_error={:e}", summary.max_rel_error);
                if summary.breaches > 0 {
                    eprintln!("guarantee breached in {} windows", summary.breaches);
                }
                summary.exit_code()
            }),
        Command::Bench(args) => open_input(&args.input)
            .and_then(|i| bench_stream(args, i))
            .and_then(|report| {
                let mut out = open_output(&args.output)?;
                writeln!(out, "{report}")?;
                out.flush()?;
                Ok(0)
            }),
        Command::Gen(args) => open_output(&args.output).and_then(|o| gen_synthetic(&GenConfig::from(args), o)).map(|_| 0),
    };
    result.unwrap_or_else(|e| {
        eprintln!("wauc: {e}");
        e.exit_code()
    })
}
