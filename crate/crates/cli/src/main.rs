mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use selfsim_core::haar::RNG_ALGORITHM;
use selfsim_core::nucleus::{DEFAULT_MAX_ITER, DEFAULT_MAX_SIZE};
use selfsim_core::quotients::DEFAULT_CAP;

use crate::input::UsageError;

/// Computations with self-similar groups acting on rooted trees.
#[derive(Debug, Parser, Serialize)]
#[command(name = "selfsim", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Seed for every randomized computation.
    #[arg(long, global = true, env = "SELFSIM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Largest quotient that will be enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Largest nucleus candidate set.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_SIZE)]
    pub nucleus_size: usize,
    /// Iteration limit of the nucleus fixed point.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ITER)]
    pub nucleus_iter: usize,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub out: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Inspect an automaton given as `catalog:<name>` or a JSON file.
    #[command(subcommand)]
    Automaton(AutomatonCmd),
    /// Enumerate a congruence quotient with stabilizers and fractality.
    Quotient {
        /// Group: `catalog:<name>[@states]`, `file:<path>[@states]` or `wreath:<H>`.
        #[arg(long, alias = "group")]
        gens: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        skip_fractality: bool,
    },
    /// Compute the nucleus of a contracting automaton group.
    Nucleus { automaton: String },
    /// Cyclicity certificate for an automaton presentation.
    CyclicCert {
        automaton: String,
        /// Also try the inverse-closed and nucleus presentations.
        #[arg(long)]
        presentations: bool,
    },
    /// Compare the self-similar closure of a word with the group at depth k.
    Closure {
        automaton: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        depth: usize,
        /// Generating states of the ambient group (default: all).
        #[arg(long)]
        states: Option<String>,
    },
    /// Orbit span and non-cyclicity certificate of an eventually periodic sequence.
    Shift {
        #[arg(long)]
        p: u8,
        #[arg(long, default_value = "")]
        pre: String,
        #[arg(long)]
        period: String,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Exact Haar-measure checks and sampling.
    #[command(subcommand)]
    Haar(HaarCmd),
    /// Monte Carlo Cesàro averages along random elements.
    Birkhoff {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        pattern_depth: usize,
        /// 0-based indices of cone patterns in quotient enumeration order.
        #[arg(long, default_value = "0")]
        patterns: String,
        #[arg(long = "N", default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Letter distribution such as `1/2,1/2` (default uniform).
        #[arg(long)]
        dist: Option<String>,
    },
    /// Section-pattern coverage of random elements of `W_H`.
    Coverage {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long = "D", default_value_t = 20)]
        d: usize,
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Build the explicit hypercyclic element of `W_H` to a finite depth.
    BuildHypercyclic {
        #[arg(long = "H")]
        h: String,
        #[arg(long)]
        depth: usize,
        /// Include the full portrait in the report.
        #[arg(long)]
        emit_portrait: bool,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutomatonCmd {
    Validate { automaton: String },
    Minimize { automaton: String },
    Info { automaton: String },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaarCmd {
    /// `μ(C_A ∩ T_v⁻¹ C_B) = μ(C_A) μ(C_B)` for all singleton cones.
    CheckMixing {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Measure preservation of `T_v` for all `|v| = n`, patterns of depth `m`.
    CheckPreservation {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Draw Haar-random elements of a quotient.
    Sample {
        #[arg(long)]
        group: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

/// Outcome reported through the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fails,
    Inconclusive,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Fails => 1,
            Status::Inconclusive => 2,
        }
    }
}

pub struct Report {
    pub status: Status,
    pub result: Value,
    /// Set by commands that have a CSV projection.
    pub csv: Option<String>,
}

impl Report {
    pub fn new(status: Status, result: impl Serialize) -> anyhow::Result<Report> {
        Ok(Report {
            status,
            result: serde_json::to_value(result)?,
            csv: None,
        })
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Automaton(_) => "automaton",
        Command::Quotient { .. } => "quotient",
        Command::Nucleus { .. } => "nucleus",
        Command::CyclicCert { .. } => "cyclic-cert",
        Command::Closure { .. } => "closure",
        Command::Shift { .. } => "shift",
        Command::Haar(_) => "haar",
        Command::Birkhoff { .. } => "birkhoff",
        Command::Coverage { .. } => "coverage",
        Command::BuildHypercyclic { .. } => "build-hypercyclic",
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.downcast_ref::<UsageError>().is_some()) {
        return 3;
    }
    match err.chain().find_map(|e| e.downcast_ref::<selfsim_core::Error>()) {
        Some(selfsim_core::Error::CapExceeded { .. } | selfsim_core::Error::NucleusNotCertified(_)) => 2,
        Some(_) => 3,
        None => 1,
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    if let Some(n) = cli.global.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| input::usage(format!("--workers: {e}")))?;
    }
    let start = Instant::now();
    let report = commands::dispatch(cli)?;
    let wall_time = start.elapsed().as_secs_f64();
    let mut stdout = std::io::stdout().lock();
    match cli.global.out {
        Format::Csv => {
            let csv = report
                .csv
                .ok_or_else(|| input::usage(format!("`{}` has no CSV output", command_name(&cli.command))))?;
            stdout.write_all(csv.as_bytes())?;
        }
        Format::Json => {
            let envelope = json!({
                "tool": "selfsim",
                "version": env!("CARGO_PKG_VERSION"),
                "command": command_name(&cli.command),
                "config": cli,
                "seed": cli.global.seed,
                "rng": RNG_ALGORITHM,
                "wall_time_s": wall_time,
                "status": report.status,
                "result": report.result,
            });
            serde_json::to_writer_pretty(&mut stdout, &envelope)?;
            writeln!(stdout)?;
        }
    }
    Ok(report.status.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
