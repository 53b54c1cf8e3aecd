//! `mpmd`: solver front end and experiment harness.

mod adversary;
mod ratio;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mpmd_core::concave::{solve_concave_audited, DualReport, EdgeCost};
use mpmd_core::io::load_instance;
use mpmd_core::pipeline::NonClairvoyantMatcher;
use mpmd_core::{solve_nonclairvoyant, verify_solution, DelayModel, GreedyMatcher, MatchingSolution, MetricSpace, OnlineMatcher, VerifyReport};

#[derive(Parser)]
#[command(name = "mpmd", version, about = "Online min-cost perfect matching with delay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file and verify the result.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        algo: SolveAlgo,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a sweep of generated instances against oracles and write CSV.
    Ratio {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write 0 in the runtime column so output is byte-identical across runs.
        #[arg(long)]
        deterministic: bool,
    },
    /// Run a lower-bound adversary against an online algorithm.
    Adversary(adversary::AdversaryArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveAlgo {
    Nonclairvoyant,
    Concave,
}

/// Online algorithms an adversary or sweep can interrogate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OnlineAlgo {
    Nonclairvoyant,
    Greedy,
}

impl OnlineAlgo {
    pub fn name(self) -> &'static str {
        match self {
            OnlineAlgo::Nonclairvoyant => "nonclairvoyant",
            OnlineAlgo::Greedy => "greedy",
        }
    }

    pub fn build(self, metric: &MetricSpace) -> Box<dyn OnlineMatcher> {
        match self {
            OnlineAlgo::Nonclairvoyant => Box::new(NonClairvoyantMatcher::new(metric.clone())),
            OnlineAlgo::Greedy => Box::new(GreedyMatcher::new(metric.clone())),
        }
    }
}

/// A failure with its exit status: 2 for bad input, 1 otherwise.
pub struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 2, error: error.into() }
    }

    pub fn run(error: impl Into<anyhow::Error>) -> Self {
        Failure { code: 1, error: error.into() }
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    algo: &'a str,
    solution: &'a MatchingSolution,
    verify: &'a VerifyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    dual: Option<&'a DualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge_costs: Option<&'a [EdgeCost]>,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Failure::run)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display())).map_err(Failure::run)
}

fn solve(instance: &Path, algo: SolveAlgo, out: &Path) -> Result<bool, Failure> {
    let inst = load_instance(instance).map_err(|e| Failure::input(anyhow::anyhow!("{}: {e}", instance.display())))?;
    let (name, solution, dual, edges) = match algo {
        SolveAlgo::Nonclairvoyant => {
            if matches!(inst.delay(), DelayModel::UniformConcave(_)) {
                return Err(Failure::input(anyhow::anyhow!("nonclairvoyant needs size_based or set_table delay")));
            }
            ("nonclairvoyant", solve_nonclairvoyant(&inst).map_err(Failure::run)?, None, None)
        }
        SolveAlgo::Concave => {
            if !matches!(inst.delay(), DelayModel::UniformConcave(_)) {
                return Err(Failure::input(anyhow::anyhow!("concave needs uniform_concave delay")));
            }
            let run = solve_concave_audited(&inst, false).map_err(Failure::run)?;
            ("concave", run.solution, Some(run.report), Some(run.edge_costs))
        }
    };
    let verify = verify_solution(&solution, &inst);
    let output = SolveOutput { algo: name, solution: &solution, verify: &verify, dual: dual.as_ref(), edge_costs: edges.as_deref() };
    write_json(out, &output)?;
    println!("{}", serde_json::to_string_pretty(&verify).map_err(Failure::run)?);
    Ok(verify.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { instance, algo, out } => solve(&instance, algo, &out),
        Command::Ratio { config, out, deterministic } => ratio::run(&config, &out, deterministic).map(|()| true),
        Command::Adversary(args) => adversary::run(&args).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
