//! The `adversary` subcommand.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use mpmd_core::adversary::{four_point_adversary, harmonic_reference, uniform_phase_adversary, AdversaryTranscript};
use mpmd_core::generate::trial_seed;
use mpmd_core::MetricSpace;

use crate::{write_json, Failure, OnlineAlgo};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    FourPoint,
    DetPhase,
    RandPhase,
}

#[derive(Args)]
pub struct AdversaryArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of points for the phase adversaries.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Far distance of the four-point space.
    #[arg(long = "D", default_value_t = 100.0)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, value_enum, default_value = "nonclairvoyant")]
    algo: OnlineAlgo,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Global seed; trial `k` uses its own derived seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Transcript file (one object, or an array for several trials).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary CSV; printed to stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    n: usize,
    mode: &'static str,
    seed: String,
    alg_cost: String,
    opt_cost: String,
    ratio: String,
}

pub fn run(args: &AdversaryArgs) -> Result<(), Failure> {
    if args.trials == 0 {
        return Err(Failure::input(anyhow::anyhow!("--trials must be positive")));
    }
    let make = |m: &MetricSpace| args.algo.build(m);
    let mut transcripts: Vec<AdversaryTranscript> = Vec::new();
    for k in 0..args.trials {
        let seed = trial_seed(args.seed, k);
        let tr = match args.kind {
            Kind::FourPoint => four_point_adversary(args.d, args.eps, &make),
            Kind::DetPhase => uniform_phase_adversary(args.n, &make, false, seed),
            Kind::RandPhase => uniform_phase_adversary(args.n, &make, true, seed),
        };
        transcripts.push(tr.map_err(|e| match e {
            mpmd_core::AdversaryError::Params(_) => Failure::input(e),
            other => Failure::run(other),
        })?);
    }

    let rows: Vec<Row> = transcripts
        .iter()
        .map(|t| Row {
            n: t.n,
            mode: t.kind.name(),
            seed: t.seed.map_or_else(|| "-".into(), |s| s.to_string()),
            alg_cost: t.alg_cost.to_string(),
            opt_cost: t.opt_cost.to_string(),
            ratio: t.ratio.to_string(),
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r).map_err(Failure::run)?;
    }
    let csv_bytes = w.into_inner().map_err(|e| Failure::run(anyhow::anyhow!("{e}")))?;
    match &args.csv {
        Some(p) => std::fs::write(p, &csv_bytes).map_err(Failure::run)?,
        None => print!("{}", String::from_utf8_lossy(&csv_bytes)),
    }
    if let Some(p) = &args.out {
        if transcripts.len() == 1 {
            write_json(p, &transcripts[0])?;
        } else {
            write_json(p, &transcripts)?;
        }
    }

    let costs: Vec<f64> = transcripts.iter().map(|t| t.alg_cost.to_f64()).collect();
    let n = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / n;
    let se = if costs.len() > 1 {
        (costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let max_ratio = transcripts.iter().map(|t| t.ratio.to_f64()).fold(0.0, f64::max);
    println!("summary: kind={} algo={} trials={} mean_alg_cost={mean} std_error={se} max_ratio={max_ratio}", kind_name(args.kind), args.algo.name(), args.trials);
    if args.kind == Kind::RandPhase {
        println!("reference: 2*(H_n - 1) = {}", harmonic_reference(args.n));
    }
    Ok(())
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::FourPoint => "four_point",
        Kind::DetPhase => "det_phase",
        Kind::RandPhase => "rand_phase",
    }
}
