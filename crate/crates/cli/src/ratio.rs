//! The `ratio` subcommand: generated sweeps measured against oracles.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use mpmd_core::adversary::uniform_phase_adversary;
use mpmd_core::concave::solve_concave;
use mpmd_core::generate::{random_concave, random_size_based, trial_seed, InstanceShape};
use mpmd_core::oracles::{earliest_time_opt, min_cost_perfect_matching, EARLIEST_MAX_REQUESTS};
use mpmd_core::pipeline::{run_online, AuditedDelay};
use mpmd_core::{concave_time_dist, ConcaveFn, Cost, Instance, MatchingSolution, MetricSpace, TOL};

use crate::{write_json, Failure, OnlineAlgo};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    /// Largest request count the oracles are asked to solve.
    #[serde(default = "default_oracle_limit")]
    pub oracle_max_requests: usize,
    pub sweeps: Vec<Sweep>,
}

fn default_oracle_limit() -> usize {
    12
}

fn default_trials() -> u64 {
    10
}

fn default_side() -> f64 {
    10.0
}

fn default_algos() -> Vec<OnlineAlgo> {
    vec![OnlineAlgo::Nonclairvoyant]
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sweep {
    SizeBased {
        m: usize,
        points: usize,
        #[serde(default = "default_side")]
        side: f64,
        max_arrival: u32,
        slack: u32,
        #[serde(default = "default_trials")]
        trials: u64,
        #[serde(default = "default_algos")]
        algos: Vec<OnlineAlgo>,
    },
    Concave {
        f: ConcaveFn,
        m: usize,
        points: usize,
        #[serde(default = "default_side")]
        side: f64,
        max_arrival: u32,
        slack: u32,
        #[serde(default = "default_trials")]
        trials: u64,
    },
    DetPhase {
        n: Vec<usize>,
        #[serde(default = "default_algos")]
        algos: Vec<OnlineAlgo>,
    },
    RandPhase {
        n: usize,
        #[serde(default = "default_trials")]
        trials: u64,
        #[serde(default = "default_algos")]
        algos: Vec<OnlineAlgo>,
    },
}

#[derive(Debug, Clone, Copy)]
enum Algo {
    Online(OnlineAlgo),
    Concave,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Online(a) => a.name(),
            Algo::Concave => "concave",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Job<'a> {
    sweep: &'a Sweep,
    sweep_index: usize,
    trial: u64,
    /// Points of a phase adversary.
    n: usize,
    seed: u64,
    algo: Algo,
}

#[derive(Debug, Serialize)]
struct TrialSeed {
    sweep: usize,
    trial: u64,
    algo: &'static str,
    seed: u64,
}

struct Outcome {
    m: usize,
    n: usize,
    alg: Cost,
    opt: Option<Cost>,
    runtime_ms: u128,
}

fn ratio(alg: Cost, opt: Option<Cost>) -> Option<Cost> {
    opt.map(|o| mpmd_core::adversary::ratio(alg, o))
}

fn online_cost(inst: &Instance, algo: OnlineAlgo) -> anyhow::Result<Cost> {
    let mut matcher = algo.build(inst.metric());
    let run = run_online(inst, matcher.as_mut(), &mut AuditedDelay::new(inst))?;
    Ok(MatchingSolution::from_edges(inst, run.edges).total)
}

fn run_job(job: &Job, oracle_limit: usize) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let (m, n, alg, opt) = match (job.sweep, job.algo) {
        (Sweep::SizeBased { m, points, side, max_arrival, slack, .. }, Algo::Online(a)) => {
            let shape = InstanceShape { m: *m, points: *points, side: *side, max_arrival: *max_arrival, slack: *slack };
            let inst = random_size_based(&shape, job.seed);
            let alg = online_cost(&inst, a)?;
            let opt = if *m <= oracle_limit.min(EARLIEST_MAX_REQUESTS) {
                Some(earliest_time_opt(&inst)?.total)
            } else {
                None
            };
            (*m, *points, alg, opt)
        }
        (Sweep::Concave { f, m, points, side, max_arrival, slack, .. }, Algo::Concave) => {
            let shape = InstanceShape { m: *m, points: *points, side: *side, max_arrival: *max_arrival, slack: *slack };
            let inst = random_concave(&shape, f.clone(), job.seed);
            let (sol, _) = solve_concave(&inst)?;
            let opt = if *m <= oracle_limit {
                let r = inst.requests();
                let costs: Vec<Vec<f64>> = (0..*m)
                    .map(|u| (0..*m).map(|v| concave_time_dist(inst.metric(), &r[u], &r[v], f)).collect())
                    .collect();
                Some(Cost::Finite(min_cost_perfect_matching(&costs)?.1))
            } else {
                None
            };
            (*m, *points, sol.total, opt)
        }
        (Sweep::DetPhase { .. } | Sweep::RandPhase { .. }, Algo::Online(a)) => {
            let randomized = matches!(job.sweep, Sweep::RandPhase { .. });
            let make = |metric: &MetricSpace| a.build(metric);
            let tr = uniform_phase_adversary(job.n, &make, randomized, job.seed)?;
            (2 * job.n - 2, job.n, tr.alg_cost, Some(tr.opt_cost))
        }
        _ => unreachable!("jobs pair sweeps with matching algorithms"),
    };
    Ok(Outcome { m, n, alg, opt, runtime_ms: start.elapsed().as_millis() })
}

fn jobs(config: &Config) -> Vec<Job<'_>> {
    // (sweep index, trial, points, algorithms) per trial, in config order.
    let mut trials: Vec<(usize, u64, usize, Vec<Algo>)> = Vec::new();
    let online = |algos: &[OnlineAlgo]| algos.iter().map(|&a| Algo::Online(a)).collect::<Vec<_>>();
    for (i, sweep) in config.sweeps.iter().enumerate() {
        match sweep {
            Sweep::SizeBased { trials: t, algos, .. } => trials.extend((0..*t).map(|k| (i, k, 0, online(algos)))),
            Sweep::Concave { trials: t, .. } => trials.extend((0..*t).map(|k| (i, k, 0, vec![Algo::Concave]))),
            Sweep::DetPhase { n, algos } => {
                trials.extend(n.iter().enumerate().map(|(k, &points)| (i, k as u64, points, online(algos))))
            }
            Sweep::RandPhase { n, trials: t, algos } => trials.extend((0..*t).map(|k| (i, k, *n, online(algos)))),
        }
    }
    // Every algorithm of a trial sees the same instance.
    trials
        .into_iter()
        .enumerate()
        .flat_map(|(counter, (i, trial, n, algos))| {
            let seed = trial_seed(config.seed, counter as u64);
            let sweep = &config.sweeps[i];
            algos.into_iter().map(move |algo| Job { sweep, sweep_index: i, trial, n, seed, algo })
        })
        .collect()
}

fn fmt_cost(c: Cost) -> String {
    c.to_string()
}

pub fn run(config_path: &Path, out: &Path, deterministic: bool) -> Result<(), Failure> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Failure::input(anyhow::anyhow!("{}: {e}", config_path.display())))?;
    let config: Config =
        serde_json::from_str(&text).map_err(|e| Failure::input(anyhow::anyhow!("{}: {e}", config_path.display())))?;
    for sweep in &config.sweeps {
        if let Sweep::Concave { f, .. } = sweep {
            f.validate().map_err(Failure::input)?;
        }
    }
    let jobs = jobs(&config);
    let results: Vec<anyhow::Result<Outcome>> = jobs.par_iter().map(|j| run_job(j, config.oracle_max_requests)).collect();

    let mut w = csv::Writer::from_path(out).map_err(Failure::run)?;
    w.write_record(["m", "n", "algo", "alg_cost", "opt_cost", "ratio", "runtime_ms"]).map_err(Failure::run)?;
    let mut per_algo: Vec<(&'static str, Vec<f64>, u128)> = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        let o = res.map_err(|e| Failure::run(e.context(format!("sweep {} trial {}", job.sweep_index, job.trial))))?;
        let r = ratio(o.alg, o.opt);
        let runtime = if deterministic { 0 } else { o.runtime_ms };
        w.write_record([
            o.m.to_string(),
            o.n.to_string(),
            job.algo.name().to_string(),
            fmt_cost(o.alg),
            o.opt.map_or_else(|| "opt=NA".into(), fmt_cost),
            r.map_or_else(|| "NA".into(), fmt_cost),
            runtime.to_string(),
        ])
        .map_err(Failure::run)?;
        let name = job.algo.name();
        let slot = match per_algo.iter().position(|s| s.0 == name) {
            Some(i) => i,
            None => {
                per_algo.push((name, Vec::new(), 0));
                per_algo.len() - 1
            }
        };
        per_algo[slot].2 += runtime;
        if let Some(Cost::Finite(x)) = r {
            per_algo[slot].1.push(x);
        } else if let Some(Cost::Infinite) = r {
            per_algo[slot].1.push(f64::INFINITY);
        }
    }
    for (name, ratios, runtime) in &per_algo {
        let max = ratios.iter().copied().fold(f64::NAN, f64::max);
        let positive: Vec<f64> = ratios.iter().copied().filter(|&x| x > TOL).collect();
        let geo = (positive.iter().map(|x| x.ln()).sum::<f64>() / positive.len() as f64).exp();
        w.write_record(["summary", "", name, "", "", &format!("max={max};geomean={geo}"), &runtime.to_string()])
            .map_err(Failure::run)?;
    }
    w.flush().map_err(Failure::run)?;

    let seeds: Vec<TrialSeed> = jobs
        .iter()
        .map(|j| TrialSeed { sweep: j.sweep_index, trial: j.trial, algo: j.algo.name(), seed: j.seed })
        .collect();
    let mut meta = out.as_os_str().to_owned();
    meta.push(".seeds.json");
    write_json(Path::new(&meta), &serde_json::json!({ "global_seed": config.seed, "trials": seeds }))
}
