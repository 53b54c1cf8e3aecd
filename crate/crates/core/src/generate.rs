//! Seeded random instances for tests and sweeps.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::delay::{ConcaveFn, DelayModel, SizePhase};
use crate::instance::Instance;
use crate::metric::{MetricKind, MetricSpace, Request, Time};
use crate::mts::MatrixSpace;
use crate::set::RequestSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of trial `k` under a global seed: word `k` of an independent
/// ChaCha stream, so any trial can be replayed on its own.
pub fn trial_seed(global: u64, k: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(global);
    r.set_stream(k);
    r.next_u64()
}

/// Shape of a random instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceShape {
    pub m: usize,
    pub points: usize,
    /// Side of the square the points are drawn from.
    #[serde(default = "default_side")]
    pub side: f64,
    pub max_arrival: Time,
    /// Timesteps after the last possible arrival.
    #[serde(default = "default_slack")]
    pub slack: Time,
}

fn default_side() -> f64 {
    10.0
}

fn default_slack() -> Time {
    3
}

/// Euclidean plane points in `[0, side)^2`.
pub fn random_plane(rng: &mut impl Rng, points: usize, side: f64) -> MetricSpace {
    let coords: Vec<Vec<f64>> = (0..points).map(|_| vec![rng.gen::<f64>() * side, rng.gen::<f64>() * side]).collect();
    let labels = (0..points).map(|i| format!("p{i}")).collect();
    MetricSpace::from_coords(labels, &coords, MetricKind::Euclidean, true).expect("plane coordinates form a metric")
}

fn random_requests(rng: &mut impl Rng, shape: &InstanceShape) -> Vec<Request> {
    let mut arrivals: Vec<Time> = (0..shape.m).map(|_| rng.gen_range(0..=shape.max_arrival)).collect();
    arrivals.sort_unstable();
    arrivals
        .into_iter()
        .enumerate()
        .map(|(id, arrival)| Request { id, point: rng.gen_range(0..shape.points), arrival })
        .collect()
}

/// Random nondecreasing size table, sometimes capped by a deadline.
fn random_size_table(rng: &mut impl Rng, from: Time, m: usize) -> SizePhase {
    let mut costs = vec![Cost::ZERO];
    let mut acc = 0.0;
    let cap = if rng.gen_bool(0.5) { rng.gen_range(1..=m) } else { m + 1 };
    for k in 1..=m {
        if k > cap {
            costs.push(Cost::Infinite);
            continue;
        }
        if rng.gen_bool(0.6) {
            acc += (rng.gen::<f64>() * 4.0 * 8.0).round() / 8.0;
        }
        costs.push(Cost::Finite(acc));
    }
    SizePhase { from, costs }
}

/// Random instance with size-based delay in one to three phases.
pub fn random_size_based(shape: &InstanceShape, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let metric = random_plane(&mut rng, shape.points, shape.side);
    let requests = random_requests(&mut rng, shape);
    let horizon = shape.max_arrival + shape.slack;
    let mut starts = vec![0];
    for _ in 0..rng.gen_range(0..=2) {
        starts.push(rng.gen_range(1..=horizon));
    }
    starts.sort_unstable();
    starts.dedup();
    let phases = starts.into_iter().map(|s| random_size_table(&mut rng, s, shape.m)).collect();
    Instance::new(metric, requests, DelayModel::SizeBased(phases), horizon).expect("generated instance is valid")
}

/// Random instance with uniform concave delay `f`.
pub fn random_concave(shape: &InstanceShape, f: ConcaveFn, seed: u64) -> Instance {
    let mut rng = rng(seed);
    let metric = random_plane(&mut rng, shape.points, shape.side);
    let requests = random_requests(&mut rng, shape);
    let horizon = shape.max_arrival + shape.slack;
    Instance::new(metric, requests, DelayModel::UniformConcave(f), horizon).expect("generated instance is valid")
}

/// Random MTS on points of the plane with `tasks` random task vectors; about
/// one entry in eight is infinite but every task keeps a finite state.
pub fn random_mts(states: usize, tasks: usize, seed: u64) -> (MatrixSpace, Vec<Vec<Cost>>) {
    let mut rng = rng(seed);
    let pts: Vec<(f64, f64)> = (0..states).map(|_| (rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0)).collect();
    let space = MatrixSpace::from_fn(states, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());
    let tasks = (0..tasks)
        .map(|_| {
            let keep = rng.gen_range(0..states);
            (0..states)
                .map(|s| {
                    if s != keep && rng.gen_bool(0.125) {
                        Cost::Infinite
                    } else {
                        Cost::Finite(rng.gen::<f64>() * 10.0)
                    }
                })
                .collect()
        })
        .collect();
    (space, tasks)
}

/// Uniformly random even subset of `universe`.
pub fn random_even_subset(rng: &mut impl Rng, universe: RequestSet) -> RequestSet {
    let mut s = RequestSet::EMPTY;
    for r in universe.iter() {
        if rng.gen_bool(0.5) {
            s.insert(r);
        }
    }
    if !s.is_even() {
        let ids = s.to_vec();
        s.remove(ids[rng.gen_range(0..ids.len())]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(m: usize) -> InstanceShape {
        InstanceShape { m, points: 4, side: 10.0, max_arrival: 4, slack: 3 }
    }

    #[test]
    fn same_seed_same_instance() {
        assert_eq!(random_size_based(&shape(6), 3), random_size_based(&shape(6), 3));
        assert_ne!(random_size_based(&shape(6), 3), random_size_based(&shape(6), 4));
    }

    #[test]
    fn mts_tasks_keep_a_finite_state() {
        for seed in 0..50 {
            let (space, tasks) = random_mts(5, 4, seed);
            assert!(space.is_metric());
            assert!(tasks.iter().all(|t| t.iter().any(|c| c.is_finite())));
        }
    }

    #[test]
    fn trial_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|k| trial_seed(9, k)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(trial_seed(9, 42), a[42]);
    }

    #[test]
    fn even_subsets() {
        let mut r = rng(1);
        for _ in 0..100 {
            let s = random_even_subset(&mut r, RequestSet::prefix(5));
            assert!(s.is_even() && s.is_subset(RequestSet::prefix(5)));
        }
    }
}
