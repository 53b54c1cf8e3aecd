//! Fixed workloads shared by the benchmarks.

use mpmd_core::generate::{random_concave, random_size_based, InstanceShape};
use mpmd_core::{ConcaveFn, Instance};

pub fn size_based_workload(m: usize, seed: u64) -> Instance {
    random_size_based(&InstanceShape { m, points: m / 2 + 1, side: 10.0, max_arrival: 6, slack: 3 }, seed)
}

pub fn concave_workload(m: usize, seed: u64) -> Instance {
    random_concave(&InstanceShape { m, points: m, side: 3.0, max_arrival: 10, slack: 10_000 }, ConcaveFn::sqrt(), seed)
}
