//! Exhaustive ground truth for small instances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::cost::{Cost, TOL};
use crate::delay::DelayModel;
use crate::error::OracleError;
use crate::instance::{DistMatrix, Instance};
use crate::metric::Time;
use crate::mts::{MatrixSpace, MtsSpace};
use crate::pipeline::{MatchEdge, MatchingSolution};
use crate::set::RequestSet;

pub const BRUTE_FORCE_MAX_REQUESTS: usize = 8;
pub const BRUTE_FORCE_MAX_HORIZON: Time = 16;
pub const EARLIEST_MAX_REQUESTS: usize = 16;
pub const DIJKSTRA_MAX_REQUESTS: usize = 6;
pub const MATCHING_MAX_DIMENSION: usize = 16;
pub const MTS_MAX_STATES: usize = 8;
pub const MTS_MAX_TASKS: usize = 5;

fn scale(what: String) -> OracleError {
    OracleError::Scale(what)
}

/// Delay paid by the unmatched sets of a full schedule, with an early exit
/// once it reaches `cap`.
fn schedule_delay(inst: &Instance, edges: &[MatchEdge], cap: f64) -> Cost {
    let mut total = Cost::ZERO;
    for t in 0..=inst.horizon() {
        let matched = edges
            .iter()
            .filter(|e| e.t <= t)
            .fold(RequestSet::EMPTY, |s, e| s.union(RequestSet::pair(e.a, e.b)));
        total = total + inst.instantaneous_delay(t, inst.arrived_by(t).difference(matched));
        if total.to_f64() > cap {
            break;
        }
    }
    total
}

/// Times at which the delay of a piecewise-constant model may change.
fn event_times(inst: &Instance) -> Option<Vec<Time>> {
    let mut times: Vec<Time> = inst.requests().iter().map(|r| r.arrival).collect();
    match inst.delay() {
        DelayModel::SizeBased(p) => times.extend(p.iter().map(|p| p.from)),
        DelayModel::SetTable(p) => times.extend(p.iter().map(|p| p.from)),
        DelayModel::UniformConcave(_) => return None,
    }
    times.push(inst.horizon());
    times.retain(|&t| t <= inst.horizon());
    times.sort_unstable();
    times.dedup();
    Some(times)
}

struct Search<'a> {
    inst: &'a Instance,
    times: Option<Vec<Time>>,
    earliest: bool,
    edges: Vec<MatchEdge>,
    best: Option<(Cost, Vec<MatchEdge>)>,
}

impl Search<'_> {
    fn bound(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.0.to_f64())
    }

    /// Separable per-pair delay when the model allows it.
    fn pair_delay(&self, u: usize, v: usize, t: Time) -> f64 {
        match self.inst.delay() {
            DelayModel::UniformConcave(f) => {
                let r = self.inst.requests();
                f.eval(f64::from(t - r[u].arrival)) + f.eval(f64::from(t - r[v].arrival))
            }
            _ => 0.0,
        }
    }

    fn candidates(&self, later: Time) -> Vec<Time> {
        if self.earliest {
            return vec![later];
        }
        match &self.times {
            Some(ts) => ts.iter().copied().filter(|&t| t >= later).collect(),
            None => (later..=self.inst.horizon()).collect(),
        }
    }

    fn run(&mut self, free: RequestSet, partial: f64) {
        let Some(u) = free.iter().next() else {
            let delay = match self.inst.delay() {
                DelayModel::UniformConcave(_) => Cost::ZERO,
                _ => schedule_delay(self.inst, &self.edges, self.bound() - partial + TOL),
            };
            let total = delay + partial;
            if total.is_finite() && total.to_f64() < self.bound() - TOL {
                self.best = Some((total, self.edges.clone()));
            }
            return;
        };
        let rest = free.difference(RequestSet::singleton(u));
        for v in rest.iter() {
            let d = self.inst.distance(u, v).expect("valid request ids");
            let later = self.inst.requests()[u].arrival.max(self.inst.requests()[v].arrival);
            for t in self.candidates(later) {
                let c = partial + d + self.pair_delay(u, v, t);
                if c >= self.bound() - TOL {
                    // Separable delay grows with t; distance-only bounds do not depend on t.
                    break;
                }
                self.edges.push(MatchEdge { a: u, b: v, t });
                self.run(rest.difference(RequestSet::singleton(v)), c);
                self.edges.pop();
            }
        }
    }
}

fn search(inst: &Instance, earliest: bool) -> Result<MatchingSolution, OracleError> {
    let mut s = Search {
        inst,
        times: event_times(inst),
        earliest,
        edges: Vec::new(),
        best: None,
    };
    s.run(RequestSet::prefix(inst.m()), 0.0);
    let (_, edges) = s.best.ok_or(OracleError::Infeasible)?;
    Ok(MatchingSolution::from_edges(inst, edges))
}

/// Offline optimum over every perfect matching and every admissible match
/// time per pair. Ties keep the lexicographically first solution.
pub fn brute_force_opt(inst: &Instance) -> Result<MatchingSolution, OracleError> {
    if inst.m() > BRUTE_FORCE_MAX_REQUESTS || inst.horizon() > BRUTE_FORCE_MAX_HORIZON {
        return Err(scale(format!(
            "brute force needs m <= {BRUTE_FORCE_MAX_REQUESTS} and horizon <= {BRUTE_FORCE_MAX_HORIZON}, got m = {} and horizon = {}",
            inst.m(),
            inst.horizon()
        )));
    }
    search(inst, false)
}

/// Offline optimum when every pair is matched as soon as both endpoints are
/// present. Exact for every delay model here: all are monotone under set
/// inclusion, so matching earlier never costs more delay.
pub fn earliest_time_opt(inst: &Instance) -> Result<MatchingSolution, OracleError> {
    if inst.m() > EARLIEST_MAX_REQUESTS {
        return Err(scale(format!("earliest-time search needs m <= {EARLIEST_MAX_REQUESTS}, got {}", inst.m())));
    }
    search(inst, true)
}

/// Shortest path between even sets `a` and `b` in the explicit graph whose
/// edges add or remove one pair at its distance.
pub fn dijkstra_transition_cost(
    a: RequestSet,
    b: RequestSet,
    dist: &DistMatrix,
    universe: RequestSet,
) -> Result<f64, OracleError> {
    if universe.len() > DIJKSTRA_MAX_REQUESTS {
        return Err(scale(format!("transition graph needs at most {DIJKSTRA_MAX_REQUESTS} requests")));
    }
    if !a.is_subset(universe) || !b.is_subset(universe) || a.len() % 2 != b.len() % 2 {
        return Err(OracleError::Infeasible);
    }
    let ids = universe.to_vec();
    let mut best = std::collections::HashMap::from([(a.bits(), 0.0_f64)]);
    let mut heap = BinaryHeap::from([Reverse((Ordered(0.0), a.bits()))]);
    while let Some(Reverse((Ordered(d), s))) = heap.pop() {
        if s == b.bits() {
            return Ok(d);
        }
        if d > best[&s] {
            continue;
        }
        for (i, &p) in ids.iter().enumerate() {
            for &q in &ids[i + 1..] {
                let pair = RequestSet::pair(p, q);
                let cur = RequestSet(s);
                let next = if pair.is_subset(cur) {
                    cur.difference(pair)
                } else if pair.intersection(cur).is_empty() {
                    cur.union(pair)
                } else {
                    continue;
                };
                let nd = d + dist.get(p, q);
                if best.get(&next.bits()).is_none_or(|&old| nd < old) {
                    best.insert(next.bits(), nd);
                    heap.push(Reverse((Ordered(nd), next.bits())));
                }
            }
        }
    }
    Err(OracleError::Infeasible)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Ordered(f64);

impl Eq for Ordered {}

impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Exact minimum-cost perfect matching by branch and bound. Ties keep the
/// lexicographically first pairing.
pub fn min_cost_perfect_matching(costs: &[Vec<f64>]) -> Result<(Vec<(usize, usize)>, f64), OracleError> {
    let n = costs.len();
    if n % 2 == 1 {
        return Err(OracleError::OddDimension(n));
    }
    if n > MATCHING_MAX_DIMENSION {
        return Err(scale(format!("matching needs dimension <= {MATCHING_MAX_DIMENSION}, got {n}")));
    }
    struct Bb<'a> {
        c: &'a [Vec<f64>],
        cur: Vec<(usize, usize)>,
        best: f64,
        best_pairs: Vec<(usize, usize)>,
    }
    impl Bb<'_> {
        fn lower(&self, free: u32) -> f64 {
            let ids: Vec<usize> = (0..self.c.len()).filter(|&i| free >> i & 1 == 1).collect();
            ids.iter()
                .map(|&i| ids.iter().filter(|&&j| j != i).map(|&j| self.c[i][j]).fold(f64::INFINITY, f64::min))
                .sum::<f64>()
                / 2.0
        }
        fn go(&mut self, free: u32, acc: f64) {
            if free == 0 {
                if acc < self.best - TOL {
                    self.best = acc;
                    self.best_pairs = self.cur.clone();
                }
                return;
            }
            if acc + self.lower(free) >= self.best - TOL {
                return;
            }
            let u = free.trailing_zeros() as usize;
            let rest = free & !(1 << u);
            let mut vs: Vec<usize> = (0..self.c.len()).filter(|&v| rest >> v & 1 == 1).collect();
            vs.sort_by(|&x, &y| self.c[u][x].total_cmp(&self.c[u][y]).then(x.cmp(&y)));
            for v in vs {
                self.cur.push((u, v));
                self.go(rest & !(1 << v), acc + self.c[u][v]);
                self.cur.pop();
            }
        }
    }
    let mut bb = Bb { c: costs, cur: Vec::new(), best: f64::INFINITY, best_pairs: Vec::new() };
    let all = if n == 0 { 0 } else { (1u32 << n) - 1 };
    bb.go(all, 0.0);
    if n > 0 && bb.best_pairs.is_empty() {
        return Err(OracleError::Infeasible);
    }
    let mut pairs = bb.best_pairs;
    pairs.sort_unstable();
    let total = pairs.iter().map(|&(u, v)| costs[u][v]).sum();
    Ok((pairs, total))
}

/// Offline MTS optimum by enumerating all `N^T` state sequences from state 0.
pub fn exhaustive_mts_opt(space: &MatrixSpace, tasks: &[Vec<Cost>]) -> Result<Cost, OracleError> {
    let n = space.len();
    if n == 0 || n > MTS_MAX_STATES || tasks.len() > MTS_MAX_TASKS {
        return Err(scale(format!(
            "exhaustive MTS needs 1..={MTS_MAX_STATES} states and at most {MTS_MAX_TASKS} tasks"
        )));
    }
    let mut best = Cost::Infinite;
    let mut seq = vec![0usize; tasks.len()];
    loop {
        let mut total = Cost::ZERO;
        let mut prev = 0;
        for (task, &s) in tasks.iter().zip(&seq) {
            total = total + space.cost(prev, s) + task[s];
            prev = s;
        }
        best = best.min(total);
        // Odometer increment.
        let mut i = 0;
        while i < seq.len() {
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
        if i == seq.len() {
            return Ok(best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::{ConcaveFn, SizePhase};
    use crate::metric::{MetricSpace, Request};

    #[test]
    fn matching_dominant_structure() {
        let mut c = vec![vec![10.0; 4]; 4];
        for i in 0..4 {
            c[i][i] = 0.0;
        }
        c[0][1] = 1.0;
        c[1][0] = 1.0;
        c[2][3] = 1.0;
        c[3][2] = 1.0;
        assert_eq!(min_cost_perfect_matching(&c).unwrap(), (vec![(0, 1), (2, 3)], 2.0));
        assert_eq!(min_cost_perfect_matching(&[vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap(), (vec![(0, 1)], 3.0));
        assert!(matches!(min_cost_perfect_matching(&vec![vec![0.0; 3]; 3]), Err(OracleError::OddDimension(3))));
    }

    #[test]
    fn single_pair_zero_delay() {
        let metric = MetricSpace::from_matrix(vec!["a".into(), "b".into()], vec![vec![0.0, 4.0], vec![4.0, 0.0]], false).unwrap();
        let requests = vec![Request { id: 0, point: 0, arrival: 0 }, Request { id: 1, point: 1, arrival: 1 }];
        let inst = Instance::new(metric, requests, DelayModel::SizeBased(vec![SizePhase { from: 0, costs: vec![Cost::ZERO] }]), 3).unwrap();
        let sol = brute_force_opt(&inst).unwrap();
        assert_eq!(sol.total, Cost::Finite(4.0));
        assert_eq!(sol.edges, vec![MatchEdge { a: 0, b: 1, t: 1 }]);
    }

    #[test]
    fn brute_force_rejects_scale() {
        let requests = (0..10).map(|id| Request { id, point: 0, arrival: 0 }).collect();
        let inst = Instance::new(MetricSpace::uniform(1), requests, DelayModel::UniformConcave(ConcaveFn::sqrt()), 2).unwrap();
        assert!(matches!(brute_force_opt(&inst), Err(OracleError::Scale(_))));
    }

    #[test]
    fn dijkstra_basics() {
        let dist = DistMatrix::from_fn(4, |i, j| (i as f64 - j as f64).abs());
        let all = RequestSet::prefix(4);
        let a = RequestSet::from_ids([0, 1]);
        assert_eq!(dijkstra_transition_cost(a, a, &dist, all).unwrap(), 0.0);
        assert_eq!(dijkstra_transition_cost(RequestSet::EMPTY, RequestSet::pair(0, 3), &dist, all).unwrap(), 3.0);
    }

    #[test]
    fn exhaustive_mts_trivia() {
        let one = MatrixSpace::from_fn(1, |_, _| 0.0);
        assert_eq!(exhaustive_mts_opt(&one, &[]).unwrap(), Cost::ZERO);
        let tasks = vec![vec![Cost::Finite(2.0)], vec![Cost::Finite(0.5)]];
        assert_eq!(exhaustive_mts_opt(&one, &tasks).unwrap(), Cost::Finite(2.5));
    }
}
