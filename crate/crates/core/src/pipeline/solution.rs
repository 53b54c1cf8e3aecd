//! Matching solutions and their independent verification.

use serde::{Deserialize, Serialize};

use crate::cost::{Cost, TOL};
use crate::instance::Instance;
use crate::metric::Time;
use crate::set::RequestSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchEdge {
    pub a: usize,
    pub b: usize,
    pub t: Time,
}

/// Solver and converter states after one timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub t: Time,
    pub solver_state: Vec<usize>,
    pub converter_state: Vec<usize>,
    pub opt: Cost,
}

/// A monotone matching: an edge matched at time `t` stays matched afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingSolution {
    pub edges: Vec<MatchEdge>,
    pub distance_cost: f64,
    pub delay_cost: Cost,
    pub total: Cost,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule_trace: Option<Vec<TraceStep>>,
}

impl MatchingSolution {
    /// Prices `edges` on `inst`. Edge validity is not checked here.
    pub fn from_edges(inst: &Instance, mut edges: Vec<MatchEdge>) -> Self {
        edges.sort_by_key(|e| (e.t, e.a.min(e.b), e.a.max(e.b)));
        let (distance_cost, delay_cost) = price(inst, &edges);
        MatchingSolution {
            edges,
            distance_cost,
            delay_cost,
            total: delay_cost + distance_cost,
            schedule_trace: None,
        }
    }

    pub fn matched_by(&self, t: Time) -> RequestSet {
        matched_by(&self.edges, t)
    }
}

fn matched_by(edges: &[MatchEdge], t: Time) -> RequestSet {
    edges
        .iter()
        .filter(|e| e.t <= t)
        .fold(RequestSet::EMPTY, |s, e| s.union(RequestSet::pair(e.a, e.b)))
}

fn price(inst: &Instance, edges: &[MatchEdge]) -> (f64, Cost) {
    let m = inst.m();
    let distance = edges
        .iter()
        .filter(|e| e.a < m && e.b < m)
        .map(|e| inst.distance(e.a, e.b).unwrap_or(0.0))
        .sum();
    let delay = (0..=inst.horizon())
        .map(|t| inst.instantaneous_delay(t, inst.arrived_by(t).difference(matched_by(edges, t))))
        .sum();
    (distance, delay)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub failures: Vec<String>,
    pub distance_cost: f64,
    pub delay_cost: Cost,
    pub total: Cost,
}

/// Checks the matching is perfect and respects arrivals, then recomputes its costs.
pub fn verify_solution(sol: &MatchingSolution, inst: &Instance) -> VerifyReport {
    let m = inst.m();
    let mut failures = Vec::new();
    let mut seen = RequestSet::EMPTY;
    for e in &sol.edges {
        if e.a >= m || e.b >= m {
            failures.push(format!("edge ({},{}) names an unknown request", e.a, e.b));
            continue;
        }
        if e.a == e.b || seen.contains(e.a) || seen.contains(e.b) {
            failures.push(format!("not a matching: request repeated in edge ({},{})", e.a, e.b));
        }
        seen = seen.union(RequestSet::pair(e.a, e.b));
        let later = inst.requests()[e.a].arrival.max(inst.requests()[e.b].arrival);
        if e.t < later {
            failures.push(format!("edge ({},{}) matched at {} before arrival {later}", e.a, e.b, e.t));
        }
        if e.t > inst.horizon() {
            failures.push(format!("edge ({},{}) matched at {} after the horizon", e.a, e.b, e.t));
        }
    }
    if seen != RequestSet::prefix(m) {
        failures.push(format!(
            "not perfect: unmatched {:?}",
            RequestSet::prefix(m).difference(seen).to_vec()
        ));
    }
    let (distance_cost, delay_cost) = price(inst, &sol.edges);
    let total = delay_cost + distance_cost;
    if (distance_cost - sol.distance_cost).abs() > TOL {
        failures.push(format!("distance_cost {} != recomputed {distance_cost}", sol.distance_cost));
    }
    if !delay_cost.approx_eq(sol.delay_cost, TOL) {
        failures.push(format!("delay_cost {} != recomputed {delay_cost}", sol.delay_cost));
    }
    if !total.approx_eq(sol.total, TOL) {
        failures.push(format!("total {} != recomputed {total}", sol.total));
    }
    VerifyReport { ok: failures.is_empty(), failures, distance_cost, delay_cost, total }
}
