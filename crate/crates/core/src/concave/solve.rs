//! Moat-growing primal-dual solver for uniform concave delay.

use serde::Serialize;

use crate::concave::audit::{audit_dual, AuditReport};
use crate::concave::dual::DualSystem;
use crate::cost::TOL;
use crate::delay::{ConcaveFn, DelayModel};
use crate::error::SolveError;
use crate::instance::Instance;
use crate::metric::Time;
use crate::pipeline::MatchingSolution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReportSet {
    pub members: Vec<usize>,
    pub y: f64,
}

/// Final dual state, as written to report files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
    pub sets: Vec<DualReportSet>,
    pub marked_edges: Vec<(usize, usize)>,
    pub matching: Vec<(usize, usize, Time)>,
    pub dual_objective: f64,
}

impl DualReport {
    pub fn from_system(sys: &DualSystem) -> Self {
        DualReport {
            sets: sys
                .sets()
                .iter()
                .filter(|s| s.y > 0.0)
                .map(|s| DualReportSet { members: s.members.to_vec(), y: s.y })
                .collect(),
            marked_edges: sys.marked_edges().to_vec(),
            matching: sys.matching().iter().map(|e| (e.a, e.b, e.t)).collect(),
            dual_objective: sys.dual_objective(),
        }
    }
}

/// Per-edge cost `d(u,v) + f(t - a_u) + f(t - a_v)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeCost {
    pub u: usize,
    pub v: usize,
    pub t: Time,
    pub distance: f64,
    pub delay: f64,
    pub optcost: f64,
}

impl EdgeCost {
    pub fn total(&self) -> f64 {
        self.distance + self.delay
    }
}

#[derive(Debug, Clone)]
pub struct ConcaveRun {
    pub solution: MatchingSolution,
    pub report: DualReport,
    pub edge_costs: Vec<EdgeCost>,
    /// Audits performed when auditing every slice.
    pub audits: usize,
    pub audit_failures: Vec<AuditReport>,
}

/// Runs the primal-dual algorithm; with `audit_slices` the dual is audited
/// after every growth slice and every arrival.
pub fn solve_concave_audited(inst: &Instance, audit_slices: bool) -> Result<ConcaveRun, SolveError> {
    let DelayModel::UniformConcave(f) = inst.delay() else {
        return Err(SolveError::UnsupportedDelay("the primal-dual solver needs uniform concave delay".into()));
    };
    let f: ConcaveFn = f.clone();
    let mut sys = DualSystem::new(inst.metric().clone(), f.clone());
    let mut audits = 0;
    let mut failures = Vec::new();
    let mut audit = |s: &DualSystem| {
        if audit_slices {
            audits += 1;
            let r = audit_dual(s);
            if !r.ok {
                failures.push(r);
            }
        }
    };
    let horizon = inst.horizon();
    let last_arrival = inst.requests().last().map_or(0, |r| r.arrival);
    let mut t: Time = 0;
    loop {
        sys.advance(t, &mut audit)?;
        let mut events = Vec::new();
        for r in inst.arrivals_at(t) {
            sys.arrive(*r, &mut events)?;
        }
        audit(&sys);
        let done = t >= last_arrival && sys.unmatched().is_empty();
        if done || t >= horizon {
            break;
        }
        let next_arrival = inst.requests().iter().map(|r| r.arrival).find(|&a| a > t);
        let limit = next_arrival.unwrap_or(horizon);
        t = if sys.unmatched().is_empty() { limit } else { sys.fast_forward(limit)? };
        audit(&sys);
    }
    let missing = sys.unmatched();
    if !missing.is_empty() || sys.requests().len() != inst.m() {
        return Err(SolveError::Unmatched(missing.to_vec()));
    }
    let edge_costs: Vec<EdgeCost> = sys
        .matching()
        .iter()
        .map(|e| {
            let (ra, rb) = (&inst.requests()[e.a], &inst.requests()[e.b]);
            let delay = f.eval(f64::from(e.t - ra.arrival)) + f.eval(f64::from(e.t - rb.arrival));
            EdgeCost {
                u: e.a,
                v: e.b,
                t: e.t,
                distance: inst.metric().distance(ra.point, rb.point),
                delay,
                optcost: sys.optcost(e.a, e.b),
            }
        })
        .collect();
    for c in &edge_costs {
        let (ra, rb) = (&inst.requests()[c.u], &inst.requests()[c.v]);
        let gap = f64::from(ra.arrival.abs_diff(rb.arrival));
        let later = ra.arrival.max(rb.arrival);
        let identity = c.optcost - f.eval(gap) + f.eval(f64::from(c.t - ra.arrival)) + f.eval(f64::from(c.t - rb.arrival));
        let bound = c.optcost + 2.0 * f.eval(f64::from(c.t - later));
        if (identity - c.total()).abs() > TOL || c.total() > bound + TOL {
            return Err(SolveError::Invariant(format!("edge cost accounting failed for {c:?}")));
        }
    }
    let solution = MatchingSolution::from_edges(inst, sys.matching().to_vec());
    Ok(ConcaveRun { solution, report: DualReport::from_system(&sys), edge_costs, audits, audit_failures: failures })
}

/// Primal-dual solve for uniform concave delay.
pub fn solve_concave(inst: &Instance) -> Result<(MatchingSolution, DualReport), SolveError> {
    let run = solve_concave_audited(inst, false)?;
    Ok((run.solution, run.report))
}
