//! Driving an online matcher over an instance.

use crate::delay::{DelayModel, StepDelay};
use crate::error::SolveError;
use crate::instance::Instance;
use crate::metric::Time;
use crate::online::OnlineMatcher;
use crate::pipeline::matcher::NonClairvoyantMatcher;
use crate::pipeline::solution::{MatchEdge, MatchingSolution};
use crate::set::RequestSet;

/// Supplies the delay function of each timestep to the driver.
pub trait DelaySource {
    fn delay_at(&mut self, t: Time) -> StepDelay;
}

/// Reads delays from an instance and logs every timestep it was asked for.
pub struct AuditedDelay<'a> {
    inst: &'a Instance,
    pub accessed: Vec<Time>,
}

impl<'a> AuditedDelay<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        AuditedDelay { inst, accessed: Vec::new() }
    }
}

impl DelaySource for AuditedDelay<'_> {
    fn delay_at(&mut self, t: Time) -> StepDelay {
        self.accessed.push(t);
        self.inst.step_delay(t)
    }
}

/// Decisions of an online run, one list of pairs per timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineRun {
    pub decisions: Vec<Vec<(usize, usize)>>,
    pub edges: Vec<MatchEdge>,
}

/// Runs `matcher` over `inst`; at step `t` it sees only the arrivals at `t`
/// and the delay function of `t`.
pub fn run_online(
    inst: &Instance,
    matcher: &mut dyn OnlineMatcher,
    source: &mut dyn DelaySource,
) -> Result<OnlineRun, SolveError> {
    let mut matched = RequestSet::EMPTY;
    let mut decisions = Vec::new();
    let mut edges = Vec::new();
    for t in 0..=inst.horizon() {
        let delay = source.delay_at(t);
        let pairs = matcher.step(t, inst.arrivals_at(t), &delay)?;
        let arrived = inst.arrived_by(t);
        for &(a, b) in &pairs {
            let pair = RequestSet::pair(a, b);
            if a == b || !pair.is_subset(arrived.difference(matched)) {
                return Err(SolveError::Invariant(format!("matcher returned invalid pair ({a},{b}) at {t}")));
            }
            matched = matched.union(pair);
            edges.push(MatchEdge { a: a.min(b), b: a.max(b), t });
        }
        decisions.push(pairs);
    }
    let missing = RequestSet::prefix(inst.m()).difference(matched);
    if !missing.is_empty() {
        return Err(SolveError::Unmatched(missing.to_vec()));
    }
    Ok(OnlineRun { decisions, edges })
}

fn check_supported(inst: &Instance) -> Result<(), SolveError> {
    if let DelayModel::UniformConcave(_) = inst.delay() {
        return Err(SolveError::UnsupportedDelay(
            "the non-clairvoyant solver needs size-based or set-table delay".into(),
        ));
    }
    Ok(())
}

/// Non-clairvoyant solve with the per-timestep schedule trace attached.
pub fn solve_nonclairvoyant(inst: &Instance) -> Result<MatchingSolution, SolveError> {
    check_supported(inst)?;
    let mut matcher = NonClairvoyantMatcher::new(inst.metric().clone());
    let run = run_online(inst, &mut matcher, &mut AuditedDelay::new(inst))?;
    let mut sol = MatchingSolution::from_edges(inst, run.edges);
    sol.schedule_trace = Some(matcher.trace().to_vec());
    Ok(sol)
}

/// Decisions of the non-clairvoyant matcher, per timestep.
pub fn nonclairvoyant_decisions(inst: &Instance) -> Result<OnlineRun, SolveError> {
    check_supported(inst)?;
    let mut matcher = NonClairvoyantMatcher::new(inst.metric().clone());
    let mut source = AuditedDelay::new(inst);
    let run = run_online(inst, &mut matcher, &mut source)?;
    debug_assert!(source.accessed.iter().enumerate().all(|(i, &t)| i as Time == t));
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Cost;
    use crate::delay::SizePhase;
    use crate::metric::{MetricSpace, Request};
    use crate::pipeline::verify_solution;

    #[test]
    fn colocated_pair_matched_at_deadline() {
        let requests = vec![Request { id: 0, point: 0, arrival: 0 }, Request { id: 1, point: 0, arrival: 0 }];
        let metric = MetricSpace::from_matrix(vec!["a".into()], vec![vec![0.0]], false).unwrap();
        let inst = Instance::new(metric, requests, DelayModel::SizeBased(vec![SizePhase::deadline(0, 2)]), 3).unwrap();
        let sol = solve_nonclairvoyant(&inst).unwrap();
        assert_eq!(sol.total, Cost::ZERO);
        assert!(verify_solution(&sol, &inst).ok);
    }

    #[test]
    fn concave_rejected() {
        let requests = vec![Request { id: 0, point: 0, arrival: 0 }, Request { id: 1, point: 1, arrival: 0 }];
        let inst = Instance::new(
            MetricSpace::uniform(2),
            requests,
            DelayModel::UniformConcave(crate::delay::ConcaveFn::sqrt()),
            2,
        )
        .unwrap();
        assert!(matches!(solve_nonclairvoyant(&inst), Err(SolveError::UnsupportedDelay(_))));
    }
}
