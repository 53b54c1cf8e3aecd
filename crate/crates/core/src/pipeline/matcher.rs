//! The non-clairvoyant matcher: guess-and-double work-function solver on the
//! matching MTS, densified and fed through the monotone converter.

use crate::cost::{Cost, TOL};
use crate::delay::StepDelay;
use crate::error::SolveError;
use crate::instance::DistMatrix;
use crate::metric::{MetricSpace, Request, Time};
use crate::mts::GuessAndDouble;
use crate::online::OnlineMatcher;
use crate::pipeline::classes::{MatchingMts, TaskRecord};
use crate::pipeline::solution::TraceStep;
use crate::reduction::{densify_move, MonotoneConverterState, TransitionMetric};
use crate::set::{RequestSet, State};

#[derive(Debug, Clone)]
pub struct NonClairvoyantMatcher {
    metric: MetricSpace,
    requests: Vec<Request>,
    dist: DistMatrix,
    tasks: Vec<TaskRecord>,
    solver: GuessAndDouble<State>,
    converter: MonotoneConverterState,
    trace: Vec<TraceStep>,
    repairs: usize,
}

impl NonClairvoyantMatcher {
    pub fn new(metric: MetricSpace) -> Self {
        NonClairvoyantMatcher {
            metric,
            requests: Vec::new(),
            dist: DistMatrix::from_fn(0, |_, _| 0.0),
            tasks: Vec::new(),
            solver: GuessAndDouble::new(State::EMPTY),
            converter: MonotoneConverterState::new(),
            trace: Vec::new(),
            repairs: 0,
        }
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    pub fn guess(&self) -> &crate::mts::GuessState {
        self.solver.guess()
    }

    /// Pairs added to keep a non-size-based delay feasible.
    pub fn repairs(&self) -> usize {
        self.repairs
    }

    /// Greedy repair for general set delay: while the converter's unmatched
    /// set costs more than the solver's, add the pair leaving the cheapest
    /// unmatched set (then the closest pair, then the smallest ids).
    fn repair(&mut self, t: Time, arrived: RequestSet, delay: &StepDelay, out: &mut Vec<(usize, usize)>) {
        let target = delay.eval(arrived.difference(self.solver.current()));
        loop {
            let free = arrived.difference(self.converter.current());
            if delay.eval(free) <= target || free.len() < 2 {
                return;
            }
            let ids = free.to_vec();
            let mut best: Option<(Cost, f64, usize, usize)> = None;
            for (i, &p) in ids.iter().enumerate() {
                for &q in &ids[i + 1..] {
                    let after = delay.eval(free.difference(RequestSet::pair(p, q)));
                    let d = self.dist.get(p, q);
                    if best.is_none_or(|b| after < b.0 || after == b.0 && d < b.1 - TOL) {
                        best = Some((after, d, p, q));
                    }
                }
            }
            let (_, _, p, q) = best.expect("two free requests");
            self.converter.commit_extra(p, q, t);
            self.repairs += 1;
            out.push((p, q));
        }
    }
}

impl OnlineMatcher for NonClairvoyantMatcher {
    fn name(&self) -> &'static str {
        "nonclairvoyant"
    }

    fn step(
        &mut self,
        t: Time,
        arrivals: &[Request],
        delay: &StepDelay,
    ) -> Result<Vec<(usize, usize)>, SolveError> {
        for r in arrivals {
            if r.id != self.requests.len() {
                return Err(SolveError::Invariant(format!("request {} arrived out of order", r.id)));
            }
            self.requests.push(*r);
        }
        if !arrivals.is_empty() {
            let reqs = &self.requests;
            let metric = &self.metric;
            self.dist = DistMatrix::from_fn(reqs.len(), |i, j| metric.distance(reqs[i].point, reqs[j].point));
        }
        let arrived = RequestSet::prefix(self.requests.len());
        self.tasks.push(TaskRecord { time: t, arrived, delay: delay.clone() });
        let tm = TransitionMetric::new(&self.dist, arrived);
        let view = MatchingMts::new(&tm, &self.tasks)?;
        let moved = self.solver.step(&view)?;
        let mut out = Vec::new();
        for s in densify_move(&tm, moved.previous, moved.state)? {
            let report = self.converter.sensible_step(s, &tm, t)?;
            if !report.potential_holds(TOL) {
                return Err(SolveError::Invariant(format!("potential inequality failed: {report:?}")));
            }
            out.extend(report.added);
        }
        self.repair(t, arrived, delay, &mut out);
        self.trace.push(TraceStep {
            t,
            solver_state: moved.state.to_vec(),
            converter_state: self.converter.current().to_vec(),
            opt: moved.opt,
        });
        Ok(out)
    }
}
