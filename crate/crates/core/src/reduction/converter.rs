//! Conversion of arbitrary schedules into monotone ones for size-based delay.

use crate::error::ReductionError;
use crate::metric::Time;
use crate::reduction::transition::{is_neighbor, Entry, Side, TransitionMetric};
use crate::set::{RequestSet, State};

/// A pair committed by the converter; it becomes a matching edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddedPair {
    pub p: usize,
    pub q: usize,
    pub time: Time,
}

/// What one converter step did, with the quantities of the potential argument.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub previous: State,
    pub output: State,
    pub added: Option<(usize, usize)>,
    /// `c(S'_{i-1}, S'_i)`.
    pub output_cost: f64,
    /// `c(S_{i-1}, S_i)`.
    pub input_cost: f64,
    /// `c(S_{i-1}, S'_{i-1})` under the metric of this step.
    pub phi_before: f64,
    /// `c(S_i, S'_i)`.
    pub phi_after: f64,
}

impl StepReport {
    /// Amortized inequality `c(S'_{i-1},S'_i) <= c(S_{i-1},S_i) - (phi_i - phi_{i-1})`.
    pub fn potential_holds(&self, tol: f64) -> bool {
        self.output_cost <= self.input_cost - (self.phi_after - self.phi_before) + tol
    }
}

/// State of the monotone converter: it keeps its own state unless the input
/// grows beyond it, then adds one pair lying inside the input.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneConverterState {
    current: State,
    input: State,
    potential: f64,
    added: Vec<AddedPair>,
}

impl Default for MonotoneConverterState {
    fn default() -> Self {
        Self::new()
    }
}

impl MonotoneConverterState {
    pub fn new() -> Self {
        MonotoneConverterState {
            current: State::EMPTY,
            input: State::EMPTY,
            potential: 0.0,
            added: Vec::new(),
        }
    }

    pub fn current(&self) -> State {
        self.current
    }

    pub fn input(&self) -> State {
        self.input
    }

    /// `c(S_i, S'_i)` as of the last step.
    pub fn potential(&self) -> f64 {
        self.potential
    }

    pub fn added_pairs(&self) -> &[AddedPair] {
        &self.added
    }

    /// Adds a pair outside the monotone rule. Used only to keep general
    /// (non-size-based) delay feasible; the potential argument does not cover it.
    pub fn commit_extra(&mut self, p: usize, q: usize, time: Time) {
        self.current = self.current.union(RequestSet::pair(p, q));
        self.added.push(AddedPair { p, q, time });
    }

    /// Feeds the next input state, a neighbor of (or equal to) the previous one.
    pub fn sensible_step(
        &mut self,
        next_input: State,
        metric: &TransitionMetric,
        time: Time,
    ) -> Result<StepReport, ReductionError> {
        let prev_input = self.input;
        if next_input != prev_input && !is_neighbor(prev_input, next_input) {
            return Err(ReductionError::NotNeighbor { prev: prev_input, next: next_input });
        }
        let previous = self.current;
        let phi_before = metric.transition_cost(prev_input, previous)?;
        let input_cost = metric.transition_cost(prev_input, next_input)?;
        let mut added = None;
        if next_input.len() > previous.len() {
            let dec = metric.canonical_decomposition(next_input, previous)?;
            let (p, q) = dec
                .entries
                .iter()
                .find_map(|e| match *e {
                    Entry::Single { p, q, side: Side::AOnly } => Some((p, q)),
                    _ => None,
                })
                .ok_or(ReductionError::NoSinglePair { next: next_input, current: previous })?;
            self.current = previous.union(RequestSet::pair(p, q));
            self.added.push(AddedPair { p, q, time });
            added = Some((p, q));
        }
        self.input = next_input;
        let phi_after = metric.transition_cost(next_input, self.current)?;
        self.potential = phi_after;
        Ok(StepReport {
            previous,
            output: self.current,
            added,
            output_cost: metric.transition_cost(previous, self.current)?,
            input_cost,
            phi_before,
            phi_after,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DistMatrix;

    fn s(ids: &[usize]) -> State {
        RequestSet::from_ids(ids.iter().copied())
    }

    fn metric(points: &[f64]) -> TransitionMetric {
        let d = DistMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs());
        TransitionMetric::new(&d, RequestSet::prefix(points.len()))
    }

    #[test]
    fn first_pair_is_copied() {
        let tm = metric(&[0.0, 1.0, 4.0, 9.0]);
        let mut c = MonotoneConverterState::new();
        let r = c.sensible_step(s(&[0, 1]), &tm, 0).unwrap();
        assert_eq!(r.output, s(&[0, 1]));
        assert_eq!(r.added, Some((0, 1)));
        assert_eq!(c.added_pairs(), &[AddedPair { p: 0, q: 1, time: 0 }]);
    }

    #[test]
    fn shrinking_input_keeps_state() {
        let tm = metric(&[0.0, 1.0, 4.0, 9.0]);
        let mut c = MonotoneConverterState::new();
        c.sensible_step(s(&[0, 1]), &tm, 0).unwrap();
        let r = c.sensible_step(State::EMPTY, &tm, 1).unwrap();
        assert_eq!(r.output, s(&[0, 1]));
        assert_eq!(r.added, None);
        assert!(r.potential_holds(1e-9));
    }

    #[test]
    fn swap_then_grow_stays_monotone() {
        let tm = metric(&[0.0, 1.0, 4.0, 9.0, 9.5, 20.0]);
        let inputs = [s(&[0, 1]), State::EMPTY, s(&[2, 3]), s(&[2, 3, 4, 5]), s(&[4, 5])];
        let mut c = MonotoneConverterState::new();
        let mut prev = State::EMPTY;
        let (mut ic, mut oc) = (0.0, 0.0);
        for (t, &x) in inputs.iter().enumerate() {
            let r = c.sensible_step(x, &tm, t as Time).unwrap();
            assert!(prev.is_subset(r.output));
            assert!(r.output.len() >= x.len());
            assert!(r.potential_holds(1e-9), "{r:?}");
            ic += r.input_cost;
            oc += r.output_cost;
            prev = r.output;
        }
        assert!(oc <= ic + 1e-9);
    }

    #[test]
    fn rejects_non_neighbor() {
        let tm = metric(&[0.0, 1.0, 4.0, 9.0]);
        let mut c = MonotoneConverterState::new();
        assert!(matches!(
            c.sensible_step(s(&[0, 1, 2, 3]), &tm, 0),
            Err(ReductionError::NotNeighbor { .. })
        ));
    }
}
