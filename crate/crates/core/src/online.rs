//! Online matcher interface and a deadline-greedy baseline.

use crate::delay::StepDelay;
use crate::error::SolveError;
use crate::metric::{MetricSpace, Request, Time};
use crate::set::RequestSet;

/// An online algorithm for matching with delay.
///
/// `step` is called once per timestep, in order, with that timestep's
/// arrivals and delay function; it returns the pairs it matches now.
pub trait OnlineMatcher {
    fn name(&self) -> &'static str;
    fn step(
        &mut self,
        t: Time,
        arrivals: &[Request],
        delay: &StepDelay,
    ) -> Result<Vec<(usize, usize)>, SolveError>;
}

/// Matches pairs only while the current unmatched set would otherwise cost
/// infinity, each time picking the pair that leaves the cheapest unmatched
/// set, then the closest one.
#[derive(Debug, Clone)]
pub struct GreedyMatcher {
    metric: MetricSpace,
    requests: Vec<Request>,
    unmatched: RequestSet,
}

impl GreedyMatcher {
    pub fn new(metric: MetricSpace) -> Self {
        GreedyMatcher { metric, requests: Vec::new(), unmatched: RequestSet::EMPTY }
    }
}

impl OnlineMatcher for GreedyMatcher {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn step(
        &mut self,
        _t: Time,
        arrivals: &[Request],
        delay: &StepDelay,
    ) -> Result<Vec<(usize, usize)>, SolveError> {
        for r in arrivals {
            self.requests.push(*r);
            self.unmatched.insert(r.id);
        }
        let mut out = Vec::new();
        while self.unmatched.len() >= 2 && delay.eval(self.unmatched).is_infinite() {
            let ids = self.unmatched.to_vec();
            let mut best: Option<(crate::cost::Cost, f64, usize, usize)> = None;
            for (i, &p) in ids.iter().enumerate() {
                for &q in &ids[i + 1..] {
                    let after = delay.eval(self.unmatched.difference(RequestSet::pair(p, q)));
                    let d = self.metric.distance(self.requests[p].point, self.requests[q].point);
                    if best.is_none_or(|b| after < b.0 || after == b.0 && d < b.1) {
                        best = Some((after, d, p, q));
                    }
                }
            }
            let (_, _, p, q) = best.expect("at least two unmatched");
            self.unmatched.remove(p);
            self.unmatched.remove(q);
            out.push((p, q));
        }
        Ok(out)
    }
}
