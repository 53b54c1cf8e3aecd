//! Validated problem instances.

use crate::cost::Cost;
use crate::delay::{ConcaveFn, DelayModel, StepDelay};
use crate::error::ModelError;
use crate::metric::{concave_time_dist, MetricSpace, Request, Time};
use crate::set::{RequestSet, MAX_REQUESTS};

/// Dense symmetric matrix of pairwise costs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = f(i, j);
            }
        }
        DistMatrix { n, d }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

/// A validated MPMD instance.
///
/// Every request must be matched by `horizon`: at the horizon any nonempty
/// unmatched set costs infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    metric: MetricSpace,
    requests: Vec<Request>,
    delay: DelayModel,
    horizon: Time,
}

impl Instance {
    pub fn new(
        metric: MetricSpace,
        requests: Vec<Request>,
        delay: DelayModel,
        horizon: Time,
    ) -> Result<Self, ModelError> {
        let m = requests.len();
        if m % 2 == 1 {
            return Err(ModelError::OddRequestCount(m));
        }
        if m > MAX_REQUESTS {
            return Err(ModelError::TooManyRequests(m, MAX_REQUESTS));
        }
        for (position, r) in requests.iter().enumerate() {
            if r.id != position || (position > 0 && requests[position - 1].arrival > r.arrival) {
                return Err(ModelError::RequestOrder { position, found: r.id });
            }
            if r.point >= metric.len() {
                return Err(ModelError::UnknownPoint(r.point.to_string()));
            }
            if r.arrival > horizon {
                return Err(ModelError::ArrivalAfterHorizon { id: r.id, arrival: r.arrival, horizon });
            }
        }
        delay.validate(m)?;
        Ok(Instance { metric, requests, delay, horizon })
    }

    pub fn m(&self) -> usize {
        self.requests.len()
    }

    pub fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn delay(&self) -> &DelayModel {
        &self.delay
    }

    pub fn horizon(&self) -> Time {
        self.horizon
    }

    pub fn request(&self, u: usize) -> Result<&Request, ModelError> {
        self.requests.get(u).ok_or(ModelError::UnknownRequest(u))
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<f64, ModelError> {
        Ok(self.metric.distance(self.request(u)?.point, self.request(v)?.point))
    }

    pub fn concave_time_dist(&self, u: usize, v: usize, f: &ConcaveFn) -> Result<f64, ModelError> {
        Ok(concave_time_dist(&self.metric, self.request(u)?, self.request(v)?, f))
    }

    /// Pairwise request distances.
    pub fn request_distances(&self) -> DistMatrix {
        DistMatrix::from_fn(self.m(), |i, j| {
            self.metric.distance(self.requests[i].point, self.requests[j].point)
        })
    }

    /// `R_t`: requests with arrival at most `t`.
    pub fn arrived_by(&self, t: Time) -> RequestSet {
        RequestSet::prefix(self.requests.partition_point(|r| r.arrival <= t))
    }

    pub fn arrivals_at(&self, t: Time) -> &[Request] {
        let lo = self.requests.partition_point(|r| r.arrival < t);
        let hi = self.requests.partition_point(|r| r.arrival <= t);
        &self.requests[lo..hi]
    }

    /// `f_t(U)`, infinite at the horizon for nonempty `U`.
    pub fn instantaneous_delay(&self, t: Time, unmatched: RequestSet) -> Cost {
        if !unmatched.is_empty() && t >= self.horizon {
            return Cost::Infinite;
        }
        self.delay.instantaneous(t, unmatched, &self.requests)
    }

    /// The delay function of timestep `t` as an online algorithm sees it.
    pub fn step_delay(&self, t: Time) -> StepDelay {
        let seen = &self.requests[..self.arrived_by(t).len()];
        self.delay.at(t, t >= self.horizon, seen)
    }

    /// Same instance with a different delay model.
    pub fn with_delay(&self, delay: DelayModel) -> Result<Self, ModelError> {
        Instance::new(self.metric.clone(), self.requests.clone(), delay, self.horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::SizePhase;

    fn inst(arrivals: &[Time], horizon: Time) -> Result<Instance, ModelError> {
        let requests = arrivals
            .iter()
            .enumerate()
            .map(|(id, &arrival)| Request { id, point: id % 3, arrival })
            .collect();
        Instance::new(
            MetricSpace::uniform(3),
            requests,
            DelayModel::SizeBased(vec![SizePhase::deadline(0, 10)]),
            horizon,
        )
    }

    #[test]
    fn odd_count_rejected() {
        assert_eq!(inst(&[0, 0, 1], 3).unwrap_err(), ModelError::OddRequestCount(3));
    }

    #[test]
    fn arrival_after_horizon_rejected() {
        assert!(matches!(inst(&[0, 5], 3), Err(ModelError::ArrivalAfterHorizon { .. })));
    }

    #[test]
    fn prefixes_and_forcing() {
        let i = inst(&[0, 0, 2, 2], 4).unwrap();
        assert_eq!(i.arrived_by(1), RequestSet::prefix(2));
        assert_eq!(i.arrivals_at(2).len(), 2);
        assert!(i.arrivals_at(1).is_empty());
        assert_eq!(i.instantaneous_delay(3, RequestSet::prefix(2)), Cost::ZERO);
        assert_eq!(i.instantaneous_delay(4, RequestSet::singleton(0)), Cost::Infinite);
        assert!(i.step_delay(4).forcing);
        assert_eq!(i.distance(0, 3).unwrap(), 0.0);
        assert!(i.distance(0, 9).is_err());
    }
}
