//! Time-indexed set delay models.

use serde::{Deserialize, Serialize};

use crate::cost::{Cost, TOL};
use crate::error::ModelError;
use crate::metric::{Request, Time};
use crate::set::RequestSet;

/// Largest request count for explicit set tables.
pub const SET_TABLE_MAX_REQUESTS: usize = 12;

/// Nonnegative nondecreasing concave function with `f(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConcaveFn {
    /// `c * x^p`, `0 < p <= 1`.
    Power { c: f64, p: f64 },
    /// `c * ln(1 + x)`.
    Log { c: f64 },
    /// Linear interpolation through `breakpoints`, starting at `(0, 0)`; the
    /// last slope continues past the final breakpoint.
    PiecewiseLinear { breakpoints: Vec<(f64, f64)> },
}

impl ConcaveFn {
    pub fn sqrt() -> Self {
        ConcaveFn::Power { c: 1.0, p: 0.5 }
    }

    pub fn log1p() -> Self {
        ConcaveFn::Log { c: 1.0 }
    }

    pub fn identity() -> Self {
        ConcaveFn::Power { c: 1.0, p: 1.0 }
    }

    /// Looks up one of the registered named functions.
    pub fn named(name: &str) -> Option<Self> {
        match name {
            "sqrt" => Some(Self::sqrt()),
            "log" | "log1p" => Some(Self::log1p()),
            "identity" | "linear" => Some(Self::identity()),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            ConcaveFn::Power { c, p } => {
                if x == 0.0 {
                    0.0
                } else {
                    c * x.powf(*p)
                }
            }
            ConcaveFn::Log { c } => c * x.ln_1p(),
            ConcaveFn::PiecewiseLinear { breakpoints } => {
                let mut prev = (0.0, 0.0);
                for &(bx, by) in breakpoints.iter().skip(1) {
                    if x <= bx {
                        return prev.1 + (by - prev.1) * (x - prev.0) / (bx - prev.0);
                    }
                    prev = (bx, by);
                }
                match breakpoints.len() {
                    0 | 1 => 0.0,
                    k => {
                        let (ax, ay) = breakpoints[k - 2];
                        let (bx, by) = breakpoints[k - 1];
                        by + (by - ay) / (bx - ax) * (x - bx)
                    }
                }
            }
        }
    }

    /// Checks parameters, then shape properties on a grid.
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidConcave(m));
        match self {
            ConcaveFn::Power { c, p } => {
                if !(c.is_finite() && *c > 0.0) || !(*p > 0.0 && *p <= 1.0) {
                    return bad(format!("power needs c > 0 and 0 < p <= 1, got c={c}, p={p}"));
                }
            }
            ConcaveFn::Log { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return bad(format!("log needs c > 0, got {c}"));
                }
            }
            ConcaveFn::PiecewiseLinear { breakpoints } => {
                if breakpoints.first() != Some(&(0.0, 0.0)) {
                    return bad("piecewise-linear breakpoints must start at (0, 0)".into());
                }
                let mut last_slope = f64::INFINITY;
                for w in breakpoints.windows(2) {
                    let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
                    if !(dx > 0.0) || !dy.is_finite() {
                        return bad("breakpoint x values must be strictly increasing".into());
                    }
                    let slope = dy / dx;
                    if slope < 0.0 || slope > last_slope + TOL {
                        return bad("slopes must be nonnegative and nonincreasing".into());
                    }
                    last_slope = slope;
                }
            }
        }
        let grid: Vec<f64> = (0..=128).map(|k| f64::from(k) * 0.5).collect();
        if self.eval(0.0).abs() > TOL {
            return bad("f(0) must be 0".into());
        }
        for w in grid.windows(3) {
            let (a, b, c) = (self.eval(w[0]), self.eval(w[1]), self.eval(w[2]));
            if b < a - TOL || c - 2.0 * b + a > TOL {
                return bad(format!("not nondecreasing concave near x={}", w[1]));
            }
        }
        for &a in &grid {
            for &b in &grid {
                if self.eval(a + b) > self.eval(a) + self.eval(b) + TOL {
                    return bad(format!("not subadditive at ({a}, {b})"));
                }
            }
        }
        Ok(())
    }
}

/// Size-indexed cost table active from timestep `from`.
///
/// `costs[k]` is the delay with `k` unmatched requests; sizes past the end
/// reuse the last entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizePhase {
    pub from: Time,
    pub costs: Vec<Cost>,
}

impl SizePhase {
    /// Deadline table: free up to `threshold` unmatched requests, infinite above.
    pub fn deadline(from: Time, threshold: usize) -> Self {
        let mut costs = vec![Cost::ZERO; threshold + 1];
        costs.push(Cost::Infinite);
        SizePhase { from, costs }
    }

    pub fn cost(&self, k: usize) -> Cost {
        if k == 0 {
            return Cost::ZERO;
        }
        match self.costs.get(k) {
            Some(&c) => c,
            None => self.costs.last().copied().unwrap_or(Cost::ZERO),
        }
    }

    fn is_deadline_table(&self) -> bool {
        self.costs.iter().all(|&c| c == Cost::ZERO || c == Cost::Infinite)
    }
}

/// One generator of an explicit set table: every unmatched set containing
/// `set` pays at least `cost`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetEntry {
    pub set: RequestSet,
    pub cost: Cost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetPhase {
    pub from: Time,
    pub entries: Vec<SetEntry>,
}

impl SetPhase {
    pub fn eval(entries: &[SetEntry], unmatched: RequestSet) -> Cost {
        entries
            .iter()
            .filter(|e| e.set.is_subset(unmatched))
            .fold(Cost::ZERO, |acc, e| acc.max(e.cost))
    }
}

/// Classification of a delay model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayKind {
    GeneralTable,
    SizeBased,
    DeadlinePhase,
    UniformConcaveSum,
}

/// A time-indexed set delay function `f_t`.
#[derive(Debug, Clone, PartialEq)]
pub enum DelayModel {
    SizeBased(Vec<SizePhase>),
    SetTable(Vec<SetPhase>),
    UniformConcave(ConcaveFn),
}

impl DelayModel {
    pub fn kind(&self) -> DelayKind {
        match self {
            DelayModel::SizeBased(p) if p.iter().all(SizePhase::is_deadline_table) => {
                DelayKind::DeadlinePhase
            }
            DelayModel::SizeBased(_) => DelayKind::SizeBased,
            DelayModel::SetTable(_) => DelayKind::GeneralTable,
            DelayModel::UniformConcave(_) => DelayKind::UniformConcaveSum,
        }
    }

    pub fn is_size_based(&self) -> bool {
        matches!(self, DelayModel::SizeBased(_))
    }

    /// Validates the model for an instance with `m` requests.
    pub fn validate(&self, m: usize) -> Result<(), ModelError> {
        let bad = |s: String| Err(ModelError::InvalidDelay(s));
        match self {
            DelayModel::SizeBased(phases) => {
                validate_phase_starts(phases.iter().map(|p| p.from))?;
                for p in phases {
                    if p.costs.first().is_some_and(|&c| c != Cost::ZERO) {
                        return bad(format!("phase from {}: cost of 0 unmatched must be 0", p.from));
                    }
                    if p.costs.windows(2).any(|w| w[1] < w[0]) {
                        return bad(format!("phase from {}: costs must be nondecreasing", p.from));
                    }
                }
            }
            DelayModel::SetTable(phases) => {
                if m > SET_TABLE_MAX_REQUESTS {
                    return bad(format!(
                        "set tables support at most {SET_TABLE_MAX_REQUESTS} requests, instance has {m}"
                    ));
                }
                validate_phase_starts(phases.iter().map(|p| p.from))?;
                for p in phases {
                    for e in &p.entries {
                        if e.set.is_empty() {
                            return bad("set table entries must name a nonempty set".into());
                        }
                        if !e.set.is_subset(RequestSet::prefix(m)) {
                            return bad(format!("set table entry {:?} names unknown requests", e.set));
                        }
                    }
                }
            }
            DelayModel::UniformConcave(f) => f.validate()?,
        }
        Ok(())
    }

    /// `f_t(unmatched)` without any forcing-horizon override.
    pub fn instantaneous(&self, t: Time, unmatched: RequestSet, requests: &[Request]) -> Cost {
        if unmatched.is_empty() {
            return Cost::ZERO;
        }
        match self {
            DelayModel::SizeBased(phases) => phase_at(phases, t, |p| p.from)
                .map_or(Cost::ZERO, |p| p.cost(unmatched.len())),
            DelayModel::SetTable(phases) => phase_at(phases, t, |p| p.from)
                .map_or(Cost::ZERO, |p| SetPhase::eval(&p.entries, unmatched)),
            DelayModel::UniformConcave(f) => Cost::Finite(
                unmatched
                    .iter()
                    .map(|u| concave_increment(f, t, requests[u].arrival))
                    .sum(),
            ),
        }
    }

    /// The delay function of timestep `t` alone, as revealed to an online algorithm.
    pub fn at(&self, t: Time, forcing: bool, requests: &[Request]) -> StepDelay {
        let rule = match self {
            DelayModel::SizeBased(phases) => StepRule::Size(
                phase_at(phases, t, |p| p.from).map_or_else(Vec::new, |p| p.costs.clone()),
            ),
            DelayModel::SetTable(phases) => StepRule::Set(
                phase_at(phases, t, |p| p.from).map_or_else(Vec::new, |p| p.entries.clone()),
            ),
            DelayModel::UniformConcave(f) => StepRule::Concave {
                f: f.clone(),
                t,
                arrivals: requests.iter().map(|r| r.arrival).collect(),
            },
        };
        StepDelay { rule, forcing }
    }
}

fn validate_phase_starts(froms: impl Iterator<Item = Time>) -> Result<(), ModelError> {
    let froms: Vec<Time> = froms.collect();
    if froms.first() != Some(&0) {
        return Err(ModelError::InvalidDelay("the first phase must start at t = 0".into()));
    }
    if froms.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ModelError::InvalidDelay("phase starts must be strictly increasing".into()));
    }
    Ok(())
}

fn phase_at<P>(phases: &[P], t: Time, from: impl Fn(&P) -> Time) -> Option<&P> {
    phases.iter().rev().find(|p| from(p) <= t)
}

/// Delay a single request arriving at `arrival` accrues during timestep `t`.
pub fn concave_increment(f: &ConcaveFn, t: Time, arrival: Time) -> f64 {
    if t < arrival {
        return 0.0;
    }
    let age = f64::from(t - arrival);
    f.eval(age + 1.0) - f.eval(age)
}

/// Rule part of a single-timestep delay function.
#[derive(Debug, Clone, PartialEq)]
pub enum StepRule {
    Size(Vec<Cost>),
    Set(Vec<SetEntry>),
    Concave { f: ConcaveFn, t: Time, arrivals: Vec<Time> },
}

/// The delay function of one timestep. When `forcing` is set every nonempty
/// unmatched set costs infinity (the forcing horizon).
#[derive(Debug, Clone, PartialEq)]
pub struct StepDelay {
    pub rule: StepRule,
    pub forcing: bool,
}

impl StepDelay {
    pub fn is_size_based(&self) -> bool {
        matches!(self.rule, StepRule::Size(_))
    }

    pub fn eval(&self, unmatched: RequestSet) -> Cost {
        if unmatched.is_empty() {
            return Cost::ZERO;
        }
        if self.forcing {
            return Cost::Infinite;
        }
        match &self.rule {
            StepRule::Size(costs) => size_cost(costs, unmatched.len()),
            StepRule::Set(entries) => SetPhase::eval(entries, unmatched),
            StepRule::Concave { f, t, arrivals } => Cost::Finite(
                unmatched.iter().map(|u| concave_increment(f, *t, arrivals[u])).sum(),
            ),
        }
    }

    /// Cost by unmatched count; only meaningful for size-based rules.
    pub fn eval_count(&self, k: usize) -> Option<Cost> {
        match &self.rule {
            StepRule::Size(costs) => Some(if k == 0 {
                Cost::ZERO
            } else if self.forcing {
                Cost::Infinite
            } else {
                size_cost(costs, k)
            }),
            _ => None,
        }
    }
}

fn size_cost(costs: &[Cost], k: usize) -> Cost {
    if k == 0 {
        return Cost::ZERO;
    }
    costs.get(k).or(costs.last()).copied().unwrap_or(Cost::ZERO)
}

/// `f_t(unmatched)`; see [`DelayModel::instantaneous`].
pub fn instantaneous_delay(
    model: &DelayModel,
    t: Time,
    unmatched: RequestSet,
    requests: &[Request],
) -> Cost {
    model.instantaneous(t, unmatched, requests)
}

/// Processing cost `f_t(R_t \ S)` for every state.
pub fn mts_task_vector(
    delay: &StepDelay,
    t: Time,
    arrived: RequestSet,
    states: &[RequestSet],
) -> Result<Vec<Cost>, ModelError> {
    states
        .iter()
        .map(|&s| {
            if !s.is_subset(arrived) {
                return Err(ModelError::UnarrivedInState { state: s, time: t });
            }
            Ok(delay.eval(arrived.difference(s)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reqs(arrivals: &[Time]) -> Vec<Request> {
        arrivals
            .iter()
            .enumerate()
            .map(|(id, &arrival)| Request { id, point: 0, arrival })
            .collect()
    }

    #[test]
    fn empty_set_is_free() {
        let r = reqs(&[0, 0]);
        for model in [
            DelayModel::SizeBased(vec![SizePhase::deadline(0, 0)]),
            DelayModel::UniformConcave(ConcaveFn::sqrt()),
        ] {
            assert_eq!(model.instantaneous(0, RequestSet::EMPTY, &r), Cost::ZERO);
        }
    }

    #[test]
    fn phase_deadline_infinite_above_threshold() {
        // n = 5, phase 1 allows n - 1 = 4 unmatched.
        let model = DelayModel::SizeBased(vec![SizePhase::deadline(0, 4)]);
        let r = reqs(&[0; 5]);
        assert_eq!(model.instantaneous(0, RequestSet::prefix(5), &r), Cost::Infinite);
        assert_eq!(model.instantaneous(0, RequestSet::prefix(4), &r), Cost::ZERO);
        assert_eq!(model.kind(), DelayKind::DeadlinePhase);
    }

    #[test]
    fn table_lookup_and_clamp() {
        let costs = (0..4).map(|k| Cost::Finite(k as f64)).collect();
        let model = DelayModel::SizeBased(vec![SizePhase { from: 0, costs }]);
        let r = reqs(&[0; 6]);
        assert_eq!(model.instantaneous(0, RequestSet::prefix(3), &r), Cost::Finite(3.0));
        assert_eq!(model.instantaneous(0, RequestSet::prefix(6), &r), Cost::Finite(3.0));
        assert_eq!(model.kind(), DelayKind::SizeBased);
    }

    #[test]
    fn task_vector_examples() {
        let step = DelayModel::SizeBased(vec![SizePhase::deadline(0, 2)]).at(0, false, &reqs(&[0; 4]));
        let arrived = RequestSet::prefix(4);
        let states = [RequestSet::EMPTY, RequestSet::pair(0, 1), RequestSet::pair(2, 3), arrived];
        let v = mts_task_vector(&step, 0, arrived, &states).unwrap();
        assert_eq!(v, vec![Cost::Infinite, Cost::ZERO, Cost::ZERO, Cost::ZERO]);
        assert!(mts_task_vector(&step, 0, RequestSet::prefix(2), &states).is_err());
    }

    #[test]
    fn forcing_overrides() {
        let step = DelayModel::SizeBased(vec![SizePhase { from: 0, costs: vec![Cost::ZERO] }])
            .at(3, true, &reqs(&[0, 0]));
        assert_eq!(step.eval(RequestSet::singleton(0)), Cost::Infinite);
        assert_eq!(step.eval(RequestSet::EMPTY), Cost::ZERO);
        assert_eq!(step.eval_count(1), Some(Cost::Infinite));
    }

    #[test]
    fn set_table_is_max_over_generators() {
        let entries = vec![
            SetEntry { set: RequestSet::singleton(0), cost: Cost::Finite(2.0) },
            SetEntry { set: RequestSet::pair(1, 2), cost: Cost::Infinite },
        ];
        assert_eq!(SetPhase::eval(&entries, RequestSet::from_ids([0, 1])), Cost::Finite(2.0));
        assert_eq!(SetPhase::eval(&entries, RequestSet::from_ids([1, 2])), Cost::Infinite);
        assert_eq!(SetPhase::eval(&entries, RequestSet::singleton(1)), Cost::ZERO);
    }

    #[test]
    fn concave_increments_telescope() {
        let f = ConcaveFn::sqrt();
        let total: f64 = (2..6).map(|t| concave_increment(&f, t, 2)).sum();
        assert!((total - 2.0).abs() < TOL);
        assert_eq!(concave_increment(&f, 1, 2), 0.0);
    }

    #[test]
    fn concave_validation() {
        assert!(ConcaveFn::sqrt().validate().is_ok());
        assert!(ConcaveFn::log1p().validate().is_ok());
        assert!(ConcaveFn::Power { c: 1.0, p: 1.5 }.validate().is_err());
        let pl = ConcaveFn::PiecewiseLinear { breakpoints: vec![(0.0, 0.0), (1.0, 2.0), (3.0, 3.0)] };
        assert!(pl.validate().is_ok());
        assert!((pl.eval(2.0) - 2.5).abs() < TOL);
        assert!((pl.eval(5.0) - 4.0).abs() < TOL);
        let convex = ConcaveFn::PiecewiseLinear { breakpoints: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)] };
        assert!(convex.validate().is_err());
    }

    #[test]
    fn size_validation() {
        let bad = DelayModel::SizeBased(vec![SizePhase {
            from: 0,
            costs: vec![Cost::ZERO, Cost::Finite(2.0), Cost::Finite(1.0)],
        }]);
        assert!(bad.validate(4).is_err());
        let late = DelayModel::SizeBased(vec![SizePhase::deadline(1, 0)]);
        assert!(late.validate(4).is_err());
        let table = DelayModel::SetTable(vec![SetPhase { from: 0, entries: vec![] }]);
        assert!(table.validate(14).is_err());
    }
}
