//! The online MTS built from arrived requests and revealed delay functions.
//!
//! Under size-based delay, states at transition distance 0 from each other
//! are merged: within a group of co-located requests only the parity of the
//! selected count matters, except that in groups of at most two requests an
//! odd selection also remembers which member was taken. Each class is
//! represented by a concrete state.

use std::collections::HashSet;

use crate::cost::{Cost, TOL};
use crate::delay::StepDelay;
use crate::error::MtsError;
use crate::instance::DistMatrix;
use crate::metric::Time;
use crate::mts::{MatrixSpace, OnlineMts, Snapshot};
use crate::reduction::TransitionMetric;
use crate::set::{RequestSet, State};

/// Largest request count for enumerating raw states without collapsing.
pub const RAW_STATE_LIMIT: usize = 12;
/// Largest group count for enumerating the whole collapsed space.
const FULL_GROUP_LIMIT: usize = 22;

/// One revealed task: the delay function of timestep `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskRecord {
    pub time: Time,
    pub arrived: RequestSet,
    pub delay: StepDelay,
}

/// Co-location groups of the arrived requests.
#[derive(Debug, Clone)]
pub struct Groups {
    pub masks: Vec<RequestSet>,
    /// A representative request per group.
    pub anchor: Vec<usize>,
}

impl Groups {
    pub fn new(dist: &DistMatrix, arrived: RequestSet) -> Self {
        let mut masks: Vec<RequestSet> = Vec::new();
        let mut anchor: Vec<usize> = Vec::new();
        for u in arrived.iter() {
            match anchor.iter().position(|&a| dist.get(a, u) == 0.0) {
                Some(g) => masks[g].insert(u),
                None => {
                    masks.push(RequestSet::singleton(u));
                    anchor.push(u);
                }
            }
        }
        Groups { masks, anchor }
    }

    fn highest(mask: RequestSet) -> usize {
        63 - mask.bits().leading_zeros() as usize
    }

    /// Largest subset of the group with the given parity (members with the
    /// highest ids dropped first).
    fn full_with_parity(mask: RequestSet, odd: bool) -> RequestSet {
        if (mask.len() % 2 == 1) == odd {
            mask
        } else {
            let mut m = mask;
            m.remove(Self::highest(mask));
            m
        }
    }

    /// Odd selections distinguished within group `g`.
    fn odd_options(&self, g: usize) -> Vec<RequestSet> {
        let mask = self.masks[g];
        if mask.len() <= 2 {
            mask.iter().map(RequestSet::singleton).collect()
        } else {
            vec![Self::full_with_parity(mask, true)]
        }
    }

    pub fn representative(&self, s: State) -> State {
        let mut out = RequestSet::EMPTY;
        for &mask in &self.masks {
            let inside = s.intersection(mask);
            let odd = inside.len() % 2 == 1;
            let part = if odd && mask.len() <= 2 { inside } else { Self::full_with_parity(mask, odd) };
            out = out.union(part);
        }
        out
    }
}

/// Borrowed view of the online matching MTS at the current timestep.
pub struct MatchingMts<'a> {
    pub metric: &'a TransitionMetric,
    pub tasks: &'a [TaskRecord],
    pub groups: Option<Groups>,
}

impl<'a> MatchingMts<'a> {
    /// Collapses zero-distance classes when every revealed delay is size-based.
    pub fn new(metric: &'a TransitionMetric, tasks: &'a [TaskRecord]) -> Result<Self, MtsError> {
        let collapse = tasks.iter().all(|t| t.delay.is_size_based());
        let groups = collapse.then(|| Groups::new(metric.distances(), metric.arrived()));
        if !collapse && metric.arrived().len() > RAW_STATE_LIMIT {
            return Err(MtsError::Scale(format!(
                "non-size-based delay with {} requests (limit {RAW_STATE_LIMIT})",
                metric.arrived().len()
            )));
        }
        Ok(MatchingMts { metric, tasks, groups })
    }

    /// Processing cost of (the class of) `s` for task `tau`.
    pub fn task_cost(&self, tau: usize, s: State) -> Cost {
        let task = &self.tasks[tau];
        match &self.groups {
            None => {
                if !s.is_subset(task.arrived) {
                    return Cost::Infinite;
                }
                task.delay.eval(task.arrived.difference(s))
            }
            Some(groups) => {
                let mut size = 0;
                for &mask in &groups.masks {
                    let inside = s.intersection(mask);
                    let odd = inside.len() % 2 == 1;
                    if odd && mask.len() <= 2 {
                        if !inside.is_subset(task.arrived) {
                            return Cost::Infinite;
                        }
                        size += 1;
                        continue;
                    }
                    let avail = mask.intersection(task.arrived).len();
                    if odd && avail == 0 {
                        return Cost::Infinite;
                    }
                    size += if (avail % 2 == 1) == odd { avail } else { avail - 1 };
                }
                task.delay
                    .eval_count(task.arrived.len() - size)
                    .expect("collapse requires size-based delay")
            }
        }
    }

    fn start_cost(&self, s: State) -> f64 {
        self.metric.transition_cost(State::EMPTY, s).unwrap_or(f64::INFINITY)
    }

    fn raw_ball(&self, radius: f64) -> Vec<State> {
        let arrived = self.metric.arrived();
        let ids = arrived.to_vec();
        let mut out = Vec::new();
        for bits in 0u64..(1u64 << ids.len()) {
            if bits.count_ones() % 2 == 1 {
                continue;
            }
            let s = RequestSet::from_ids(ids.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, &u)| u));
            if self.start_cost(s) <= radius + TOL {
                out.push(s);
            }
        }
        out.sort();
        out
    }

    fn collapsed_ball(&self, groups: &Groups, radius: f64) -> Result<Vec<State>, MtsError> {
        let g = groups.masks.len();
        let d = |a: usize, b: usize| self.metric.distance(groups.anchor[a], groups.anchor[b]);
        let mut odd_sets: Vec<u64> = Vec::new();
        if radius >= self.full_radius() {
            if g > FULL_GROUP_LIMIT {
                return Err(MtsError::Scale(format!("{g} co-location groups exceed {FULL_GROUP_LIMIT}")));
            }
            odd_sets.extend((0u64..(1u64 << g)).filter(|b| b.count_ones() % 2 == 0));
        } else {
            let mut seen = HashSet::new();
            fn rec(
                i: usize,
                used: u64,
                cost: f64,
                g: usize,
                radius: f64,
                d: &dyn Fn(usize, usize) -> f64,
                seen: &mut HashSet<u64>,
                chosen: u64,
            ) {
                if i == g {
                    seen.insert(chosen);
                    return;
                }
                if used >> i & 1 == 1 {
                    return rec(i + 1, used, cost, g, radius, d, seen, chosen);
                }
                rec(i + 1, used, cost, g, radius, d, seen, chosen);
                for j in i + 1..g {
                    if used >> j & 1 == 0 {
                        let c = cost + d(i, j);
                        if c <= radius + TOL {
                            let pair = (1u64 << i) | (1u64 << j);
                            rec(i + 1, used | pair, c, g, radius, d, seen, chosen | pair);
                        }
                    }
                }
            }
            rec(0, 0, 0.0, g, radius, &d, &mut seen, 0);
            odd_sets.extend(seen);
        }
        odd_sets.sort_by_key(|b| (b.count_ones(), *b));
        let base: Vec<RequestSet> =
            groups.masks.iter().map(|&m| Groups::full_with_parity(m, false)).collect();
        let mut out = Vec::new();
        for odd in odd_sets {
            let mut partial = vec![RequestSet::EMPTY];
            for k in 0..g {
                if odd >> k & 1 == 0 {
                    for p in &mut partial {
                        *p = p.union(base[k]);
                    }
                } else {
                    let opts = groups.odd_options(k);
                    partial = partial
                        .iter()
                        .flat_map(|p| opts.iter().map(move |o| p.union(*o)))
                        .collect();
                }
            }
            out.extend(partial);
        }
        Ok(out)
    }
}

impl OnlineMts for MatchingMts<'_> {
    type State = State;

    fn start(&self) -> State {
        self.canonical(State::EMPTY)
    }

    fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    fn canonical(&self, s: State) -> State {
        match &self.groups {
            Some(g) => g.representative(s),
            None => s,
        }
    }

    fn snapshot(&self, radius: f64, extra: &[State]) -> Result<Snapshot<State>, MtsError> {
        let mut states = match &self.groups {
            Some(g) => self.collapsed_ball(g, radius)?,
            None => self.raw_ball(radius),
        };
        let start = self.start();
        if let Some(pos) = states.iter().position(|&s| s == start) {
            states.swap(0, pos);
            states[1..].sort_by_key(|s| (s.len(), *s));
        } else {
            states.insert(0, start);
        }
        for &e in extra {
            let e = self.canonical(e);
            if !states.contains(&e) {
                states.push(e);
            }
        }
        let n = states.len();
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.metric.transition_cost(states[i], states[j]).map_err(MtsError::from)?;
                c[i * n + j] = v;
                c[j * n + i] = v;
            }
        }
        let space = MatrixSpace::from_fn(n, |i, j| c[i * n + j]).with_keys(states.iter().map(|s| s.bits()).collect());
        let tasks = (0..self.tasks.len())
            .map(|tau| states.iter().map(|&s| self.task_cost(tau, s)).collect())
            .collect();
        Ok(Snapshot { states, space, tasks })
    }

    fn transition_cost(&self, a: State, b: State) -> Result<f64, MtsError> {
        Ok(self.metric.transition_cost(a, b)?)
    }

    fn full_radius(&self) -> f64 {
        let ids = self.metric.arrived().to_vec();
        let max = ids
            .iter()
            .flat_map(|&p| ids.iter().map(move |&q| (p, q)))
            .map(|(p, q)| self.metric.distance(p, q))
            .fold(0.0, f64::max);
        max * (ids.len() / 2) as f64
    }

    fn min_positive_radius(&self) -> f64 {
        let ids = self.metric.arrived().to_vec();
        ids.iter()
            .flat_map(|&p| ids.iter().map(move |&q| (p, q)))
            .map(|(p, q)| self.metric.distance(p, q))
            .filter(|&d| d > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}
