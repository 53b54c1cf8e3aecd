//! Dual state of the moat-growing algorithm for uniform concave delay.

use serde::Serialize;

use crate::cost::TOL;
use crate::delay::ConcaveFn;
use crate::error::SolveError;
use crate::metric::{concave_time_dist, MetricSpace, Request, Time};
use crate::pipeline::MatchEdge;
use crate::reduction::min_cost_pairing;
use crate::set::RequestSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualSet {
    pub members: RequestSet,
    pub y: f64,
    pub active: bool,
}

impl DualSet {
    /// Odd sets need an outgoing matching edge.
    pub fn surplus(&self) -> f64 {
        f64::from(u8::from(self.members.len() % 2 == 1))
    }

    pub fn growing(&self) -> bool {
        self.active && self.members.len() % 2 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DualEvent {
    Grow { delta: f64, sets: Vec<usize> },
    Tight { u: usize, v: usize },
    Merge { left: usize, right: usize, into: usize },
    Match { u: usize, v: usize, t: Time },
}

/// Moat state: the active-set partition with its duals, plus the marked forest.
#[derive(Debug, Clone)]
pub struct DualSystem {
    f: ConcaveFn,
    metric: MetricSpace,
    requests: Vec<Request>,
    sets: Vec<DualSet>,
    active_of: Vec<usize>,
    /// `Σ_{S ∋ x} y_S` per request.
    load: Vec<f64>,
    marked: Vec<(usize, usize)>,
    matching: Vec<MatchEdge>,
    matched: RequestSet,
    clock: Time,
}

impl DualSystem {
    pub fn new(metric: MetricSpace, f: ConcaveFn) -> Self {
        DualSystem {
            f,
            metric,
            requests: Vec::new(),
            sets: Vec::new(),
            active_of: Vec::new(),
            load: Vec::new(),
            marked: Vec::new(),
            matching: Vec::new(),
            matched: RequestSet::EMPTY,
            clock: 0,
        }
    }

    pub fn f(&self) -> &ConcaveFn {
        &self.f
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn sets(&self) -> &[DualSet] {
        &self.sets
    }

    pub fn active_of(&self, u: usize) -> usize {
        self.active_of[u]
    }

    pub fn marked_edges(&self) -> &[(usize, usize)] {
        &self.marked
    }

    pub fn matching(&self) -> &[MatchEdge] {
        &self.matching
    }

    pub fn clock(&self) -> Time {
        self.clock
    }

    pub fn unmatched(&self) -> RequestSet {
        RequestSet::prefix(self.requests.len()).difference(self.matched)
    }

    pub fn optcost(&self, u: usize, v: usize) -> f64 {
        concave_time_dist(&self.metric, &self.requests[u], &self.requests[v], &self.f)
    }

    /// `Σ_{S ∋ u} y_S`.
    pub fn dual_load(&self, u: usize) -> f64 {
        self.load[u]
    }

    /// `Σ y_S` over sets separating `u` and `v`.
    pub fn edge_load(&self, u: usize, v: usize) -> f64 {
        self.sets
            .iter()
            .filter(|s| s.members.contains(u) != s.members.contains(v))
            .map(|s| s.y)
            .sum()
    }

    /// `f(t - a_u) - Σ_{S ∋ u} y_S`, clamped at zero.
    pub fn req_growth(&self, u: usize, t: Time) -> Result<f64, SolveError> {
        let a = self.requests[u].arrival;
        let raw = self.f.eval(f64::from(t.saturating_sub(a))) - self.load[u];
        if raw < -TOL {
            return Err(SolveError::Invariant(format!("dual overshoot at request {u}: {raw}")));
        }
        Ok(raw.max(0.0))
    }

    fn budget(&self, s: usize, t: Time) -> Result<f64, SolveError> {
        let mut b = f64::INFINITY;
        for x in self.sets[s].members.iter() {
            b = b.min(self.req_growth(x, t)?);
        }
        Ok(b)
    }

    /// Overwrites a dual value without adjusting anything else. Audit tests only.
    #[doc(hidden)]
    pub fn force_dual(&mut self, set: usize, y: f64) {
        let delta = y - self.sets[set].y;
        self.sets[set].y = y;
        for x in self.sets[set].members.iter() {
            self.load[x] += delta;
        }
    }

    /// `Σ y_S · Sur(S)`.
    pub fn dual_objective(&self) -> f64 {
        self.sets.iter().map(|s| s.y * s.surplus()).sum()
    }

    fn active_ids(&self) -> Vec<usize> {
        (0..self.sets.len()).filter(|&s| self.sets[s].active).collect()
    }

    /// Crossing pairs `(u, v)`, `u < v`, with their slack.
    fn crossing(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let m = self.requests.len();
        (0..m).flat_map(move |u| {
            (u + 1..m).filter_map(move |v| {
                (self.active_of[u] != self.active_of[v])
                    .then(|| (u, v, self.optcost(u, v) - self.load[u] - self.load[v]))
            })
        })
    }

    /// Request arrival: a new active singleton, then any tight constraints.
    pub fn arrive(&mut self, r: Request, events: &mut Vec<DualEvent>) -> Result<(), SolveError> {
        if r.id != self.requests.len() {
            return Err(SolveError::Invariant(format!("request {} arrived out of order", r.id)));
        }
        self.clock = self.clock.max(r.arrival);
        self.requests.push(r);
        self.sets.push(DualSet { members: RequestSet::singleton(r.id), y: 0.0, active: true });
        self.active_of.push(self.sets.len() - 1);
        self.load.push(0.0);
        self.process_tight(r.arrival, events)
    }

    fn process_tight(&mut self, t: Time, events: &mut Vec<DualEvent>) -> Result<(), SolveError> {
        loop {
            let mut tight = None;
            for (u, v, slack) in self.crossing() {
                if slack < -TOL {
                    return Err(SolveError::DualInfeasible {
                        u,
                        v,
                        load: self.load[u] + self.load[v],
                        optcost: self.optcost(u, v),
                    });
                }
                if slack <= TOL {
                    tight = Some((u, v));
                    break;
                }
            }
            let Some((u, v)) = tight else { return Ok(()) };
            events.push(DualEvent::Tight { u, v });
            self.merge(u, v, t, events);
        }
    }

    fn merge(&mut self, u: usize, v: usize, t: Time, events: &mut Vec<DualEvent>) {
        let (left, right) = (self.active_of[u], self.active_of[v]);
        self.marked.push((u, v));
        let members = self.sets[left].members.union(self.sets[right].members);
        self.sets[left].active = false;
        self.sets[right].active = false;
        self.sets.push(DualSet { members, y: 0.0, active: true });
        let into = self.sets.len() - 1;
        for x in members.iter() {
            self.active_of[x] = into;
        }
        events.push(DualEvent::Merge { left, right, into });
        // Maximum-cardinality matching of the unmatched members, cheapest first.
        let free: Vec<usize> = members.difference(self.matched).iter().collect();
        let pairs = self.best_pairing(&free);
        for (a, b) in pairs {
            self.matched = self.matched.union(RequestSet::pair(a, b));
            self.matching.push(MatchEdge { a, b, t });
            events.push(DualEvent::Match { u: a, v: b, t });
        }
    }

    fn best_pairing(&self, free: &[usize]) -> Vec<(usize, usize)> {
        let k = free.len();
        if k < 2 {
            return Vec::new();
        }
        let solve = |ids: &[usize]| {
            let (c, p) = min_cost_pairing(ids.len(), |i, j| self.optcost(ids[i], ids[j]))
                .expect("active sets hold few unmatched requests");
            (c, p.into_iter().map(|(i, j)| (ids[i], ids[j])).collect::<Vec<_>>())
        };
        if k % 2 == 0 {
            return solve(free).1;
        }
        (0..k)
            .map(|skip| {
                let ids: Vec<usize> = free.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect();
                solve(&ids)
            })
            .fold(None::<(f64, Vec<(usize, usize)>)>, |best, cand| match best {
                Some(b) if b.0 <= cand.0 + TOL => Some(b),
                _ => Some(cand),
            })
            .map(|b| b.1)
            .unwrap_or_default()
    }

    /// Grows every growing set with remaining budget at integer time `until`,
    /// processing tight constraints as they appear. `on_slice` sees the
    /// system after every growth slice and tight-edge batch.
    pub fn advance(
        &mut self,
        until: Time,
        on_slice: &mut dyn FnMut(&DualSystem),
    ) -> Result<Vec<DualEvent>, SolveError> {
        self.clock = self.clock.max(until);
        let mut events = Vec::new();
        self.process_tight(until, &mut events)?;
        loop {
            let mut participants = Vec::new();
            let mut delta = f64::INFINITY;
            for s in self.active_ids() {
                if self.sets[s].growing() {
                    let b = self.budget(s, until)?;
                    if b > TOL {
                        participants.push(s);
                        delta = delta.min(b);
                    }
                }
            }
            if participants.is_empty() {
                break;
            }
            let grows = |s: usize| participants.contains(&s);
            for (u, v, slack) in self.crossing() {
                let rate = u8::from(grows(self.active_of[u])) + u8::from(grows(self.active_of[v]));
                if rate > 0 {
                    delta = delta.min(slack.max(0.0) / f64::from(rate));
                }
            }
            for &s in &participants {
                self.sets[s].y += delta;
                for x in self.sets[s].members.iter() {
                    self.load[x] += delta;
                }
            }
            events.push(DualEvent::Grow { delta, sets: participants });
            self.process_tight(until, &mut events)?;
            on_slice(self);
        }
        self.check_witness(until)?;
        Ok(events)
    }

    /// Every growing set holds a member whose delay budget is used up.
    fn check_witness(&self, t: Time) -> Result<(), SolveError> {
        for s in self.active_ids() {
            if self.sets[s].growing() && self.budget(s, t)? > TOL {
                return Err(SolveError::Invariant(format!("set {s} lacks a tight witness at {t}")));
            }
        }
        Ok(())
    }

    /// Growth of each growing set if it ran unobstructed to time `t`.
    fn free_growth(&self, t: Time) -> Result<Vec<(usize, f64)>, SolveError> {
        let mut out = Vec::new();
        for s in self.active_ids() {
            if self.sets[s].growing() {
                out.push((s, self.budget(s, t)?));
            }
        }
        Ok(out)
    }

    fn tight_by(&self, t: Time) -> Result<bool, SolveError> {
        let growth = self.free_growth(t)?;
        let g = |s: usize| growth.iter().find(|x| x.0 == s).map_or(0.0, |x| x.1);
        Ok(self
            .crossing()
            .any(|(u, v, slack)| slack - g(self.active_of[u]) - g(self.active_of[v]) <= TOL))
    }

    /// Skips quiet integer times in `(clock, limit)` during which no
    /// constraint can become tight, applying their growth in closed form.
    /// Returns the first integer time that needs an ordinary advance.
    pub fn fast_forward(&mut self, limit: Time) -> Result<Time, SolveError> {
        let start = self.clock;
        if limit <= start + 1 {
            return Ok(limit.min(start + 1).max(start));
        }
        let (mut lo, mut hi) = (start, limit);
        if !self.tight_by(limit)? {
            lo = limit;
        } else {
            // Invariant: no tight edge by `lo`, tight edge by `hi`.
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if self.tight_by(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        let target = if lo == limit { limit - 1 } else { lo };
        if target > start {
            for (s, g) in self.free_growth(target)? {
                self.sets[s].y += g;
                for x in self.sets[s].members.iter() {
                    self.load[x] += g;
                }
            }
            self.clock = target;
        }
        Ok(target + 1)
    }
}
