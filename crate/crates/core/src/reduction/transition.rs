//! Transition costs between states and their canonical decompositions.

use crate::error::ReductionError;
use crate::instance::DistMatrix;
use crate::reduction::pairing::min_cost_pairing;
use crate::set::{RequestSet, State};

/// Side of a same-side decomposition entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Both endpoints in `A \ B`: the pair is removed.
    AOnly,
    /// Both endpoints in `B \ A`: the pair is added.
    BOnly,
}

/// One entry of a canonical decomposition of `A △ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entry {
    Single { p: usize, q: usize, side: Side },
    /// `p ∈ A \ B`, `q ∈ B \ A`, routed through witness `s`.
    Cross { p: usize, s: usize, q: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalDecomposition {
    pub entries: Vec<Entry>,
    pub total_cost: f64,
}

/// Transition-graph metric over even subsets of the arrived requests.
///
/// A same-side pair costs `d(p,q)`; a cross pair costs the cheapest two-edge
/// detour `d(p,s) + d(s,q)` over arrived witnesses `s ∉ {p,q}`.
#[derive(Debug, Clone)]
pub struct TransitionMetric {
    dist: DistMatrix,
    arrived: RequestSet,
    via: Vec<f64>,
    witness: Vec<u8>,
}

impl TransitionMetric {
    /// `dist` covers at least every arrived request.
    pub fn new(dist: &DistMatrix, arrived: RequestSet) -> Self {
        let n = dist.len();
        let mut via = vec![f64::INFINITY; n * n];
        let mut witness = vec![u8::MAX; n * n];
        let members = arrived.to_vec();
        for &p in &members {
            for &q in &members {
                if p >= q {
                    continue;
                }
                let mut best = (f64::INFINITY, u8::MAX);
                for &s in &members {
                    if s != p && s != q {
                        let c = dist.get(p, s) + dist.get(s, q);
                        if c < best.0 {
                            best = (c, s as u8);
                        }
                    }
                }
                via[p * n + q] = best.0;
                via[q * n + p] = best.0;
                witness[p * n + q] = best.1;
                witness[q * n + p] = best.1;
            }
        }
        TransitionMetric { dist: dist.clone(), arrived, via, witness }
    }

    pub fn arrived(&self) -> RequestSet {
        self.arrived
    }

    pub fn distances(&self) -> &DistMatrix {
        &self.dist
    }

    #[inline]
    pub fn distance(&self, p: usize, q: usize) -> f64 {
        self.dist.get(p, q)
    }

    /// Cheapest cross-pair detour cost and its witness.
    pub fn via(&self, p: usize, q: usize) -> (f64, Option<usize>) {
        let k = p * self.dist.len() + q;
        let w = self.witness[k];
        (self.via[k], (w != u8::MAX).then_some(w as usize))
    }

    fn check(&self, s: State) -> Result<(), ReductionError> {
        if !s.is_subset(self.arrived) {
            return Err(ReductionError::NotArrived { state: s, arrived: self.arrived });
        }
        if !s.is_even() {
            return Err(ReductionError::OddState(s));
        }
        Ok(())
    }

    #[inline]
    fn entry_cost(&self, a: State, p: usize, q: usize) -> f64 {
        if a.contains(p) == a.contains(q) {
            self.dist.get(p, q)
        } else {
            self.via[p * self.dist.len() + q]
        }
    }

    /// Shortest-path distance between `a` and `b` in the transition graph.
    pub fn transition_cost(&self, a: State, b: State) -> Result<f64, ReductionError> {
        self.check(a)?;
        self.check(b)?;
        let d = a.sym_diff(b);
        let cost = match d.len() {
            0 => 0.0,
            2 => {
                let mut it = d.iter();
                let (p, q) = (it.next().unwrap(), it.next().unwrap());
                self.entry_cost(a, p, q)
            }
            4 => {
                let v: Vec<usize> = d.iter().collect();
                let c = |i: usize, j: usize| self.entry_cost(a, v[i], v[j]);
                (c(0, 1) + c(2, 3)).min(c(0, 2) + c(1, 3)).min(c(0, 3) + c(1, 2))
            }
            _ => {
                let v: Vec<usize> = d.iter().collect();
                min_cost_pairing(v.len(), |i, j| self.entry_cost(a, v[i], v[j]))?.0
            }
        };
        if cost.is_infinite() {
            let v = d.to_vec();
            return Err(ReductionError::NoWitness { p: v[0], q: v[1] });
        }
        Ok(cost)
    }

    /// A minimum-cost decomposition of `a △ b`; entries sorted by their smaller id.
    pub fn canonical_decomposition(
        &self,
        a: State,
        b: State,
    ) -> Result<CanonicalDecomposition, ReductionError> {
        self.check(a)?;
        self.check(b)?;
        let v: Vec<usize> = a.sym_diff(b).iter().collect();
        let (total_cost, pairs) = min_cost_pairing(v.len(), |i, j| self.entry_cost(a, v[i], v[j]))?;
        let mut entries = Vec::with_capacity(pairs.len());
        for (i, j) in pairs {
            let (x, y) = (v[i], v[j]);
            let entry = match (a.contains(x), a.contains(y)) {
                (true, true) => Entry::Single { p: x, q: y, side: Side::AOnly },
                (false, false) => Entry::Single { p: x, q: y, side: Side::BOnly },
                (ax, _) => {
                    let (p, q) = if ax { (x, y) } else { (y, x) };
                    let (_, s) = self.via(p, q);
                    Entry::Cross { p, s: s.ok_or(ReductionError::NoWitness { p, q })?, q }
                }
            };
            entries.push(entry);
        }
        if total_cost.is_infinite() {
            return Err(ReductionError::NoWitness { p: v[0], q: v[1] });
        }
        Ok(CanonicalDecomposition { entries, total_cost })
    }
}

/// Replays a decomposition from `a` as single pair additions and removals.
///
/// Returns the visited states after `a`, ending at `b`. A cross entry
/// `(p, s, q)` swaps `p` for `q` through `s`: remove `{p,s}` then add `{s,q}`
/// when `s` is currently present, otherwise add `{s,q}` then remove `{p,s}`.
pub fn realize(a: State, dec: &CanonicalDecomposition) -> Vec<State> {
    let mut cur = a;
    let mut path = Vec::new();
    let toggle = |cur: &mut State, x: usize, y: usize, path: &mut Vec<State>| {
        *cur = cur.sym_diff(RequestSet::pair(x, y));
        path.push(*cur);
    };
    for e in &dec.entries {
        match *e {
            Entry::Single { p, q, .. } => toggle(&mut cur, p, q, &mut path),
            Entry::Cross { p, s, q } => {
                if cur.contains(s) {
                    toggle(&mut cur, p, s, &mut path);
                    toggle(&mut cur, s, q, &mut path);
                } else {
                    toggle(&mut cur, s, q, &mut path);
                    toggle(&mut cur, p, s, &mut path);
                }
            }
        }
    }
    path
}

/// Expands one move `a → b` into transition-graph neighbors.
pub fn densify_move(metric: &TransitionMetric, a: State, b: State) -> Result<Vec<State>, ReductionError> {
    Ok(realize(a, &metric.canonical_decomposition(a, b)?))
}

/// A state of a densified schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseState {
    pub state: State,
    /// Inserted on a shortest path; incurs no processing cost.
    pub synthetic: bool,
    /// Index of the raw state this step leads to.
    pub origin: usize,
}

/// Inserts shortest-path intermediates so consecutive states are neighbors.
pub fn densify_schedule(
    metric: &TransitionMetric,
    raw: &[State],
) -> Result<Vec<DenseState>, ReductionError> {
    let Some(&first) = raw.first() else {
        return Ok(Vec::new());
    };
    let mut out = vec![DenseState { state: first, synthetic: false, origin: 0 }];
    for (i, w) in raw.windows(2).enumerate() {
        let path = densify_move(metric, w[0], w[1])?;
        if path.is_empty() {
            out.push(DenseState { state: w[1], synthetic: false, origin: i + 1 });
            continue;
        }
        let last = path.len() - 1;
        out.extend(path.into_iter().enumerate().map(|(k, state)| DenseState {
            state,
            synthetic: k != last,
            origin: i + 1,
        }));
    }
    Ok(out)
}

/// Whether `a` and `b` differ by adding or removing exactly one pair.
pub fn is_neighbor(a: State, b: State) -> bool {
    let d = a.sym_diff(b);
    d.len() == 2 && (d.is_subset(a) || d.is_subset(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> DistMatrix {
        DistMatrix::from_fn(points.len(), |i, j| (points[i] - points[j]).abs())
    }

    fn s(ids: &[usize]) -> State {
        RequestSet::from_ids(ids.iter().copied())
    }

    #[test]
    fn single_edge() {
        let d = line(&[0.0, 3.0, 7.0, 8.0]);
        let tm = TransitionMetric::new(&d, RequestSet::prefix(4));
        assert_eq!(tm.transition_cost(State::EMPTY, s(&[0, 1])).unwrap(), 3.0);
        let dec = tm.canonical_decomposition(s(&[0, 1]), State::EMPTY).unwrap();
        assert_eq!(dec.entries, vec![Entry::Single { p: 0, q: 1, side: Side::AOnly }]);
    }

    #[test]
    fn cross_pair_uses_best_witness() {
        // r0..r4 on a line; A = {r0,r1}, B = {r0,r2}.
        let d = line(&[0.0, 1.0, 5.0, 2.0, 9.0]);
        let tm = TransitionMetric::new(&d, RequestSet::prefix(5));
        let c = tm.transition_cost(s(&[0, 1]), s(&[0, 2])).unwrap();
        let expect = [0usize, 3, 4]
            .iter()
            .map(|&w| d.get(1, w) + d.get(w, 2))
            .fold(f64::INFINITY, f64::min);
        assert!((c - expect).abs() < 1e-12);
        let dec = tm.canonical_decomposition(s(&[0, 1]), s(&[0, 2])).unwrap();
        assert!(matches!(dec.entries[0], Entry::Cross { p: 1, q: 2, .. }));
    }

    #[test]
    fn realize_reproduces_cost() {
        let d = line(&[0.0, 1.0, 4.0, 6.0, 6.5, 10.0]);
        let tm = TransitionMetric::new(&d, RequestSet::prefix(6));
        let states: Vec<State> = (0u64..64).map(RequestSet).filter(|x| x.is_even()).collect();
        for &a in &states {
            for &b in &states {
                let dec = tm.canonical_decomposition(a, b).unwrap();
                let path = realize(a, &dec);
                assert_eq!(*path.last().unwrap_or(&a), b);
                let mut prev = a;
                let mut total = 0.0;
                for &x in &path {
                    assert!(is_neighbor(prev, x));
                    let pair: Vec<usize> = prev.sym_diff(x).iter().collect();
                    total += d.get(pair[0], pair[1]);
                    prev = x;
                }
                assert!((total - tm.transition_cost(a, b).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn larger_size_difference_has_single_entry() {
        let d = line(&[0.0, 2.0, 3.0, 7.0, 11.0, 12.0]);
        let tm = TransitionMetric::new(&d, RequestSet::prefix(6));
        let dec = tm.canonical_decomposition(s(&[1, 2, 3, 4]), s(&[0, 5])).unwrap();
        assert!(dec
            .entries
            .iter()
            .any(|e| matches!(e, Entry::Single { side: Side::AOnly, .. })));
    }

    #[test]
    fn densify_examples() {
        let d = line(&[0.0, 1.0, 5.0, 6.0]);
        let tm = TransitionMetric::new(&d, RequestSet::prefix(4));
        let dense = densify_schedule(&tm, &[State::EMPTY, s(&[0, 1, 2, 3])]).unwrap();
        assert_eq!(dense.len(), 3);
        assert!(dense[1].synthetic && !dense[2].synthetic);
        assert_eq!(dense[1].state, s(&[0, 1]));
        let already = densify_schedule(&tm, &[State::EMPTY, s(&[0, 1])]).unwrap();
        assert_eq!(already.len(), 2);
        // Cross move expands through the witness.
        let swap = densify_schedule(&tm, &[s(&[0, 1]), s(&[0, 2])]).unwrap();
        assert_eq!(swap.len(), 3);
    }

    #[test]
    fn errors() {
        let d = line(&[0.0, 1.0, 2.0]);
        let tm = TransitionMetric::new(&d, RequestSet::prefix(2));
        assert!(matches!(
            tm.transition_cost(State::EMPTY, s(&[0, 2])),
            Err(ReductionError::NotArrived { .. })
        ));
        assert!(matches!(tm.transition_cost(State::EMPTY, s(&[0])), Err(ReductionError::OddState(_))));
        // Two requests only: a swap has no witness.
        let tm3 = TransitionMetric::new(&line(&[0.0, 1.0]), RequestSet::prefix(2));
        assert_eq!(tm3.via(0, 1).1, None);
    }
}
