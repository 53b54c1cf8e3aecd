//! Adaptive and randomized lower-bound constructions that interrogate an
//! online matcher one timestep at a time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::{Cost, TOL};
use crate::delay::{DelayModel, SetEntry, SetPhase, SizePhase, StepDelay, StepRule};
use crate::error::AdversaryError;
use crate::instance::Instance;
use crate::io::InstanceFile;
use crate::metric::{MetricSpace, Request, Time};
use crate::online::OnlineMatcher;
use crate::oracles::{brute_force_opt, earliest_time_opt, EARLIEST_MAX_REQUESTS};
use crate::pipeline::{MatchEdge, MatchingSolution};
use crate::set::RequestSet;

/// Builds a fresh matcher for the metric an adversary constructs.
pub type MatcherFactory<'a> = &'a dyn Fn(&MetricSpace) -> Box<dyn OnlineMatcher>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    FourPoint,
    DetPhase,
    RandPhase,
}

impl AdversaryKind {
    pub fn name(self) -> &'static str {
        match self {
            AdversaryKind::FourPoint => "four_point",
            AdversaryKind::DetPhase => "det_phase",
            AdversaryKind::RandPhase => "rand_phase",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub phase: usize,
    pub t: Time,
    /// Size threshold above which delay is infinite, for size-based phases.
    pub threshold: Option<usize>,
    /// Requests carrying an infinite deadline, for set-table phases.
    pub deadlines: Vec<usize>,
    /// `(request, point)` for each request emitted in this phase.
    pub arrivals: Vec<(usize, usize)>,
    pub matched: Vec<(usize, usize)>,
    /// Inactive unsaturated points after the algorithm moved.
    pub inactive_unsaturated: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AdversaryTranscript {
    pub kind: AdversaryKind,
    pub algorithm: String,
    pub n: usize,
    pub seed: Option<u64>,
    pub phases: Vec<PhaseRecord>,
    pub feasible: bool,
    pub alg_distance: f64,
    pub alg_cost: Cost,
    pub opt_cost: Cost,
    /// Offline optimum from an exhaustive oracle, when within its scale.
    pub oracle_opt: Option<Cost>,
    pub ratio: Cost,
    pub instance: InstanceFile,
}

impl AdversaryTranscript {
    pub fn cross_matches(&self) -> usize {
        let inst = self.instance.clone().into_instance().expect("transcript instance is valid");
        self.phases
            .iter()
            .flat_map(|p| &p.matched)
            .filter(|&&(a, b)| inst.requests()[a].point != inst.requests()[b].point)
            .count()
    }
}

pub fn ratio(alg: Cost, opt: Cost) -> Cost {
    match (alg, opt) {
        (Cost::Finite(a), Cost::Finite(o)) if o > TOL => Cost::Finite(a / o),
        (Cost::Finite(a), Cost::Finite(_)) if a <= TOL => Cost::Finite(1.0),
        _ => Cost::Infinite,
    }
}

/// Drives a matcher and keeps the bookkeeping shared by all constructions.
struct Driver {
    alg: Box<dyn OnlineMatcher>,
    requests: Vec<Request>,
    unmatched: RequestSet,
    edges: Vec<MatchEdge>,
    feasible: bool,
}

impl Driver {
    fn new(alg: Box<dyn OnlineMatcher>) -> Self {
        Driver { alg, requests: Vec::new(), unmatched: RequestSet::EMPTY, edges: Vec::new(), feasible: true }
    }

    fn emit(&mut self, point: usize, arrival: Time) -> Request {
        let r = Request { id: self.requests.len(), point, arrival };
        self.requests.push(r);
        r
    }

    fn step(&mut self, t: Time, arrivals: &[Request], delay: &StepDelay) -> Result<Vec<(usize, usize)>, AdversaryError> {
        for r in arrivals {
            self.unmatched.insert(r.id);
        }
        let pairs = self.alg.step(t, arrivals, delay)?;
        for &(a, b) in &pairs {
            let pair = RequestSet::pair(a, b);
            if a == b || !pair.is_subset(self.unmatched) {
                return Err(AdversaryError::Bookkeeping(format!("algorithm matched invalid pair ({a},{b}) at {t}")));
            }
            self.unmatched = self.unmatched.difference(pair);
            self.edges.push(MatchEdge { a: a.min(b), b: a.max(b), t });
        }
        if delay.eval(self.unmatched).is_infinite() {
            self.feasible = false;
        }
        Ok(pairs)
    }

    fn partner(&self, r: usize) -> Option<usize> {
        self.edges.iter().find_map(|e| match () {
            _ if e.a == r => Some(e.b),
            _ if e.b == r => Some(e.a),
            _ => None,
        })
    }

    fn finish(
        self,
        kind: AdversaryKind,
        n: usize,
        seed: Option<u64>,
        phases: Vec<PhaseRecord>,
        inst: Instance,
        opt_cost: Cost,
        oracle_opt: Option<Cost>,
    ) -> AdversaryTranscript {
        let feasible = self.feasible && self.unmatched.is_empty();
        let sol = MatchingSolution::from_edges(&inst, self.edges);
        let alg_cost = if feasible { sol.total } else { Cost::Infinite };
        AdversaryTranscript {
            kind,
            algorithm: self.alg.name().to_string(),
            n,
            seed,
            phases,
            feasible,
            alg_distance: sol.distance_cost,
            alg_cost,
            opt_cost,
            oracle_opt,
            ratio: ratio(alg_cost, opt_cost),
            instance: InstanceFile::from_instance(&inst),
        }
    }
}

fn deadline_entries(ids: &[usize]) -> Vec<SetEntry> {
    ids.iter().map(|&r| SetEntry { set: RequestSet::singleton(r), cost: Cost::Infinite }).collect()
}

/// Three points pairwise `eps` apart and a fourth at distance `d` from all.
/// The first cluster request has a deadline at once; the cluster request the
/// algorithm leaves alone gets one at t = 1; two requests with immediate
/// deadlines then arrive at t = 2, one at the far point and one on the
/// cluster point whose request the optimum keeps open.
pub fn four_point_adversary(d: f64, eps: f64, make: MatcherFactory<'_>) -> Result<AdversaryTranscript, AdversaryError> {
    if !(eps > 0.0 && d > eps && d.is_finite()) {
        return Err(AdversaryError::Params(format!("need D > eps > 0, got D = {d}, eps = {eps}")));
    }
    let rows: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| if i == j { 0.0 } else if i == 3 || j == 3 { d } else { eps }).collect())
        .collect();
    let metric = MetricSpace::from_matrix((1..=4).map(|i| format!("p{i}")).collect(), rows, false)?;
    let mut drv = Driver::new(make(&metric));
    let horizon: Time = 2;
    let mut phases = Vec::new();
    let mut tables = Vec::new();

    let first: Vec<Request> = (0..4).map(|p| drv.emit(p, 0)).collect();
    let mut deadlines = vec![0];
    let delay = StepDelay { rule: StepRule::Set(deadline_entries(&deadlines)), forcing: false };
    let matched = drv.step(0, &first, &delay)?;
    tables.push(SetPhase { from: 0, entries: deadline_entries(&deadlines) });
    phases.push(PhaseRecord {
        phase: 1,
        t: 0,
        threshold: None,
        deadlines: deadlines.clone(),
        arrivals: first.iter().map(|r| (r.id, r.point)).collect(),
        matched,
        inactive_unsaturated: None,
    });

    // `kept` is the cluster request the optimum leaves open for the new arrival.
    let kept = match drv.partner(0) {
        Some(p @ (1 | 2)) => p,
        _ => 2,
    };
    let forced = 3 - kept;
    deadlines.push(forced);
    let delay = StepDelay { rule: StepRule::Set(deadline_entries(&deadlines)), forcing: false };
    let matched = drv.step(1, &[], &delay)?;
    tables.push(SetPhase { from: 1, entries: deadline_entries(&deadlines) });
    phases.push(PhaseRecord {
        phase: 2,
        t: 1,
        threshold: None,
        deadlines: deadlines.clone(),
        arrivals: Vec::new(),
        matched,
        inactive_unsaturated: None,
    });

    let late = [drv.emit(kept, 2), drv.emit(3, 2)];
    deadlines.extend([4, 5]);
    let delay = StepDelay { rule: StepRule::Set(deadline_entries(&deadlines)), forcing: true };
    let matched = drv.step(2, &late, &delay)?;
    tables.push(SetPhase { from: 2, entries: deadline_entries(&deadlines) });
    phases.push(PhaseRecord {
        phase: 3,
        t: 2,
        threshold: None,
        deadlines,
        arrivals: late.iter().map(|r| (r.id, r.point)).collect(),
        matched,
        inactive_unsaturated: None,
    });

    let inst = Instance::new(metric, drv.requests.clone(), DelayModel::SetTable(tables), horizon)?;
    let oracle = brute_force_opt(&inst)?.total;
    if !oracle.approx_eq(Cost::Finite(eps), TOL) {
        return Err(AdversaryError::Bookkeeping(format!("offline optimum {oracle} differs from eps = {eps}")));
    }
    Ok(drv.finish(AdversaryKind::FourPoint, 4, None, phases, inst, Cost::Finite(eps), Some(oracle)))
}

/// Uniform `n`-point metric with one request per point at t = 0, then one
/// request per phase on an unsaturated point, never more than two per point.
/// Phase `i` runs at time `i - 1` and allows at most `n - i` unmatched
/// requests. The deterministic mode always picks the smallest inactive
/// unsaturated point; the randomized mode picks any unsaturated point
/// uniformly.
pub fn uniform_phase_adversary(
    n: usize,
    make: MatcherFactory<'_>,
    randomized: bool,
    seed: u64,
) -> Result<AdversaryTranscript, AdversaryError> {
    if n < 3 {
        return Err(AdversaryError::Params(format!("need n >= 3 points, got {n}")));
    }
    if 2 * n - 2 > crate::set::MAX_REQUESTS {
        return Err(AdversaryError::Params(format!("n = {n} needs more than {} requests", crate::set::MAX_REQUESTS)));
    }
    let metric = MetricSpace::uniform(n);
    let mut drv = Driver::new(make(&metric));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = (n - 2) as Time;
    let mut received = vec![0usize; n];
    let mut phases = Vec::new();
    let mut tables = Vec::new();

    for i in 1..n {
        let t = (i - 1) as Time;
        let arrivals: Vec<Request> = if i == 1 {
            (0..n).map(|p| drv.emit(p, 0)).collect()
        } else {
            let active: Vec<bool> = active_points(&drv, n);
            let unsaturated: Vec<usize> = (0..n).filter(|&p| received[p] < 2).collect();
            let point = if randomized {
                unsaturated[rng.gen_range(0..unsaturated.len())]
            } else {
                *unsaturated
                    .iter()
                    .find(|&&p| !active[p])
                    .ok_or_else(|| AdversaryError::Bookkeeping(format!("no inactive unsaturated point in phase {i}")))?
            };
            if received[point] >= 2 {
                return Err(AdversaryError::Bookkeeping(format!("point {point} would receive a third request")));
            }
            vec![drv.emit(point, t)]
        };
        for r in &arrivals {
            received[r.point] += 1;
        }
        let table = SizePhase::deadline(t, n - i);
        let delay = StepDelay { rule: StepRule::Size(table.costs.clone()), forcing: t == horizon };
        let matched = drv.step(t, &arrivals, &delay)?;
        tables.push(table);
        let inactive_unsaturated = if i < n - 1 {
            let active = active_points(&drv, n);
            let count = (0..n).filter(|&p| !active[p] && received[p] < 2).count();
            if drv.feasible && count < 2 {
                return Err(AdversaryError::Bookkeeping(format!(
                    "only {count} inactive unsaturated points after phase {i}"
                )));
            }
            Some(count)
        } else {
            None
        };
        phases.push(PhaseRecord {
            phase: i,
            t,
            threshold: Some(n - i),
            deadlines: Vec::new(),
            arrivals: arrivals.iter().map(|r| (r.id, r.point)).collect(),
            matched,
            inactive_unsaturated,
        });
        if !drv.feasible {
            break;
        }
    }

    let feasible = drv.feasible;
    let requests = drv.requests.clone();
    let inst = Instance::new(metric, requests, DelayModel::SizeBased(tables), horizon)?;
    let oracle_opt = if feasible && inst.m() <= EARLIEST_MAX_REQUESTS {
        let opt = earliest_time_opt(&inst)?.total;
        if !opt.approx_eq(Cost::Finite(1.0), TOL) {
            return Err(AdversaryError::Bookkeeping(format!("offline optimum {opt} differs from 1")));
        }
        Some(opt)
    } else {
        None
    };
    let kind = if randomized { AdversaryKind::RandPhase } else { AdversaryKind::DetPhase };
    Ok(drv.finish(kind, n, randomized.then_some(seed), phases, inst, Cost::Finite(1.0), oracle_opt))
}

fn active_points(drv: &Driver, n: usize) -> Vec<bool> {
    let mut active = vec![false; n];
    for r in drv.unmatched.iter() {
        active[drv.requests[r].point] = true;
    }
    active
}

/// `2 * sum_{k=2}^{n} 1/k`, the expected cross-match count the randomized
/// construction forces.
pub fn harmonic_reference(n: usize) -> f64 {
    2.0 * (2..=n).map(|k| 1.0 / k as f64).sum::<f64>()
}
