//! Guess-and-double: run the work-function algorithm inside a ball around the
//! start whose radius tracks the current offline optimum.

use std::fmt::Debug;
use std::hash::Hash;

use crate::cost::{Cost, TOL};
use crate::error::MtsError;
use crate::mts::space::{MatrixSpace, MtsSpace};
use crate::mts::work_function::{wfa_choose, work_functions, WorkFunction};

/// A restriction of an online MTS to a finite list of states.
#[derive(Debug, Clone)]
pub struct Snapshot<S> {
    /// `states[0]` is the start.
    pub states: Vec<S>,
    pub space: MatrixSpace,
    /// `tasks[τ][i]` for every revealed task.
    pub tasks: Vec<Vec<Cost>>,
}

impl<S: PartialEq> Snapshot<S> {
    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.states.iter().position(|x| x == s)
    }
}

/// An MTS whose states and tasks are revealed online.
pub trait OnlineMts {
    type State: Copy + Eq + Hash + Debug;

    fn start(&self) -> Self::State;
    fn num_tasks(&self) -> usize;
    /// Representative of the class of states at distance 0 from `s`.
    fn canonical(&self, s: Self::State) -> Self::State;
    /// All states within `radius` of the start (start first), plus `extra`.
    fn snapshot(&self, radius: f64, extra: &[Self::State]) -> Result<Snapshot<Self::State>, MtsError>;
    fn transition_cost(&self, a: Self::State, b: Self::State) -> Result<f64, MtsError>;
    /// Radius from which the ball is the whole space.
    fn full_radius(&self) -> f64;
    /// Smallest positive distance from the start.
    fn min_positive_radius(&self) -> f64;
}

/// Guess bookkeeping: `2^{j-1} < OPT_t <= 2^j`, or `j = None` while `OPT_t = 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GuessState {
    pub j: Option<i32>,
    pub phase_index: usize,
    /// Task indices at which a new phase began (the first phase is implicit).
    pub phase_boundaries: Vec<usize>,
    pub opt_trace: Vec<Cost>,
}

fn radius_of(j: Option<i32>) -> f64 {
    j.map_or(0.0, |j| 2f64.powi(j))
}

/// Exponent with `2^{j-1} < opt <= 2^j`, or `None` for a zero optimum.
pub fn guess_exponent(opt: f64) -> Option<i32> {
    if opt <= TOL {
        return None;
    }
    let mut j = opt.log2().ceil() as i32;
    while 2f64.powi(j) < opt {
        j += 1;
    }
    while 2f64.powi(j - 1) >= opt {
        j -= 1;
    }
    Some(j)
}

/// Outcome of one online step.
#[derive(Debug, Clone, PartialEq)]
pub struct GdStep<S> {
    pub previous: S,
    pub state: S,
    pub opt: Cost,
    pub new_phase: bool,
    pub transition: f64,
    pub processing: Cost,
}

/// Exact offline optimum of an online MTS over the revealed tasks.
///
/// An optimal schedule never leaves the ball of radius OPT, so the optimum
/// restricted to a ball of radius `r` is exact once it is at most `r`.
pub struct ExactOpt<S> {
    pub opt: Cost,
    pub radius: f64,
    pub snapshot: Snapshot<S>,
    pub work: Vec<WorkFunction>,
}

pub fn exact_opt<M: OnlineMts>(
    mts: &M,
    radius: f64,
    extra: &[M::State],
) -> Result<ExactOpt<M::State>, MtsError> {
    let full = mts.full_radius();
    let mut r = radius;
    loop {
        let snapshot = mts.snapshot(r, extra)?;
        let work = work_functions(&snapshot.space, &snapshot.tasks)?;
        let opt = work.last().map_or(Cost::ZERO, WorkFunction::min);
        let exact = match opt {
            Cost::Finite(o) => o <= r + TOL,
            Cost::Infinite => false,
        };
        if exact || r >= full {
            return Ok(ExactOpt { opt, radius: r, snapshot, work });
        }
        r = match opt {
            Cost::Finite(o) => o,
            Cost::Infinite if r <= 0.0 => mts.min_positive_radius(),
            Cost::Infinite => 2.0 * r,
        };
        if r >= full {
            r = f64::INFINITY;
        }
    }
}

/// Online guess-and-double driver.
#[derive(Debug, Clone)]
pub struct GuessAndDouble<S> {
    guess: GuessState,
    current: S,
    visited: Vec<S>,
    transition: f64,
    processing: Cost,
}

impl<S: Copy + Eq + Hash + Debug> GuessAndDouble<S> {
    pub fn new(start: S) -> Self {
        GuessAndDouble {
            guess: GuessState::default(),
            current: start,
            visited: Vec::new(),
            transition: 0.0,
            processing: Cost::ZERO,
        }
    }

    pub fn guess(&self) -> &GuessState {
        &self.guess
    }

    pub fn current(&self) -> S {
        self.current
    }

    pub fn visited(&self) -> &[S] {
        &self.visited
    }

    pub fn total(&self) -> Cost {
        self.processing + self.transition
    }

    /// Serves the newest revealed task.
    pub fn step<M: OnlineMts<State = S>>(&mut self, mts: &M) -> Result<GdStep<S>, MtsError> {
        let t = mts.num_tasks();
        assert!(t > self.visited.len(), "no new task revealed");
        let current = mts.canonical(self.current);
        let r_guess = radius_of(self.guess.j);
        let found = exact_opt(mts, r_guess, &[current])?;
        let opt = found.opt;
        let Cost::Finite(opt_value) = opt else {
            return Err(MtsError::InfeasibleTask);
        };
        self.guess.opt_trace.push(opt);
        let j = guess_exponent(opt_value);
        let new_phase = j != self.guess.j;
        let (snapshot, work, next) = if new_phase {
            if t > 1 {
                self.guess.phase_index += 1;
                self.guess.phase_boundaries.push(t - 1);
            }
            self.guess.j = j;
            // Re-simulate from scratch on the new ball over all tasks.
            let snapshot = mts.snapshot(radius_of(j), &[])?;
            let work = work_functions(&snapshot.space, &snapshot.tasks)?;
            let mut s = 0;
            for (w, task) in work.iter().zip(&snapshot.tasks) {
                s = wfa_choose(s, w, task, &snapshot.space)?;
            }
            (snapshot, work, s)
        } else {
            debug_assert_eq!(found.radius, r_guess);
            let prev = found.snapshot.index_of(&current).expect("current state is in the snapshot");
            let s = wfa_choose(prev, &found.work[t - 1], &found.snapshot.tasks[t - 1], &found.snapshot.space)?;
            (found.snapshot, found.work, s)
        };
        drop(work);
        let state = snapshot.states[next];
        let transition = mts.transition_cost(self.current, state)?;
        let processing = snapshot.tasks[t - 1][next];
        self.transition += transition;
        self.processing = self.processing + processing;
        let previous = self.current;
        self.current = state;
        self.visited.push(state);
        Ok(GdStep { previous, state, opt, new_phase, transition, processing })
    }
}

/// An online MTS over a fixed matrix space with tasks revealed one at a time.
#[derive(Debug, Clone)]
pub struct StaticMts {
    pub space: MatrixSpace,
    pub tasks: Vec<Vec<Cost>>,
    pub revealed: usize,
}

impl OnlineMts for StaticMts {
    type State = usize;

    fn start(&self) -> usize {
        0
    }

    fn num_tasks(&self) -> usize {
        self.revealed
    }

    fn canonical(&self, s: usize) -> usize {
        s
    }

    fn snapshot(&self, radius: f64, extra: &[usize]) -> Result<Snapshot<usize>, MtsError> {
        let mut states: Vec<usize> =
            (0..self.space.len()).filter(|&s| self.space.cost(0, s) <= radius + TOL).collect();
        for &e in extra {
            if !states.contains(&e) {
                states.push(e);
            }
        }
        let space = MatrixSpace::from_fn(states.len(), |i, j| self.space.cost(states[i], states[j]))
            .with_keys(states.iter().map(|&s| s as u64).collect());
        let tasks = self.tasks[..self.revealed]
            .iter()
            .map(|task| states.iter().map(|&s| task[s]).collect())
            .collect();
        Ok(Snapshot { states, space, tasks })
    }

    fn transition_cost(&self, a: usize, b: usize) -> Result<f64, MtsError> {
        Ok(self.space.cost(a, b))
    }

    fn full_radius(&self) -> f64 {
        (0..self.space.len()).map(|s| self.space.cost(0, s)).fold(0.0, f64::max)
    }

    fn min_positive_radius(&self) -> f64 {
        (0..self.space.len())
            .map(|s| self.space.cost(0, s))
            .filter(|&c| c > 0.0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Result of running guess-and-double over a task sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct GdRun {
    pub states: Vec<usize>,
    pub total: Cost,
    pub guess: GuessState,
}

/// Runs guess-and-double on a fixed space, revealing tasks one per timestep.
pub fn guess_and_double_run(space: &MatrixSpace, tasks: &[Vec<Cost>]) -> Result<GdRun, MtsError> {
    let mut mts = StaticMts { space: space.clone(), tasks: tasks.to_vec(), revealed: 0 };
    let mut gd = GuessAndDouble::new(0usize);
    for _ in tasks {
        mts.revealed += 1;
        gd.step(&mts)?;
    }
    Ok(GdRun { states: gd.visited().to_vec(), total: gd.total(), guess: gd.guess().clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mts::work_function::mts_opt;

    fn f(x: f64) -> Cost {
        Cost::Finite(x)
    }

    fn line(n: usize) -> MatrixSpace {
        MatrixSpace::from_fn(n, |i, j| (i as f64 - j as f64).abs())
    }

    #[test]
    fn exponent_satisfies_bracket() {
        for &o in &[0.3, 1.0, 1.5, 2.0, 3.0, 4.0, 1000.0, 1e-3] {
            let j = guess_exponent(o).unwrap();
            assert!(2f64.powi(j - 1) < o && o <= 2f64.powi(j), "{o} {j}");
        }
        assert_eq!(guess_exponent(0.0), None);
    }

    #[test]
    fn zero_tasks_stay_at_start() {
        let run = guess_and_double_run(&line(4), &vec![vec![Cost::ZERO; 4]; 5]).unwrap();
        assert_eq!(run.states, vec![0; 5]);
        assert_eq!(run.guess.j, None);
        assert!(run.guess.phase_boundaries.is_empty());
    }

    #[test]
    fn doubling_records_one_boundary() {
        // OPT stays 1 for two tasks, then jumps to 3.
        let tasks = vec![
            vec![f(1.0), f(1.0), f(1.0), f(1.0)],
            vec![Cost::ZERO; 4],
            vec![f(2.0), f(2.0), f(2.0), f(2.0)],
        ];
        let run = guess_and_double_run(&line(4), &tasks).unwrap();
        assert_eq!(run.guess.j, Some(2));
        assert_eq!(run.guess.phase_boundaries, vec![2]);
        assert_eq!(run.guess.opt_trace, vec![f(1.0), f(1.0), f(3.0)]);
    }

    #[test]
    fn envelope_on_forcing_tasks() {
        let s = line(5);
        let tasks = vec![
            vec![Cost::Infinite, f(0.0), f(3.0), f(3.0), f(3.0)],
            vec![Cost::Infinite, Cost::Infinite, f(1.0), f(0.0), f(5.0)],
            vec![f(4.0), Cost::Infinite, Cost::Infinite, f(2.0), f(0.0)],
        ];
        let run = guess_and_double_run(&s, &tasks).unwrap();
        let opt = mts_opt(&s, &tasks).unwrap().to_f64();
        let n = s.len() as f64;
        assert!(run.total.to_f64() <= 6.0 * ((2.0 * n - 1.0) + 2.0) * opt + 1e-9);
        assert!(run.states.iter().zip(&tasks).all(|(&st, t)| t[st].is_finite()));
    }
}
