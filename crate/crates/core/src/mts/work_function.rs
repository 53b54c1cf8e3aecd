//! Work functions and the work-function algorithm.

use crate::cost::{Cost, TOL};
use crate::error::MtsError;
use crate::mts::space::MtsSpace;

/// `w_t(S)`: cheapest cost of serving all tasks so far and ending in `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkFunction {
    pub values: Vec<Cost>,
}

impl WorkFunction {
    /// `w_0(S) = c(start, S)` with the start at index 0.
    pub fn initial(space: &impl MtsSpace) -> Self {
        WorkFunction { values: (0..space.len()).map(|s| Cost::Finite(space.cost(0, s))).collect() }
    }

    pub fn min(&self) -> Cost {
        self.values.iter().fold(Cost::Infinite, |a, &b| a.min(b))
    }
}

/// `w_t(S) = min_{S'} w_{t-1}(S') + task(S') + c(S', S)`.
pub fn work_function_step(
    prev: &WorkFunction,
    task: &[Cost],
    space: &impl MtsSpace,
) -> Result<WorkFunction, MtsError> {
    let n = space.len();
    if task.len() != n || prev.values.len() != n {
        return Err(MtsError::TaskLength { expected: n, got: task.len() });
    }
    let sources: Vec<(usize, f64)> = (0..n)
        .filter_map(|s| match prev.values[s] + task[s] {
            Cost::Finite(x) => Some((s, x)),
            Cost::Infinite => None,
        })
        .collect();
    let mut out = vec![f64::INFINITY; n];
    for &(src, base) in &sources {
        for (target, o) in out.iter_mut().enumerate() {
            let v = base + space.cost(src, target);
            if v < *o {
                *o = v;
            }
        }
    }
    Ok(WorkFunction { values: out.into_iter().map(Cost::from).collect() })
}

/// Move rule: argmin of `w_t(S) + c(prev, S)` over states with finite task
/// and finite work-function value; near-ties go to the smallest key.
pub fn wfa_choose(
    prev: usize,
    w: &WorkFunction,
    task: &[Cost],
    space: &impl MtsSpace,
) -> Result<usize, MtsError> {
    let mut best: Option<(f64, u64, usize)> = None;
    for s in 0..space.len() {
        if task[s].is_infinite() {
            continue;
        }
        let Cost::Finite(ws) = w.values[s] else { continue };
        let v = ws + space.cost(prev, s);
        let key = space.key(s);
        let better = match best {
            None => true,
            Some((bv, bk, _)) => v < bv - TOL || (v <= bv + TOL && key < bk),
        };
        if better {
            best = Some((v, key, s));
        }
    }
    best.map(|b| b.2).ok_or(MtsError::InfeasibleTask)
}

/// All work functions `w_1..w_T` (empty when there are no tasks).
pub fn work_functions(space: &impl MtsSpace, tasks: &[Vec<Cost>]) -> Result<Vec<WorkFunction>, MtsError> {
    let mut out = Vec::with_capacity(tasks.len());
    let mut w = WorkFunction::initial(space);
    for task in tasks {
        w = work_function_step(&w, task, space)?;
        out.push(w.clone());
    }
    Ok(out)
}

/// Exact offline optimum starting from state 0.
pub fn mts_opt(space: &impl MtsSpace, tasks: &[Vec<Cost>]) -> Result<Cost, MtsError> {
    if space.is_empty() {
        return Err(MtsError::EmptySpace);
    }
    Ok(work_functions(space, tasks)?.last().map_or(Cost::ZERO, WorkFunction::min))
}

/// A run of the work-function algorithm on a fixed space.
#[derive(Debug, Clone, PartialEq)]
pub struct WfaRun {
    pub states: Vec<usize>,
    pub transition: f64,
    pub processing: Cost,
    pub total: Cost,
}

pub fn run_wfa(space: &impl MtsSpace, tasks: &[Vec<Cost>]) -> Result<WfaRun, MtsError> {
    if space.is_empty() {
        return Err(MtsError::EmptySpace);
    }
    let wfs = work_functions(space, tasks)?;
    let mut cur = 0;
    let mut states = Vec::with_capacity(tasks.len());
    let (mut transition, mut processing) = (0.0, Cost::ZERO);
    for (w, task) in wfs.iter().zip(tasks) {
        let next = wfa_choose(cur, w, task, space)?;
        transition += space.cost(cur, next);
        processing = processing + task[next];
        cur = next;
        states.push(cur);
    }
    Ok(WfaRun { states, transition, processing, total: processing + transition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mts::space::MatrixSpace;

    fn f(x: f64) -> Cost {
        Cost::Finite(x)
    }

    #[test]
    fn single_state_accumulates() {
        let s = MatrixSpace::from_fn(1, |_, _| 0.0);
        let w = work_function_step(&WorkFunction::initial(&s), &[f(3.0)], &s).unwrap();
        assert_eq!(w.values, vec![f(3.0)]);
    }

    #[test]
    fn two_state_hand_example() {
        let s = MatrixSpace::from_fn(2, |_, _| 1.0);
        let prev = WorkFunction { values: vec![f(0.0), f(0.0)] };
        let w = work_function_step(&prev, &[f(5.0), f(0.0)], &s).unwrap();
        assert_eq!(w.values, vec![f(1.0), f(0.0)]);
    }

    #[test]
    fn zero_task_keeps_lipschitz_function() {
        let s = MatrixSpace::from_fn(3, |i, j| (i as f64 - j as f64).abs());
        let prev = WorkFunction { values: vec![f(0.0), f(1.0), f(1.5)] };
        let w = work_function_step(&prev, &[Cost::ZERO; 3], &s).unwrap();
        assert_eq!(w, prev);
    }

    #[test]
    fn infinite_tasks_propagate() {
        let s = MatrixSpace::from_fn(2, |_, _| 1.0);
        let w = work_function_step(&WorkFunction::initial(&s), &[Cost::Infinite, Cost::Infinite], &s).unwrap();
        assert_eq!(w.values, vec![Cost::Infinite, Cost::Infinite]);
        assert_eq!(wfa_choose(0, &w, &[Cost::Infinite; 2], &s), Err(MtsError::InfeasibleTask));
    }

    #[test]
    fn choose_rules() {
        let s = MatrixSpace::from_fn(3, |_, _| 1.0);
        let w = WorkFunction { values: vec![f(0.0), f(1.0), f(1.0)] };
        assert_eq!(wfa_choose(0, &w, &[Cost::ZERO; 3], &s).unwrap(), 0);
        // Deadline forbids the current state: a finite-task state is chosen.
        assert_eq!(wfa_choose(0, &w, &[Cost::Infinite, Cost::ZERO, Cost::ZERO], &s).unwrap(), 1);
        // Symmetric minima resolve to the smaller key.
        let keyed = s.clone().with_keys(vec![9, 5, 3]);
        assert_eq!(wfa_choose(0, &w, &[Cost::Infinite, Cost::ZERO, Cost::ZERO], &keyed).unwrap(), 2);
    }

    #[test]
    fn opt_examples() {
        let s = MatrixSpace::from_fn(3, |i, j| (i as f64 - j as f64).abs());
        assert_eq!(mts_opt(&s, &[]).unwrap(), Cost::ZERO);
        assert_eq!(mts_opt(&s, &[vec![f(0.0), f(4.0), f(4.0)]]).unwrap(), Cost::ZERO);
        let tasks = vec![vec![f(5.0), f(0.0), f(5.0)], vec![f(5.0), f(5.0), f(0.0)]];
        assert_eq!(mts_opt(&s, &tasks).unwrap(), f(2.0));
        let run = run_wfa(&s, &tasks).unwrap();
        assert!(run.total >= f(2.0));
    }
}
