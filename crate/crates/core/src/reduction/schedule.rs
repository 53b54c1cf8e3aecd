//! Cost of a state schedule: transitions plus processing.

use serde::Serialize;

use crate::cost::Cost;
use crate::metric::Time;
use crate::set::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleStep {
    pub state: State,
    pub time: Time,
    /// Intermediate shortest-path state; pays no processing cost.
    pub synthetic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub transition: f64,
    pub processing: Cost,
    pub total: Cost,
}

/// Sums `c(S_{i-1}, S_i) + f_i(R_i \ S_i)` over a schedule starting at `start`.
///
/// `transition(t, a, b)` prices a move performed at time `t`;
/// `processing(t, s)` is the task cost of state `s` at time `t`.
pub fn schedule_cost<E>(
    start: State,
    steps: &[ScheduleStep],
    mut transition: impl FnMut(Time, State, State) -> Result<f64, E>,
    mut processing: impl FnMut(Time, State) -> Result<Cost, E>,
) -> Result<CostBreakdown, E> {
    let mut prev = start;
    let mut trans = 0.0;
    let mut proc = Cost::ZERO;
    for st in steps {
        trans += transition(st.time, prev, st.state)?;
        if !st.synthetic {
            proc = proc + processing(st.time, st.state)?;
        }
        prev = st.state;
    }
    Ok(CostBreakdown { transition: trans, processing: proc, total: proc + trans })
}
