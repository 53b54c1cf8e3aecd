//! Metrical task systems: work functions and guess-and-double.

pub mod guess_double;
pub mod space;
pub mod work_function;

pub use guess_double::{
    exact_opt, guess_and_double_run, guess_exponent, GdRun, GdStep, GuessAndDouble, GuessState,
    OnlineMts, Snapshot, StaticMts,
};
pub use space::{MatrixSpace, MtsSpace};
pub use work_function::{mts_opt, run_wfa, wfa_choose, work_function_step, work_functions, WfaRun, WorkFunction};
