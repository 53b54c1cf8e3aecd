//! Online min-cost perfect matching with set delay.
//!
//! The non-clairvoyant solver reduces size-based delay to a metrical task
//! system over even request subsets and solves it with a work-function
//! algorithm inside a doubling ball. Its schedule is converted into a
//! monotone one whose added pairs form the matching. Uniform concave delay
//! has its own primal-dual moat-growing solver. Exhaustive oracles and
//! lower-bound adversaries back the tests.

pub mod adversary;
pub mod concave;
pub mod cost;
pub mod delay;
pub mod error;
pub mod generate;
pub mod instance;
pub mod io;
pub mod metric;
pub mod mts;
pub mod online;
pub mod oracles;
pub mod pipeline;
pub mod reduction;
pub mod set;

pub use cost::{Cost, TOL};
pub use delay::{ConcaveFn, DelayKind, DelayModel, SetEntry, SetPhase, SizePhase, StepDelay};
pub use error::{AdversaryError, ModelError, MtsError, OracleError, ReductionError, SolveError};
pub use instance::{DistMatrix, Instance};
pub use metric::{concave_time_dist, MetricKind, MetricSpace, Request, Time};
pub use online::{GreedyMatcher, OnlineMatcher};
pub use pipeline::{solve_nonclairvoyant, verify_solution, MatchEdge, MatchingSolution, VerifyReport};
pub use set::{RequestSet, State};
