//! End-to-end non-clairvoyant solver for size-based delay.

pub mod classes;
pub mod matcher;
pub mod solution;
pub mod solve;

pub use classes::{Groups, MatchingMts, TaskRecord};
pub use matcher::NonClairvoyantMatcher;
pub use solution::{verify_solution, MatchEdge, MatchingSolution, TraceStep, VerifyReport};
pub use solve::{nonclairvoyant_decisions, run_online, solve_nonclairvoyant, AuditedDelay, DelaySource, OnlineRun};
