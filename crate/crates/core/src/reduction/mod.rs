//! Reduction from matching with set delay to a metrical task system.

pub mod converter;
pub mod pairing;
pub mod schedule;
pub mod transition;

pub use converter::{AddedPair, MonotoneConverterState, StepReport};
pub use pairing::{min_cost_pairing, PAIRING_LIMIT};
pub use schedule::{schedule_cost, CostBreakdown, ScheduleStep};
pub use transition::{
    densify_move, densify_schedule, is_neighbor, realize, CanonicalDecomposition, DenseState, Entry,
    Side, TransitionMetric,
};
