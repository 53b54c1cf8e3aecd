//! Error types, one enum per area.

use thiserror::Error;

use crate::metric::Time;
use crate::set::RequestSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("distance matrix must be square with one row per point (got {rows} rows for {points} points)")]
    MatrixShape { rows: usize, points: usize },
    #[error("distance entry ({p},{q}) is negative or not finite: {value}")]
    BadDistance { p: usize, q: usize, value: f64 },
    #[error("distance matrix diagonal entry ({0},{0}) is nonzero")]
    NonzeroDiagonal(usize),
    #[error("distance matrix not symmetric at ({p},{q})")]
    NotSymmetric { p: usize, q: usize },
    #[error("distinct points {p} and {q} at distance 0 (set allow_zero_distance to permit)")]
    ZeroDistance { p: usize, q: usize },
    #[error("triangle inequality violated on triple ({p},{q},{r}): d(p,r)={direct} > d(p,q)+d(q,r)={via}")]
    TriangleViolation { p: usize, q: usize, r: usize, direct: f64, via: f64 },
    #[error("coordinate rows must all have the same dimension")]
    CoordinateShape,
    #[error("duplicate point id {0:?}")]
    DuplicatePoint(String),
    #[error("unknown point id {0:?}")]
    UnknownPoint(String),
    #[error("unknown request id {0}")]
    UnknownRequest(usize),
    #[error("requests must carry ids 0..m in arrival order; found id {found} at position {position}")]
    RequestOrder { position: usize, found: usize },
    #[error("request {id} arrives at {arrival} after the horizon {horizon}")]
    ArrivalAfterHorizon { id: usize, arrival: Time, horizon: Time },
    #[error("{0} requests: perfect matching impossible")]
    OddRequestCount(usize),
    #[error("{0} requests exceeds the supported maximum of {1}")]
    TooManyRequests(usize, usize),
    #[error("aspect ratio undefined: fewer than two distinct points")]
    AspectRatioUndefined,
    #[error("invalid delay model: {0}")]
    InvalidDelay(String),
    #[error("invalid concave function: {0}")]
    InvalidConcave(String),
    #[error("state {state:?} contains requests that have not arrived by time {time}")]
    UnarrivedInState { state: RequestSet, time: Time },
    #[error("instance parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("state {0:?} has odd size")]
    OddState(RequestSet),
    #[error("state {state:?} is not contained in the arrived set {arrived:?}")]
    NotArrived { state: RequestSet, arrived: RequestSet },
    #[error("no witness request available for cross pair ({p},{q})")]
    NoWitness { p: usize, q: usize },
    #[error("symmetric difference of size {0} exceeds the pairing solver limit of {1}")]
    PairingTooLarge(usize, usize),
    #[error("converter input {next:?} is not a transition-graph neighbor of {prev:?}")]
    NotNeighbor { prev: RequestSet, next: RequestSet },
    #[error("no same-side single pair available in the canonical decomposition of {next:?} vs {current:?}")]
    NoSinglePair { next: RequestSet, current: RequestSet },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MtsError {
    #[error("infeasible task: every candidate state has infinite cost")]
    InfeasibleTask,
    #[error("task vector has {got} entries for {expected} states")]
    TaskLength { expected: usize, got: usize },
    #[error("empty state space")]
    EmptySpace,
    #[error("oracle scale exceeded: {0}")]
    Scale(String),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("forcing horizon too small: requests {0:?} unmatched at the horizon")]
    Unmatched(Vec<usize>),
    #[error("unsupported delay model for this solver: {0}")]
    UnsupportedDelay(String),
    #[error("dual infeasibility on edge ({u},{v}): load {load} exceeds optcost {optcost}")]
    DualInfeasible { u: usize, v: usize, load: f64, optcost: f64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Mts(#[from] MtsError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle scale exceeded: {0}")]
    Scale(String),
    #[error("odd dimension {0}: perfect matching impossible")]
    OddDimension(usize),
    #[error("no feasible solution within the horizon")]
    Infeasible,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("invalid adversary parameters: {0}")]
    Params(String),
    #[error("adversary bookkeeping invariant broken: {0}")]
    Bookkeeping(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
