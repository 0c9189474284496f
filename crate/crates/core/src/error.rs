use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    #[error("belief support is empty")]
    EmptyBeliefSupport,
    #[error("invalid belief: {0}")]
    InvalidBelief(String),
    #[error("observation {observation} has zero probability after action {action}")]
    ZeroProbabilityObservation { action: usize, observation: usize },
    #[error("model failed validation: {}", join(.0))]
    Invalid(Vec<Violation>),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("sentinel transforms require a positive discount")]
    InvalidDiscount,
    #[error("observation tables differ across environments")]
    NotPoMemdp,
    #[error("product state space exceeds {cap} states")]
    StateSpaceOverflow { cap: usize },
    #[error("transform record carries no sentinel")]
    NoSentinel,
    #[error("policy does not start with the sentinel step: {0}")]
    BadPolicy(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("vector set would grow to {size} (cap {cap})")]
    BlowupGuard { size: usize, cap: usize },
    #[error("horizon must be finite and at least 1")]
    BadHorizon,
    #[error("discount must be below 1")]
    BadDiscount,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("empty game: {0}")]
    EmptyGame(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("trace output: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("vector {0} has no recorded provenance")]
    MissingProvenance(usize),
    #[error("singular evaluation system")]
    SingularSystem,
    #[error("policy does not match the model: {0}")]
    Mismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid parameter {name}: {reason}")]
    Param { name: &'static str, reason: String },
    #[error("no distinct expert orderings after {0} attempts")]
    GenerationFailure(usize),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Umbrella error for callers that mix modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Format(#[from] FormatError),
}
