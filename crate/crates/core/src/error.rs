//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdError {
    #[error("non-finite entry at index {index}")]
    NonFiniteEntry { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid step: gamma must be > 0, got {gamma}")]
    InvalidStep { gamma: f64 },

    #[error("invalid set: {reason}")]
    InvalidSet { reason: String },

    #[error("invalid parameter: {reason}")]
    InvalidParameter { reason: String },

    #[error("unsupported structure: {reason}")]
    UnsupportedStructure { reason: String },

    #[error("step-size guard violated: {inequality}")]
    GuardViolation { inequality: String },

    #[error("singular subproblem: {reason}")]
    SingularSubproblem { reason: String },

    #[error("divergence detected: {reason}")]
    Divergence { reason: String },

    #[error("invalid instance: {reason}")]
    InvalidInstance { reason: String },

    #[error("label {label} out of range (|L| = {num_labels})")]
    LabelOutOfRange { label: usize, num_labels: usize },

    #[error("instance too large: {reason}")]
    TooLarge { reason: String },

    #[error("subgraph is not a tree: {reason}")]
    NotATree { reason: String },

    #[error("decomposition strategy not applicable: {reason}")]
    StrategyError { reason: String },

    #[error("model is not binary submodular: {reason}")]
    NotSubmodular { reason: String },

    #[error("self-loop edge {p} -> {p} rejected")]
    SelfLoop { p: usize },

    #[error("vertex {v} out of range (count {count})")]
    VertexOutOfRange { v: usize, count: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PdError>;
