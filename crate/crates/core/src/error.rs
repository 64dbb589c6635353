use thiserror::Error;

/// Errors produced by tree, polynomial and network operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("tree is not binary")]
    NotBinary,

    #[error("tree has repeated leaf labels")]
    RepeatedLabels,

    #[error("invalid leaf triple: {0}")]
    InvalidTriple(String),

    #[error("leaf count {n} exceeds the enumeration limit {limit}")]
    LimitExceeded { n: usize, limit: usize },

    #[error("arity mismatch: expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("label sets differ: {0}")]
    LabelMismatch(String),

    #[error("variable index {index} out of range for {n} variables")]
    VariableOutOfRange { index: usize, n: usize },

    #[error("function is not representable on the tree")]
    NotRepresentable,

    #[error("inconsistent function space: {0}")]
    InconsistentSpace(String),

    #[error("constraint violated for triple ({i}, {j}; outsider {l})")]
    ConstraintViolated { i: usize, j: usize, l: usize },

    #[error("no base point found where the non-vanishing condition holds")]
    NonVanishingFailed,

    #[error("decomposition failed at {stage}")]
    DecompositionFailed { stage: String },

    #[error("target is not a polynomial in the given inner polynomial")]
    NoComposition,

    #[error("term budget of {budget} exceeded (estimated {estimated} terms)")]
    TermBudget { budget: usize, estimated: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable snake-case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::InvalidTree(_) => "invalid_tree",
            Error::NotBinary => "not_binary",
            Error::RepeatedLabels => "repeated_labels",
            Error::InvalidTriple(_) => "invalid_triple",
            Error::LimitExceeded { .. } => "limit_exceeded",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::LabelMismatch(_) => "label_mismatch",
            Error::VariableOutOfRange { .. } => "variable_out_of_range",
            Error::NotRepresentable => "not_representable",
            Error::InconsistentSpace(_) => "inconsistent_space",
            Error::ConstraintViolated { .. } => "constraint_violated",
            Error::NonVanishingFailed => "non_vanishing_failed",
            Error::DecompositionFailed { .. } => "decomposition_failed",
            Error::NoComposition => "no_composition",
            Error::TermBudget { .. } => "term_budget",
            Error::InvalidNetwork(_) => "invalid_network",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
