use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the crate.
///
/// Variants split into two families: input validation (malformed frames,
/// masses, networks, scenarios) and inference failures (queries that are
/// well formed but cannot be answered). [`Error::is_validation`] tells them
/// apart for exit-code mapping.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("frame must contain at least one element")]
    EmptyFrame,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("empty label")]
    EmptyLabel,
    #[error("nonzero mass {0} assigned to the empty set")]
    EmptySetMass(f64),
    #[error("mass {mass} for focal set {{{set}}} is outside [0, 1]")]
    MassOutOfRange { set: String, mass: f64 },
    #[error("masses sum to {sum}, expected 1")]
    MassSumMismatch { sum: f64 },
    #[error("element `{0}` is not in the frame")]
    UnknownElement(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid logarithm base {0}")]
    InvalidBase(f64),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{variable}` has no outcome `{outcome}`")]
    UnknownOutcome { variable: String, outcome: String },
    #[error("variable `{0}` must declare at least two outcomes")]
    TooFewOutcomes(String),
    #[error("parent graph contains a cycle through `{0}`")]
    CyclicGraph(String),
    #[error("conditional table for `{variable}` is missing the row {row}")]
    MissingCptRow { variable: String, row: String },
    #[error("conditional table for `{variable}` has an invalid row {row}: {reason}")]
    InvalidCptRow {
        variable: String,
        row: String,
        reason: String,
    },
    #[error("assignment is missing variable `{0}`")]
    IncompleteAssignment(String),
    #[error("query variable `{0}` also appears in the evidence")]
    QueryInEvidence(String),
    #[error("evidence has zero probability")]
    InconsistentEvidence,

    #[error("variable `{0}` is not binary")]
    NonBinaryVariable(String),
    #[error("interference degree {0} is outside [-1, 1]")]
    DegreeOutOfRange(f64),
    #[error("interference drives every outcome to a nonpositive mass")]
    NegativeUnnormalizedMass,
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
    #[error("belief distance is singular for ({alpha}, {beta})")]
    SingularDenominator { alpha: f64, beta: f64 },

    #[error("probability `{field}` = {value} is outside [0, 1]")]
    InvalidProbability { field: String, value: f64 },
    #[error("observed probability is zero")]
    ZeroObserved,
    #[error("scenario `{0}` has no conditional probabilities")]
    MissingConditionals(String),
    #[error("empty scenario list")]
    NoScenarios,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// `true` for malformed input, `false` for failures of inference on
    /// otherwise valid input.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::InconsistentEvidence
                | Error::NegativeUnnormalizedMass
                | Error::UnsupportedStructure(_)
                | Error::SingularDenominator { .. }
                | Error::QueryInEvidence(_)
                | Error::ZeroObserved
                | Error::MissingConditionals(_)
        )
    }
}
