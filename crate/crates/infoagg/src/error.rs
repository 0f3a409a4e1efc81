//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// The aggregation operations themselves can only fail with
/// [`Error::EmptySupport`], [`Error::PopulationMismatch`], or
/// [`Error::NotFullSupport`]; the remaining variants come from value
/// construction, model wiring, and file parsing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("population must contain at least one unit")]
    EmptyPopulation,

    #[error("duplicate unit label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown unit `{0}`")]
    UnknownUnit(String),

    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("log-weight at index {index} is {value}; entries must be finite or -inf")]
    NonFiniteLogWeight { index: usize, value: f64 },

    #[error("normalization constant is zero: no outcome has positive mass")]
    EmptySupport,

    #[error("operands are defined over different populations")]
    PopulationMismatch,

    #[error("operation requires full support, but some unit has zero probability")]
    NotFullSupport,

    #[error("grid densities must share the same bounds and point count")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("variance must be strictly positive and finite, got {0}")]
    InvalidVariance(f64),

    #[error("mean must be finite, got {0}")]
    InvalidMean(f64),

    #[error("temperature must be strictly positive and finite, got {0}")]
    InvalidTemperature(f64),

    #[error("unit set must contain at least one member")]
    EmptyUnitSet,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("unknown value `{value}` for variable `{variable}`")]
    UnknownValue { variable: String, value: String },

    #[error("model is invalid: {0}")]
    InvalidModel(String),

    #[error("query is invalid: {0}")]
    InvalidQuery(String),

    #[error("evidence has zero likelihood at the requested unit")]
    ZeroEvidenceLikelihood,

    #[error("query enumerates {atoms} noise atoms, exceeding the budget of {budget}")]
    QueryTooLarge { atoms: u128, budget: u128 },

    #[error("unknown context `{0}`")]
    UnknownContext(String),

    #[error("invalid reward table: {0}")]
    InvalidRewards(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("probabilities sum to {sum}, outside the accepted tolerance")]
    SumOutOfTolerance { sum: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyPopulation => "empty_population",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::UnknownUnit(_) => "unknown_unit",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NonFiniteLogWeight { .. } => "non_finite_log_weight",
            Error::EmptySupport => "empty_support",
            Error::PopulationMismatch => "population_mismatch",
            Error::NotFullSupport => "not_full_support",
            Error::GridMismatch => "grid_mismatch",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidVariance(_) => "invalid_variance",
            Error::InvalidMean(_) => "invalid_mean",
            Error::InvalidTemperature(_) => "invalid_temperature",
            Error::EmptyUnitSet => "empty_unit_set",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::UnknownValue { .. } => "unknown_value",
            Error::InvalidModel(_) => "invalid_model",
            Error::InvalidQuery(_) => "invalid_query",
            Error::ZeroEvidenceLikelihood => "zero_evidence_likelihood",
            Error::QueryTooLarge { .. } => "query_too_large",
            Error::UnknownContext(_) => "unknown_context",
            Error::InvalidRewards(_) => "invalid_rewards",
            Error::InvalidProbabilities(_) => "invalid_probabilities",
            Error::SumOutOfTolerance { .. } => "sum_out_of_tolerance",
            Error::Parse(_) => "parse",
        }
    }

    /// True for failures of the mathematics (nonexistent normalization
    /// constant or missing inverse), as opposed to bad input.
    pub fn is_mathematical(&self) -> bool {
        matches!(self, Error::EmptySupport | Error::NotFullSupport)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
