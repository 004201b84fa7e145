use thiserror::Error;

/// Errors raised by the analysis routines.
///
/// Indices carried by variants are 1-based, matching every report the
/// toolkit produces.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix of order {order} needs {expected} entries, got {actual}")]
    Shape {
        order: usize,
        expected: usize,
        actual: usize,
    },

    #[error("matrix order must be at least 1")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is {rows} x {cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("index {index} out of range 1..={order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("zero diagonal entry in row {row}")]
    SingularDiagonal { row: usize },

    #[error("matrix is singular: pivot in column {column} is below the relative threshold")]
    Singular { column: usize },

    #[error("principal block on {alpha:?} is singular")]
    SingularBlock { alpha: Vec<usize> },

    #[error("invalid alpha: {0}")]
    InvalidAlpha(String),

    #[error("invalid witness set: {0}")]
    InvalidWitness(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A hypothesis of the requested bound does not hold for this input.
    #[error("hypothesis unmet: {0}")]
    Hypothesis(String),

    /// The bound is defined but has nothing to range over for this input.
    #[error("bound unavailable: {0}")]
    Unavailable(String),

    #[error("order {order} exceeds the limit {limit} for {operation}")]
    SizeLimit {
        operation: &'static str,
        order: usize,
        limit: usize,
    },

    #[error("matrix generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by an input that fails a class or bound
    /// hypothesis, as opposed to malformed input or I/O failures.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::SingularDiagonal { .. }
                | Error::Singular { .. }
                | Error::SingularBlock { .. }
                | Error::InvalidAlpha(_)
                | Error::InvalidWitness(_)
                | Error::InvalidParameter(_)
                | Error::Hypothesis(_)
                | Error::Unavailable(_)
                | Error::SizeLimit { .. }
                | Error::GenerationFailed { .. }
        )
    }
}

impl Error {
    /// Stable kebab-case name of the variant, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Shape { .. } => "shape",
            Error::EmptyMatrix => "empty-matrix",
            Error::NonFinite { .. } => "non-finite",
            Error::NotSquare { .. } => "not-square",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::SingularDiagonal { .. } => "singular-diagonal",
            Error::Singular { .. } => "singular",
            Error::SingularBlock { .. } => "singular-block",
            Error::InvalidAlpha(_) => "invalid-alpha",
            Error::InvalidWitness(_) => "invalid-witness",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Hypothesis(_) => "hypothesis",
            Error::Unavailable(_) => "unavailable",
            Error::SizeLimit { .. } => "size-limit",
            Error::GenerationFailed { .. } => "generation-failed",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
