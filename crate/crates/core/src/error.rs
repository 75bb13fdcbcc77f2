use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),
    #[error("symbol {symbol} has an empty {axis} in the transition matrix")]
    EmptyRowOrColumn { symbol: usize, axis: &'static str },
    #[error("transition matrix is not primitive (no positive power up to {checked})")]
    NotPrimitive { checked: usize },
    #[error("enumeration of {requested} words exceeds the budget of {limit}")]
    BudgetExceeded { requested: u128, limit: u128 },
    #[error("missing value for admissible word {word}")]
    MissingValue { word: String },
    #[error("word {word} is not admissible")]
    NotAdmissible { word: String },
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("eigen-iteration did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("models are defined on different subshifts")]
    SpecMismatch,
    #[error("the two models define the same measure")]
    IdenticalModels,
    #[error("log-likelihood direction is cohomologous to a constant (range {lower}..{upper} collapsed)")]
    DegeneratePair { lower: f64, upper: f64 },
    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),
    #[error("prior ({0}, {1}) lies on the boundary of the simplex")]
    DegeneratePrior(f64, f64),
    #[error("word has length {got}, test expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid character {ch:?} at position {position}")]
    InvalidCharacter { position: usize, ch: char },
    #[error("empty input")]
    EmptyInput,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status for this error: 1 validation, 2 budget, 3 numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::BudgetExceeded { .. } => 2,
            Error::ConvergenceFailure { .. }
            | Error::RootNotBracketed(_)
            | Error::NotStronglyConnected => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
