use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid coefficient vector: {0}")]
    InvalidCoefficients(String),

    #[error("base sequence overflows 128-bit integers at index {index}")]
    Overflow { index: usize },

    #[error("{what} {value} outside precomputed range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: String,
        limit: String,
    },

    #[error("root refinement did not converge after {iterations} iterations")]
    RootNotConverged { iterations: usize },

    #[error("digit string {0} is not admissible")]
    Inadmissible(String),

    #[error(
        "system {coeffs} is rejected: the Monna map image is not a dense subset of [0,1); \
         accepted forms are (a0,...,a0), (a0,a0-1,...,a0-1,a0), (a0,...,a0,a0+1) \
         and (a',...,a',a'') with a' = (a0,...,a0,a0-1), a'' = (a0,...,a0) \
         or a' = (a0,a0-1,...,a0-1), a'' = (a0,a0-1,...,a0-1,a0)"
    )]
    NotUnitIntervalOrNotDense { coeffs: String },

    #[error("system {coeffs} is outside the product hypotheses (coefficients must all equal one integer b)")]
    OutsideProductHypotheses { coeffs: String },

    #[error("incompatible systems {first} and {second}: {reason}")]
    Incompatible {
        first: String,
        second: String,
        reason: String,
    },

    #[error("work estimate {work} exceeds budget {budget} for {method}")]
    BudgetExceeded {
        method: &'static str,
        work: u128,
        budget: u128,
    },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown test function '{0}'")]
    UnknownFunction(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics themselves rather than of the input.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, Error::RootNotConverged { .. } | Error::Overflow { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
