use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: no edges found")]
    EmptyInput,

    #[error("line {line}: unknown node `{token}`")]
    UnknownNode { line: usize, token: String },

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("empty edge set; gaps undefined")]
    EmptyEdgeSet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible recipe: {0}")]
    Infeasible(String),

    #[error("unreachable correlation {target}: max achievable |rho| is {max_abs}")]
    UnreachableCorrelation { target: f64, max_abs: f64 },

    #[error("no convergence after {iterations} iterations; last Rayleigh quotients [{lower}, {upper}]")]
    NoConvergence { iterations: usize, lower: f64, upper: f64 },

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure rather than of the input data.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Inconsistent(_))
    }
}
