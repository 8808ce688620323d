use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("duplicate entry at row {row}, column {col}")]
    DuplicateEntry { row: usize, col: usize },
    #[error("row {0} has no entries and can never be covered")]
    EmptyRow(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("oracle budget exceeded: {0}")]
    OracleScale(String),
    #[error("beta is below the optimum; refresh it")]
    StaleBeta,
    #[error("certificate failure: {0}")]
    Certificate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("backend divergence: {0}")]
    BackendDivergence(String),
    #[error("iteration budget exhausted: {0}")]
    NonTermination(String),
    #[error("generation error: {0}")]
    Generation(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) | Error::EmptyRow(_) => 1,
            Error::OracleScale(_) => 3,
            Error::StaleBeta
            | Error::Certificate(_)
            | Error::BackendDivergence(_)
            | Error::NonTermination(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
