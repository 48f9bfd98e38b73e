use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {requested} qubits requested, limit is {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("partial trace must keep at least one qubit")]
    EmptyKeepSet,

    #[error("conditional output undefined: total accept probability is zero")]
    ZeroAcceptance,

    #[error("protocol spec error at `{path}`: {message}")]
    Spec { path: String, message: String },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
}
