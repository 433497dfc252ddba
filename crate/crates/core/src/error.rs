use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite value at node {node} (x = {x}) after step {step} (t = {time})")]
    BlowUp {
        step: usize,
        node: usize,
        x: f64,
        time: f64,
    },

    #[error("CFL violation: dt * max|f'(u)| = {courant_length} exceeds dx = {dx}")]
    Cfl { courant_length: f64, dx: f64 },

    #[error("quadrature did not converge at u = {at}")]
    Quadrature { at: f64 },

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("reference check failed: {0}")]
    Reference(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
