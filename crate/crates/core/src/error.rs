use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} = {got} exceeds the limit {max}")]
    Capacity { what: &'static str, got: usize, max: usize },

    #[error("refinement did not converge by n = {n}: last iterates {prev:.17e} and {last:.17e}")]
    Refinement { n: usize, prev: f64, last: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("non-finite state at step {step}: {msg}")]
    Divergence { step: usize, msg: String },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
