use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid direction: norm {norm} is not 1")]
    InvalidDirection { norm: f64 },

    #[error("invalid state: squared norm {norm_sqr} is not 1")]
    InvalidState { norm_sqr: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("p = {0} gives a product state; no second decomposition basis exists")]
    DegenerateEntanglement(f64),

    #[error("invalid guessing form: {0}")]
    InvalidForm(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("histogram cannot be fitted: {0}")]
    Unfittable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
