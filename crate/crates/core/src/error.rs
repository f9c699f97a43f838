use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("algebra mode violation: {0}")]
    Mode(String),
    #[error("{routine} did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence {
        routine: &'static str,
        sweeps: usize,
        residual: f64,
    },
    #[error("invalid state: {0}")]
    State(String),
    #[error("dual projection left residual {residual:e} above {threshold:e}")]
    Infeasible { residual: f64, threshold: f64 },
    #[error("primal element has vanishing seminorm but pairs to {pairing:e} with the state difference")]
    UnboundedDirection { pairing: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
