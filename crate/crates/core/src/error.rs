use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scenario parameter broke its invariant.
    #[error("invalid parameter {field} = {value}: must satisfy {constraint}")]
    InvalidParam {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("cannot express non-positive linear power {0} in dB")]
    NonPositiveLinear(f64),

    /// Argument outside the mathematical domain of an operation.
    #[error("{op}: argument {value} outside domain ({constraint})")]
    Domain {
        op: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// An iteration did not reach tolerance. Indicates a bug, not bad input.
    #[error("{op}: no convergence after {iterations} iterations (last step {last_step:e})")]
    Convergence {
        op: &'static str,
        iterations: usize,
        last_step: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("malformed table: {0}")]
    Table(String),
}
