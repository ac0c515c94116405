use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not converge: error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },
    #[error("endpoint exponent {0} must be < 1 for integrability")]
    InvalidExponent(f64),
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("derivative of order {needed} required, function provides up to {available}")]
    MissingDerivative { needed: usize, available: usize },
    #[error("point outside the domain: {0}")]
    Domain(String),
    #[error("kernel blows up on the diagonal: 1 - x - y = {0:e}")]
    DiagonalBlowup(f64),
    #[error("non-finite integrand value at t = {0}")]
    NonFinite(f64),
    #[error("order fit is degenerate: {0}")]
    DegenerateFit(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
}
