use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("density must be positive, got rho = {0}")]
    NonPositiveDensity(f64),
    #[error("lambda + 2 mu must be positive for a real wave speed, got {0}")]
    NonHyperbolic(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("spacetime point must have finite coordinates and t >= 0, got t = {t}")]
    InvalidPoint { t: f64 },
    #[error("superposition needs at least one term")]
    EmptySuperposition,
    #[error("quadrature did not converge: value {value}, error estimate {error_estimate}")]
    NoConvergence { value: f64, error_estimate: f64 },
    #[error("time step {dt} exceeds the CFL bound {max_dt}")]
    CflViolation { dt: f64, max_dt: f64 },
    #[error("initial data not negligible near the boundary: {0}")]
    SupportViolation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
