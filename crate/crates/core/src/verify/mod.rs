//! Independent checks of the exact solution: finite-difference residuals of
//! the full elastic system, the chain of identities that reduces it to
//! per-axis wave equations, and a leapfrog grid solver used as an oracle.

mod compare;
mod identity;
mod oracle;
mod residual;

pub use compare::{compare, ComparisonReport, ExactSampler, GridSolver, LeapfrogOracle, LevelError};
pub use identity::{identity_suite, Identity, IdentityCheck, IdentityReport};
pub use oracle::{oracle_solve, sample_model, Boundary, GridField, GridSpec, OracleOptions, OracleRun};
pub use residual::{residual, residual_report, residual_study, ResidualReport, ResidualStudy};

use crate::domain::SpacetimePoint;
use crate::sampling::halton_spacetime;
use crate::domain::Point3;

/// Quasi-random spacetime points in `[t_lo, t_hi] x [lo, hi]`.
pub fn spacetime_samples(lo: Point3, hi: Point3, t_lo: f64, t_hi: f64, count: usize, offset: u64) -> Vec<SpacetimePoint> {
    halton_spacetime(lo, hi, t_lo, t_hi, count, offset)
        .into_iter()
        .map(|(t, x)| SpacetimePoint { t, x })
        .collect()
}
