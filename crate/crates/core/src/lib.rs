//! Exact solutions of the Cauchy problem of linear isotropic elastodynamics
//!
//! ```text
//! mu Lap U + (lambda + mu) grad div U + rho F = rho d^2 U / dt^2,   x in R^3, t >= 0
//! U(0, x) = phi(x),   dU/dt(0, x) = psi(x)
//! ```
//!
//! for initial data and forcing that are curl-free with equal diagonal
//! derivatives. For such data every displacement component obeys a
//! one-dimensional wave equation along its own axis with speed
//! `a = sqrt(3 (lambda + 2 mu) / rho)`, and d'Alembert's formula gives the
//! solution in closed form up to one- and two-dimensional quadratures.
//!
//! Modules:
//! - [`domain`]: material constants, spacetime points, tolerances
//! - [`fields`]: analytic fields with exact or finite-difference derivatives
//! - [`admissible`]: ridge-data constructors and the admissibility validator
//! - [`solver`]: d'Alembert evaluation of displacement, velocity and gradient
//! - [`stress`]: isotropic stress tensor of the exact solution
//! - [`verify`]: residuals of the full system, identity checks and a
//!   leapfrog grid oracle with convergence studies

pub mod admissible;
pub mod domain;
pub mod error;
pub mod fields;
pub mod report;
pub mod sampling;
pub mod solver;
pub mod stress;
pub mod verify;

pub use admissible::{ProblemData, Provenance, RidgeDirection};
pub use domain::{Axis, Mat3, Material, Point3, SpacetimePoint, Tolerances, Vec3};
pub use error::{Error, Result};
pub use solver::{DalembertSolution, DisplacementModel, QuadratureSpec, SolverSpec};
