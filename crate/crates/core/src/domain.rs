//! Material constants, spacetime points and numeric tolerances shared by
//! every other module.

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];
pub type Vec3 = [f64; 3];
/// Row-major 3x3 matrix; `m[i][j]` is row `i`, column `j`.
pub type Mat3 = [[f64; 3]; 3];

/// Spatial coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    /// Zero-based lookup.
    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }

    /// One-based lookup, matching the `x1, x2, x3` naming.
    pub fn from_number(n: usize) -> Option<Axis> {
        n.checked_sub(1).and_then(Axis::from_index)
    }

    pub fn unit(self) -> Vec3 {
        let mut e = [0.0; 3];
        e[self.index()] = 1.0;
        e
    }
}

/// Isotropic homogeneous material.
///
/// The derived speed `a = sqrt(3 (lambda + 2 mu) / rho)` governs the
/// per-component wave equations that the exact solution satisfies along
/// each coordinate axis. It is `sqrt(3)` times the P-wave speed of the full
/// elastic system, see [`Material::p_wave_speed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    rho: f64,
    lambda: f64,
    mu: f64,
    a: f64,
}

impl Material {
    pub fn new(rho: f64, lambda: f64, mu: f64) -> Result<Material> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::NonPositiveDensity(rho));
        }
        let stiffness = lambda + 2.0 * mu;
        if !(stiffness > 0.0) || !stiffness.is_finite() {
            return Err(Error::NonHyperbolic(stiffness));
        }
        let a = (3.0 * stiffness / rho).sqrt();
        Ok(Material { rho, lambda, mu, a })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Characteristic speed of the reduced per-axis wave equations.
    pub fn wave_speed(&self) -> f64 {
        self.a
    }

    /// `sqrt((lambda + 2 mu) / rho)`, the fastest speed of the full system.
    pub fn p_wave_speed(&self) -> f64 {
        ((self.lambda + 2.0 * self.mu) / self.rho).sqrt()
    }
}

/// A point `(t, x1, x2, x3)` of the half-space `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: Point3,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: Point3) -> Result<SpacetimePoint> {
        if !(t >= 0.0) || !t.is_finite() || x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint { t });
        }
        Ok(SpacetimePoint { t, x })
    }

    pub fn at_origin(t: f64) -> Result<SpacetimePoint> {
        SpacetimePoint::new(t, [0.0; 3])
    }

    pub fn shifted_space(&self, axis: Axis, d: f64) -> SpacetimePoint {
        let mut x = self.x;
        x[axis.index()] += d;
        SpacetimePoint { t: self.t, x }
    }

    pub fn shifted_time(&self, d: f64) -> SpacetimePoint {
        SpacetimePoint { t: self.t + d, x: self.x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance of the adaptive quadrature.
    pub quad_rel: f64,
    /// Step of the finite-difference derivative fallback.
    pub fd_step: f64,
    /// Threshold applied to invariant and admissibility residuals.
    pub check_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quad_rel: 1e-10,
            fd_step: 1e-4,
            check_tol: 1e-6,
        }
    }
}

impl Tolerances {
    /// Default tolerances with the finite-difference step scaled to a
    /// characteristic length of the data.
    pub fn for_length_scale(length: f64) -> Result<Tolerances> {
        Tolerances {
            fd_step: 1e-4 * length,
            ..Tolerances::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Tolerances> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        };
        positive("quad_rel", self.quad_rel)?;
        positive("fd_step", self.fd_step)?;
        positive("check_tol", self.check_tol)?;
        if self.quad_rel >= 1.0 {
            return Err(Error::InvalidParameter {
                name: "quad_rel",
                reason: format!("must be below 1, got {}", self.quad_rel),
            });
        }
        Ok(self)
    }
}

pub(crate) fn norm(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
