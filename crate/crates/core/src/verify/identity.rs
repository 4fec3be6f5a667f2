use std::cell::RefCell;
use std::fmt;

use rayon::prelude::*;

use crate::admissible::ProblemData;
use crate::domain::{Axis, Material, SpacetimePoint};
use crate::error::{Error, Result};
use crate::fields::fd;
use crate::report::KeyValues;
use crate::solver::DisplacementModel;

/// The chain of identities that turns the elastic system into three
/// decoupled wave equations when the data are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `d u_i / d x_j = d u_j / d x_i`
    CrossSymmetry,
    /// `d u_1 / d x_1 = d u_2 / d x_2 = d u_3 / d x_3`
    EqualDiagonal,
    /// `div u = 3 d u_1 / d x_1`
    DivergenceTrace,
    /// `d^2 u_k / d x_1^2 = d^2 u_k / d x_2^2 = d^2 u_k / d x_3^2`
    EqualSecondDerivatives,
    /// `Lap u_k = 3 d^2 u_k / d x_1^2`
    Laplacian,
    /// `d^2 u_k / d t^2 = a^2 d^2 u_k / d x_k^2 + F_k`
    ReducedWave,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::CrossSymmetry,
        Identity::EqualDiagonal,
        Identity::DivergenceTrace,
        Identity::EqualSecondDerivatives,
        Identity::Laplacian,
        Identity::ReducedWave,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Identity::CrossSymmetry => "cross_symmetry",
            Identity::EqualDiagonal => "equal_diagonal",
            Identity::DivergenceTrace => "divergence_trace",
            Identity::EqualSecondDerivatives => "equal_second_derivatives",
            Identity::Laplacian => "laplacian",
            Identity::ReducedWave => "reduced_wave",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub max_violation: f64,
    pub worst: Option<SpacetimePoint>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub sample_count: usize,
    pub tol: f64,
    pub step: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, identity: Identity) -> &IdentityCheck {
        self.checks
            .iter()
            .find(|c| c.identity == identity)
            .expect("every identity is checked")
    }
}

/// Violations of each identity at one point, in `Identity::ALL` order.
fn violations<M: DisplacementModel + ?Sized>(
    model: &M,
    data: &ProblemData,
    m: &Material,
    p: SpacetimePoint,
    h: f64,
) -> Result<[f64; 6]> {
    let g = model.space_gradient(p)?;
    let fault = RefCell::new(None::<Error>);
    let guard = |r: Result<[f64; 3]>| match r {
        Ok(v) => v,
        Err(e) => {
            fault.borrow_mut().get_or_insert(e);
            [f64::NAN; 3]
        }
    };

    let mut cross = 0.0f64;
    let mut diag = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                cross = cross.max((g[i][j] - g[j][i]).abs());
            }
            diag = diag.max((g[i][i] - g[j][j]).abs());
        }
    }
    let trace = g[0][0] + g[1][1] + g[2][2];
    let div = (trace - 3.0 * g[0][0]).abs();

    // second[j][k] = d^2 u_k / d x_j^2, from differences of the gradient
    let mut second = [[0.0; 3]; 3];
    for ax in Axis::ALL {
        let j = ax.index();
        let column = fd::first_derivative(
            |s| {
                guard(model.space_gradient(p.shifted_space(ax, s)).map(|g| [g[0][j], g[1][j], g[2][j]]))
            },
            0.0,
            h,
        );
        second[j] = column;
    }
    let accel = fd::first_derivative(|s| guard(model.velocity(p.shifted_time(s))), 0.0, h);
    if let Some(e) = fault.into_inner() {
        return Err(e);
    }

    let mut equal_second = 0.0f64;
    let mut laplacian = 0.0f64;
    let mut wave = 0.0f64;
    let a2 = m.wave_speed() * m.wave_speed();
    let force = data.forcing.value(p.t, p.x);
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                equal_second = equal_second.max((second[i][k] - second[j][k]).abs());
            }
        }
        let lap = second[0][k] + second[1][k] + second[2][k];
        laplacian = laplacian.max((lap - 3.0 * second[0][k]).abs());
        wave = wave.max((accel[k] - a2 * second[k][k] - force[k]).abs());
    }
    Ok([cross, diag, div, equal_second, laplacian, wave])
}

/// Checks every identity at `points`, differentiating `space_gradient` and
/// `velocity` with step `h` (Richardson-extrapolated central differences).
pub fn identity_suite<M: DisplacementModel + ?Sized>(
    model: &M,
    data: &ProblemData,
    m: &Material,
    points: &[SpacetimePoint],
    h: f64,
    tol: f64,
) -> Result<IdentityReport> {
    if !(h > 0.0) || !(tol > 0.0) {
        return Err(Error::Precondition(format!("step and tolerance must be positive (h = {h}, tol = {tol})")));
    }
    if let Some(p) = points.iter().find(|p| p.t < h) {
        return Err(Error::Precondition(format!(
            "identity checks need t >= h for time differences (t = {}, h = {h})",
            p.t
        )));
    }
    let per_point = points
        .par_iter()
        .map(|&p| violations(model, data, m, p, h))
        .collect::<Result<Vec<_>>>()?;
    let checks = Identity::ALL
        .iter()
        .enumerate()
        .map(|(n, &identity)| {
            let mut worst = None;
            let mut max = 0.0f64;
            for (p, v) in points.iter().zip(&per_point) {
                if v[n] > max || v[n].is_nan() {
                    max = v[n];
                    worst = Some(*p);
                    if v[n].is_nan() {
                        break;
                    }
                }
            }
            IdentityCheck {
                identity,
                max_violation: max,
                worst,
                passed: max <= tol,
            }
        })
        .collect();
    Ok(IdentityReport {
        checks,
        sample_count: points.len(),
        tol,
        step: h,
    })
}

impl KeyValues for IdentityReport {
    fn key_values(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = self
            .checks
            .iter()
            .map(|c| (c.identity.key().to_string(), format!("{:e}", c.max_violation)))
            .collect();
        kv.push(("identity_samples".into(), self.sample_count.to_string()));
        kv.push(("identity_pass".into(), self.passed().to_string()));
        kv
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "identities ({} points, tol {:e}, step {:e})", self.sample_count, self.tol, self.step)?;
        for c in &self.checks {
            let mark = if c.passed { "ok" } else { "FAIL" };
            write!(f, "  {:<26} {:.3e}  {mark}", c.identity.key(), c.max_violation)?;
            if let (false, Some(p)) = (c.passed, c.worst) {
                write!(f, "  at t={} x=({}, {}, {})", p.t, p.x[0], p.x[1], p.x[2])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
