use std::fmt;

use super::VectorField3;
use crate::domain::{Mat3, Point3, Vec3};

/// The 26 face, edge and corner directions of a cube, normalized.
pub const DECAY_DIRECTIONS: usize = 26;

fn directions() -> Vec<Vec3> {
    let mut out = Vec::with_capacity(DECAY_DIRECTIONS);
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            for k in -1i32..=1 {
                if (i, j, k) == (0, 0, 0) {
                    continue;
                }
                let n = ((i * i + j * j + k * k) as f64).sqrt();
                out.push([i as f64 / n, j as f64 / n, k as f64 / n]);
            }
        }
    }
    out
}

/// Sampled decay of a field and its first derivatives on spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    /// Largest `|v|` over the sampled directions, per radius.
    pub max_value: Vec<f64>,
    /// Largest absolute Jacobian entry over the sampled directions, per radius.
    pub max_derivative: Vec<f64>,
    pub tol: f64,
    pub values_decay: bool,
    pub derivatives_decay: bool,
    pub failures: Vec<String>,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.values_decay && self.derivatives_decay && self.failures.is_empty()
    }
}

impl fmt::Display for DecayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.radii.iter().enumerate() {
            writeln!(
                f,
                "  r = {r:<8} max|v| = {:.3e}  max|dv| = {:.3e}",
                self.max_value[i], self.max_derivative[i]
            )?;
        }
        for msg in &self.failures {
            writeln!(f, "  ! {msg}")?;
        }
        Ok(())
    }
}

/// Checks that `v` and its Jacobian shrink across the given radii and are
/// below `tol` on the outermost sphere.
pub fn check_decay(v: &VectorField3, radii: &[f64], tol: f64, fd_step: f64) -> DecayReport {
    check_decay_with(|x| (v.value(x), v.jacobian(x, fd_step)), radii, tol)
}

/// [`check_decay`] for any field given as a `(value, jacobian)` sampler.
pub fn check_decay_with(
    sample: impl Fn(Point3) -> (Vec3, Mat3),
    radii: &[f64],
    tol: f64,
) -> DecayReport {
    let mut failures = Vec::new();
    if radii.is_empty() || radii.windows(2).any(|w| !(w[0] < w[1])) {
        failures.push("radii must be non-empty and strictly increasing".to_string());
    }

    let dirs = directions();
    let mut max_value = Vec::with_capacity(radii.len());
    let mut max_derivative = Vec::with_capacity(radii.len());
    for &r in radii {
        let (mut mv, mut md) = (0.0f64, 0.0f64);
        for d in &dirs {
            let (val, jac) = sample([r * d[0], r * d[1], r * d[2]]);
            mv = mv.max(crate::domain::norm(val));
            md = jac.iter().flatten().fold(md, |acc, e| acc.max(e.abs()));
        }
        max_value.push(mv);
        max_derivative.push(md);
    }

    let mut verdict = |series: &[f64], what: &str| {
        let mut ok = true;
        if let Some(&last) = series.last() {
            if !(last < tol) {
                failures.push(format!(
                    "{what} at outermost radius is {last:.3e}, not below {tol:.3e}"
                ));
                ok = false;
            }
        }
        if series.windows(2).any(|w| w[1] > w[0]) {
            failures.push(format!("{what} increases with radius"));
            ok = false;
        }
        ok
    };
    let values_decay = verdict(&max_value, "max |v|");
    let derivatives_decay = verdict(&max_derivative, "max |dv/dx|");

    DecayReport {
        radii: radii.to_vec(),
        max_value,
        max_derivative,
        tol,
        values_decay,
        derivatives_decay,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ScalarField3;

    #[test]
    fn twenty_six_unit_directions() {
        let d = directions();
        assert_eq!(d.len(), DECAY_DIRECTIONS);
        for v in d {
            assert!((crate::domain::norm(v) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn radial_gaussian_decays() {
        let g = |x: Point3| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
        let v = VectorField3::new(
            ScalarField3::from_fn(move |x| x[0] * g(x)),
            ScalarField3::from_fn(move |x| x[1] * g(x)),
            ScalarField3::from_fn(move |x| x[2] * g(x)),
        );
        let report = check_decay(&v, &[5.0, 10.0, 20.0], 1e-6, 1e-4);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn constant_field_does_not_decay() {
        let c = ScalarField3::from_fn(|_| 1.0);
        let v = VectorField3::new(c, ScalarField3::zero(), ScalarField3::zero());
        let report = check_decay(&v, &[5.0, 10.0, 20.0], 1e-6, 1e-4);
        assert!(!report.passed());
        assert!(!report.values_decay);
        assert!(report.derivatives_decay);
    }

    #[test]
    fn zero_field_passes() {
        let report = check_decay(&VectorField3::zero(), &[5.0, 10.0, 20.0], 1e-6, 1e-4);
        assert!(report.passed());
        assert_eq!(report.max_value, vec![0.0; 3]);
    }

    #[test]
    fn bad_radii_reported() {
        let report = check_decay(&VectorField3::zero(), &[10.0, 5.0], 1e-6, 1e-4);
        assert!(!report.passed());
    }
}
