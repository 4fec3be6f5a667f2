//! Isotropic stress of the exact solution,
//! `tau_ij = lambda delta_ij div U + mu (d u_i/dx_j + d u_j/dx_i)`.

use std::fmt;

use crate::admissible::ProblemData;
use crate::domain::{Mat3, Material, SpacetimePoint};
use crate::error::Result;
use crate::solver::{DalembertSolution, DisplacementModel, SolverSpec};

/// Symmetric stress tensor stored as its six independent entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressTensor {
    pub t11: f64,
    pub t22: f64,
    pub t33: f64,
    pub t12: f64,
    pub t13: f64,
    pub t23: f64,
    pub point: SpacetimePoint,
}

impl StressTensor {
    pub fn from_gradient(g: &Mat3, m: &Material, point: SpacetimePoint) -> Self {
        let div = g[0][0] + g[1][1] + g[2][2];
        let (lambda, mu) = (m.lambda(), m.mu());
        let diag = |i: usize| lambda * div + 2.0 * mu * g[i][i];
        let off = |i: usize, j: usize| mu * (g[i][j] + g[j][i]);
        StressTensor {
            t11: diag(0),
            t22: diag(1),
            t33: diag(2),
            t12: off(0, 1),
            t13: off(0, 2),
            t23: off(1, 2),
            point,
        }
    }

    /// Entry `(i, j)`, zero-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.t11,
            (1, 1) => self.t22,
            (2, 2) => self.t33,
            (0, 1) => self.t12,
            (0, 2) => self.t13,
            (1, 2) => self.t23,
            _ => panic!("stress index ({i}, {j}) out of range"),
        }
    }

    pub fn matrix(&self) -> Mat3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.get(i, j)))
    }

    /// `[t11, t22, t33, t12, t13, t23]`.
    pub fn voigt(&self) -> [f64; 6] {
        [self.t11, self.t22, self.t33, self.t12, self.t13, self.t23]
    }

    pub fn max_abs(&self) -> f64 {
        self.voigt().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl fmt::Display for StressTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..3 {
            writeln!(f, "[{:>13.6e} {:>13.6e} {:>13.6e}]", self.get(i, 0), self.get(i, 1), self.get(i, 2))?;
        }
        Ok(())
    }
}

/// Trace of the displacement gradient, and the alternative `3 d u_1/dx_1`
/// which coincides with it for admissible data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence {
    pub trace: f64,
    pub three_g11: f64,
}

impl Divergence {
    pub fn discrepancy(&self) -> f64 {
        (self.trace - self.three_g11).abs()
    }
}

pub fn divergence_of_model(model: &impl DisplacementModel, p: SpacetimePoint) -> Result<Divergence> {
    let g = model.space_gradient(p)?;
    Ok(Divergence {
        trace: g[0][0] + g[1][1] + g[2][2],
        three_g11: 3.0 * g[0][0],
    })
}

pub fn divergence(data: &ProblemData, m: &Material, p: SpacetimePoint, spec: &SolverSpec) -> Result<Divergence> {
    divergence_of_model(&DalembertSolution::new(data.clone(), *m, *spec), p)
}

pub fn stress_of_model(model: &impl DisplacementModel, m: &Material, p: SpacetimePoint) -> Result<StressTensor> {
    Ok(StressTensor::from_gradient(&model.space_gradient(p)?, m, p))
}

pub fn stress_tensor(data: &ProblemData, m: &Material, p: SpacetimePoint, spec: &SolverSpec) -> Result<StressTensor> {
    stress_of_model(&DalembertSolution::new(data.clone(), *m, *spec), m, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::{CatalogProfile, RidgeDirection};
    use crate::fields::{fd, TimeEnvelope};
    use crate::sampling::halton_box;
    use crate::domain::Axis;

    fn unit() -> Material {
        Material::new(1.0, 1.0, 1.0).unwrap()
    }

    fn gaussian_ridge(e: [i8; 3]) -> ProblemData {
        let prof = CatalogProfile::gaussian(1.0, 0.0).unwrap().into_profile();
        ProblemData::builder()
            .phi(1.0, &prof, RidgeDirection::new(e[0], e[1], e[2]).unwrap())
            .build()
    }

    fn rich_data() -> ProblemData {
        let p = |s| CatalogProfile::gaussian(s, 0.1).unwrap().into_profile();
        let d = |a, b, c| RidgeDirection::new(a, b, c).unwrap();
        ProblemData::builder()
            .phi(1.0, &p(1.0), d(1, 1, 1))
            .phi(0.4, &p(0.7), d(1, -1, 1))
            .psi(0.8, &p(1.1), d(1, 1, -1))
            .forcing(0.5, TimeEnvelope::cosine(2.0), &p(0.9), d(1, -1, -1))
            .build()
    }

    #[test]
    fn zero_data() {
        let p = SpacetimePoint::new(0.4, [0.1, 0.2, 0.3]).unwrap();
        let s = stress_tensor(&ProblemData::zero(), &unit(), p, &SolverSpec::default()).unwrap();
        assert_eq!(s.voigt(), [0.0; 6]);
        assert_eq!(divergence(&ProblemData::zero(), &unit(), p, &SolverSpec::default()).unwrap().trace, 0.0);
    }

    #[test]
    fn gaussian_ridge_at_origin() {
        let p = SpacetimePoint::at_origin(0.0).unwrap();
        let data = gaussian_ridge([1, 1, 1]);
        let div = divergence(&data, &unit(), p, &SolverSpec::default()).unwrap();
        assert_eq!(div.trace, -6.0);
        assert_eq!(div.discrepancy(), 0.0);
        let s = stress_tensor(&data, &unit(), p, &SolverSpec::default()).unwrap();
        assert!((s.t11 + 10.0).abs() < 1e-12);
        assert!((s.t12 + 4.0).abs() < 1e-12);
        assert_eq!(s.t11, s.t22);
        assert_eq!(s.t11, s.t33);
    }

    #[test]
    fn divergence_of_ridge_at_time_zero() {
        let data = gaussian_ridge([1, -1, 1]);
        let x = [0.4, -0.1, 0.2];
        let s: f64 = 0.4 + 0.1 + 0.2;
        let f2 = (4.0 * s * s - 2.0) * (-s * s).exp();
        let div = divergence(&data, &unit(), SpacetimePoint::new(0.0, x).unwrap(), &SolverSpec::default()).unwrap();
        assert!((div.trace - 3.0 * f2).abs() < 1e-14);
    }

    #[test]
    fn structural_symmetry_and_admissible_consequences() {
        let data = rich_data();
        let m = Material::new(2.0, 1.5, 0.6).unwrap();
        let spec = SolverSpec::default();
        let sol = DalembertSolution::new(data.clone(), m, spec);
        for (k, x) in halton_box([-2.0; 3], [2.0; 3], 15, 4).into_iter().enumerate() {
            let p = SpacetimePoint::new(0.03 * k as f64, x).unwrap();
            let s = stress_tensor(&data, &m, p, &spec).unwrap();
            let mat = s.matrix();
            let g = sol.space_gradient(p).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(mat[i][j], mat[j][i]);
                    if i != j {
                        assert!((mat[i][j] - 2.0 * m.mu() * g[i][j]).abs() < 1e-6);
                    }
                }
                assert!((mat[i][i] - mat[0][0]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn stress_from_fd_displacement_cross_check() {
        let data = rich_data();
        let m = unit();
        let sol = DalembertSolution::new(data.clone(), m, SolverSpec::default());
        let p = SpacetimePoint::new(0.35, [0.3, -0.2, 0.5]).unwrap();
        let mut g = [[0.0; 3]; 3];
        for j in Axis::ALL {
            let col = fd::first_derivative(
                |s| sol.displacement(p.shifted_space(j, s - p.x[j.index()])).unwrap().u,
                p.x[j.index()],
                1e-3,
            );
            for i in 0..3 {
                g[i][j.index()] = col[i];
            }
        }
        let from_fd = StressTensor::from_gradient(&g, &m, p);
        let exact = stress_tensor(&data, &m, p, &SolverSpec::default()).unwrap();
        for (a, b) in from_fd.voigt().iter().zip(exact.voigt()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn bounded_by_gradient_bound() {
        let data = rich_data();
        let m = Material::new(1.0, 2.0, 0.5).unwrap();
        let sol = DalembertSolution::new(data, m, SolverSpec::default());
        let mut max_tau = 0.0f64;
        let mut max_div = 0.0f64;
        let mut max_g = 0.0f64;
        for (k, x) in halton_box([-3.0; 3], [3.0; 3], 30, 0).into_iter().enumerate() {
            let p = SpacetimePoint::new(0.02 * k as f64, x).unwrap();
            let g = sol.space_gradient(p).unwrap();
            let s = StressTensor::from_gradient(&g, &m, p);
            max_tau = max_tau.max(s.max_abs());
            max_div = max_div.max((g[0][0] + g[1][1] + g[2][2]).abs());
            max_g = g.iter().flatten().fold(max_g, |a, v| a.max(v.abs()));
        }
        assert!(max_tau.is_finite());
        assert!(max_tau <= m.lambda() * max_div + 2.0 * m.mu() * max_g + 1e-12);
    }
}
