use std::fmt;

use rayon::prelude::*;

use crate::admissible::ProblemData;
use crate::domain::{norm, Axis, Material, SpacetimePoint, Vec3};
use crate::error::{Error, Result};
use crate::report::KeyValues;
use crate::solver::DisplacementModel;

/// Second-order central-difference residual of the elastic system
///
/// ```text
/// rho d_tt u - mu Lap u - (lambda + mu) grad div u - rho F
/// ```
///
/// built from 21 displacement evaluations: the centre, `t +/- h`, `+/- h`
/// along each axis and the four diagonal neighbours in each coordinate plane.
pub fn residual<M: DisplacementModel + ?Sized>(
    model: &M,
    data: &ProblemData,
    m: &Material,
    p: SpacetimePoint,
    h: f64,
) -> Result<Vec3> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("finite-difference step must be positive, got {h}")));
    }
    if p.t < h {
        return Err(Error::Precondition(format!(
            "residual needs t >= h for central time differences (t = {}, h = {h})",
            p.t
        )));
    }
    let u = |q: SpacetimePoint| model.displacement(q).map(|s| s.u);
    let centre = u(p)?;
    let later = u(p.shifted_time(h))?;
    let earlier = u(p.shifted_time(-h))?;
    let mut plus = [[0.0; 3]; 3];
    let mut minus = [[0.0; 3]; 3];
    for ax in Axis::ALL {
        plus[ax.index()] = u(p.shifted_space(ax, h))?;
        minus[ax.index()] = u(p.shifted_space(ax, -h))?;
    }
    // mixed[i][j] = d_i d_j u for i < j
    let mut mixed = [[[0.0; 3]; 3]; 3];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let (ai, aj) = (Axis::ALL[i], Axis::ALL[j]);
        let corner = |si: f64, sj: f64| u(p.shifted_space(ai, si * h).shifted_space(aj, sj * h));
        let (pp, pm, mp, mm) = (corner(1.0, 1.0)?, corner(1.0, -1.0)?, corner(-1.0, 1.0)?, corner(-1.0, -1.0)?);
        for c in 0..3 {
            let v = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h);
            mixed[i][j][c] = v;
            mixed[j][i][c] = v;
        }
    }
    let second = |ax: usize, c: usize| (plus[ax][c] - 2.0 * centre[c] + minus[ax][c]) / (h * h);
    for i in 0..3 {
        for c in 0..3 {
            mixed[i][i][c] = second(i, c);
        }
    }

    let force = data.forcing.value(p.t, p.x);
    let (rho, lambda, mu) = (m.rho(), m.lambda(), m.mu());
    Ok(std::array::from_fn(|i| {
        let u_tt = (later[i] - 2.0 * centre[i] + earlier[i]) / (h * h);
        let laplacian: f64 = (0..3).map(|j| mixed[j][j][i]).sum();
        let grad_div: f64 = (0..3).map(|j| mixed[i][j][j]).sum();
        rho * u_tt - mu * laplacian - (lambda + mu) * grad_div - rho * force[i]
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub step: f64,
    pub samples: Vec<(SpacetimePoint, Vec3)>,
    /// Largest Euclidean norm over the samples.
    pub max: f64,
    /// Root mean square of the norms.
    pub l2: f64,
}

impl ResidualReport {
    fn from_samples(step: f64, samples: Vec<(SpacetimePoint, Vec3)>) -> Self {
        let norms: Vec<f64> = samples.iter().map(|(_, r)| norm(*r)).collect();
        let max = norms.iter().fold(0.0f64, |a, &b| a.max(b));
        let l2 = if norms.is_empty() {
            0.0
        } else {
            (norms.iter().map(|n| n * n).sum::<f64>() / norms.len() as f64).sqrt()
        };
        ResidualReport { step, samples, max, l2 }
    }

    pub fn norms(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(_, r)| norm(*r))
    }
}

pub fn residual_report<M: DisplacementModel + ?Sized>(
    model: &M,
    data: &ProblemData,
    m: &Material,
    points: &[SpacetimePoint],
    h: f64,
) -> Result<ResidualReport> {
    let samples = points
        .par_iter()
        .map(|&p| residual(model, data, m, p, h).map(|r| (p, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::from_samples(h, samples))
}

/// Residuals at `h` and `h/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStudy {
    pub coarse: ResidualReport,
    pub fine: ResidualReport,
}

impl ResidualStudy {
    /// Per-point `|r(h)| / |r(h/2)|`; about 4 for a second-order residual.
    pub fn ratios(&self) -> Vec<f64> {
        self.coarse.norms().zip(self.fine.norms()).map(|(c, f)| c / f).collect()
    }

    /// `log2` of the ratio of max norms.
    pub fn order(&self) -> f64 {
        (self.coarse.max / self.fine.max).log2()
    }
}

pub fn residual_study<M: DisplacementModel + ?Sized>(
    model: &M,
    data: &ProblemData,
    m: &Material,
    points: &[SpacetimePoint],
    h: f64,
) -> Result<ResidualStudy> {
    Ok(ResidualStudy {
        coarse: residual_report(model, data, m, points, h)?,
        fine: residual_report(model, data, m, points, 0.5 * h)?,
    })
}

impl KeyValues for ResidualReport {
    fn key_values(&self) -> Vec<(String, String)> {
        vec![
            ("residual_step".into(), format!("{:e}", self.step)),
            ("residual_max".into(), format!("{:e}", self.max)),
            ("residual_l2".into(), format!("{:e}", self.l2)),
            ("residual_samples".into(), self.samples.len().to_string()),
        ]
    }
}

impl KeyValues for ResidualStudy {
    fn key_values(&self) -> Vec<(String, String)> {
        vec![
            ("residual_step".into(), format!("{:e}", self.coarse.step)),
            ("residual_max_coarse".into(), format!("{:e}", self.coarse.max)),
            ("residual_max_fine".into(), format!("{:e}", self.fine.max)),
            ("residual_l2_fine".into(), format!("{:e}", self.fine.l2)),
            ("residual_order".into(), format!("{:e}", self.order())),
            ("residual_samples".into(), self.fine.samples.len().to_string()),
        ]
    }
}

impl fmt::Display for ResidualStudy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "residual of the elastic system ({} points)", self.fine.samples.len())?;
        writeln!(f, "  h = {:e}: max {:.3e}, rms {:.3e}", self.coarse.step, self.coarse.max, self.coarse.l2)?;
        writeln!(f, "  h = {:e}: max {:.3e}, rms {:.3e}", self.fine.step, self.fine.max, self.fine.l2)?;
        writeln!(f, "  observed order {:.3}", self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::{CatalogProfile, RidgeDirection};
    use crate::fields::{ForcingField, TimeEnvelope, VectorField3};
    use crate::solver::{DalembertSolution, SolverSpec};

    fn unit() -> Material {
        Material::new(1.0, 1.0, 1.0).unwrap()
    }

    fn ridge() -> ProblemData {
        let p = |s| CatalogProfile::gaussian(s, 0.0).unwrap().into_profile();
        let d = |a, b, c| RidgeDirection::new(a, b, c).unwrap();
        ProblemData::builder()
            .phi(1.0, &p(1.0), d(1, 1, 1))
            .psi(0.5, &p(1.2), d(1, -1, 1))
            .forcing(0.3, TimeEnvelope::exponential(0.5), &p(1.5), d(1, 1, -1))
            .build()
    }

    #[test]
    fn zero_data_has_zero_residual() {
        let data = ProblemData::zero();
        let sol = DalembertSolution::new(data.clone(), unit(), SolverSpec::default());
        let p = SpacetimePoint::new(0.5, [0.1, -0.2, 0.3]).unwrap();
        let r = residual(&sol, &data, &unit(), p, 1e-2).unwrap();
        assert!(norm(r) < 1e-12);
    }

    #[test]
    fn second_order_in_step() {
        let data = ridge();
        let sol = DalembertSolution::new(data.clone(), unit(), SolverSpec::default());
        let p = SpacetimePoint::new(0.5, [0.1, -0.2, 0.3]).unwrap();
        let coarse = norm(residual(&sol, &data, &unit(), p, 1e-2).unwrap());
        let fine = norm(residual(&sol, &data, &unit(), p, 5e-3).unwrap());
        let ratio = coarse / fine;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio} ({coarse:e} / {fine:e})");
    }

    #[test]
    fn wrong_wave_speed_is_detected() {
        let data = ProblemData::builder()
            .phi(1.0, &CatalogProfile::gaussian(1.0, 0.0).unwrap().into_profile(), RidgeDirection::new(1, 1, 1).unwrap())
            .build();
        let m = unit();
        // quadrupled density halves a inside the double only
        let slow = Material::new(4.0 * m.rho(), m.lambda(), m.mu()).unwrap();
        assert!((slow.wave_speed() - 0.5 * m.wave_speed()).abs() < 1e-15);
        let double = DalembertSolution::new(data.clone(), slow, SolverSpec::default());
        let p = SpacetimePoint::new(0.5, [0.1, -0.2, 0.3]).unwrap();
        let r = norm(residual(&double, &data, &m, p, 1e-2).unwrap());
        assert!(r > 0.1, "{r}");
    }

    #[test]
    fn rejects_early_times() {
        let data = ProblemData::zero();
        let sol = DalembertSolution::new(data.clone(), unit(), SolverSpec::default());
        let p = SpacetimePoint::new(1e-3, [0.0; 3]).unwrap();
        assert!(matches!(residual(&sol, &data, &unit(), p, 1e-2), Err(Error::Precondition(_))));
    }

    #[test]
    fn weak_forcing_is_not_solved() {
        // F = grad exp(-|x|^2): curl-free but with unequal diagonal derivatives
        let g = |x: [f64; 3]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
        let comp = |k: usize| crate::fields::ScalarField3::from_fn(move |x| -2.0 * x[k] * g(x));
        let forcing = ForcingField::separable(TimeEnvelope::constant(1.0), VectorField3::new(comp(0), comp(1), comp(2)));
        let data = ProblemData::user_supplied(VectorField3::zero(), VectorField3::zero(), forcing).with_strong_forcing(false);
        let sol = DalembertSolution::new(data.clone(), unit(), SolverSpec::default());
        let p = SpacetimePoint::new(0.5, [0.3, -0.2, 0.1]).unwrap();
        let r = norm(residual(&sol, &data, &unit(), p, 1e-2).unwrap());
        assert!(r > 1e-2, "{r}");
    }
}
