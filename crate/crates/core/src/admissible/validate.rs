use std::fmt;

use rayon::prelude::*;

use super::ProblemData;
use crate::domain::{Mat3, Point3};
use crate::fields::{check_decay, check_decay_with, curl_of_jacobian, DecayReport};
use crate::report::KeyValues;
use crate::sampling::box_samples;

/// Where and when the validator samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSpec {
    pub lo: Point3,
    pub hi: Point3,
    /// Number of Halton points on top of the box corners and origin.
    pub count: usize,
    /// Times at which the forcing is checked.
    pub times: Vec<f64>,
    pub seed_offset: u64,
    /// Sphere radii of the decay check.
    pub decay_radii: Vec<f64>,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            lo: [-2.0; 3],
            hi: [2.0; 3],
            count: 200,
            times: vec![0.0, 0.5, 1.0],
            seed_offset: 0,
            decay_radii: vec![5.0, 10.0, 20.0],
        }
    }
}

impl SamplingSpec {
    pub fn points(&self) -> Vec<Point3> {
        box_samples(self.lo, self.hi, self.count, self.seed_offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    CurlPhi,
    CurlPsi,
    CurlForcing,
    EqualDiagonalPhi,
    EqualDiagonalPsi,
    EqualDiagonalForcing,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::CurlPhi,
        Condition::CurlPsi,
        Condition::CurlForcing,
        Condition::EqualDiagonalPhi,
        Condition::EqualDiagonalPsi,
        Condition::EqualDiagonalForcing,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Condition::CurlPhi => "curl_phi",
            Condition::CurlPsi => "curl_psi",
            Condition::CurlForcing => "curl_forcing",
            Condition::EqualDiagonalPhi => "eq_deriv_phi",
            Condition::EqualDiagonalPsi => "eq_deriv_psi",
            Condition::EqualDiagonalForcing => "eq_deriv_forcing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub condition: Condition,
    pub max_residual: f64,
    /// Where the maximum was attained, as `(t, x)`.
    pub worst: (f64, Point3),
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Checked conditions only; `eq_deriv_forcing` is omitted when the data
    /// does not ask for the strong forcing condition.
    pub conditions: Vec<ConditionResult>,
    pub sample_count: usize,
    pub tol: f64,
    /// Decay of `phi`, `psi` and `F(t, .)` at each sampled time. Reported
    /// alongside, not folded into [`ValidationReport::passed`].
    pub decay: Vec<(String, DecayReport)>,
}

impl ValidationReport {
    /// True iff every checked residual is below the tolerance.
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn condition(&self, c: Condition) -> Option<&ConditionResult> {
        self.conditions.iter().find(|r| r.condition == c)
    }

    pub fn decay_passed(&self) -> bool {
        self.decay.iter().all(|(_, d)| d.passed())
    }
}

impl KeyValues for ValidationReport {
    fn key_values(&self) -> Vec<(String, String)> {
        let mut kv: Vec<_> = self
            .conditions
            .iter()
            .map(|c| (c.condition.key().to_string(), format!("{:e}", c.max_residual)))
            .collect();
        kv.push(("samples".into(), self.sample_count.to_string()));
        kv.push(("decay".into(), self.decay_passed().to_string()));
        kv.push(("pass".into(), self.passed().to_string()));
        kv
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "admissibility check ({} samples, tol {:e})", self.sample_count, self.tol)?;
        for c in &self.conditions {
            let (t, x) = c.worst;
            writeln!(
                f,
                "  {:<18} max residual {:.3e}  {}  (worst at t={t}, x={x:?})",
                c.condition.key(),
                c.max_residual,
                if c.passed { "ok" } else { "FAIL" },
            )?;
        }
        for (label, d) in &self.decay {
            writeln!(f, "  decay of {label}: {}", if d.passed() { "ok" } else { "not observed" })?;
            write!(f, "{d}")?;
        }
        writeln!(f, "result: {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

fn curl_norm(j: &Mat3) -> f64 {
    crate::domain::norm(curl_of_jacobian(j))
}

fn diagonal_spread(j: &Mat3) -> f64 {
    (j[0][0] - j[1][1]).abs().max((j[1][1] - j[2][2]).abs())
}

#[derive(Clone, Copy)]
struct Worst {
    value: f64,
    at: (f64, Point3),
}

impl Worst {
    fn none() -> Self {
        Worst {
            value: 0.0,
            at: (0.0, [0.0; 3]),
        }
    }

    fn update(&mut self, value: f64, at: (f64, Point3)) {
        // NaN residuals must surface as failures
        if value > self.value || value.is_nan() && !self.value.is_nan() {
            *self = Worst { value, at };
        }
    }
}

/// Samples the admissibility conditions of `data` and reports the largest
/// residual of each.
pub fn validate_admissible(
    data: &ProblemData,
    sampling: &SamplingSpec,
    tol: f64,
    fd_step: f64,
) -> ValidationReport {
    let points = sampling.points();
    let jac_phi: Vec<Mat3> = points.par_iter().map(|&x| data.phi.jacobian(x, fd_step)).collect();
    let jac_psi: Vec<Mat3> = points.par_iter().map(|&x| data.psi.jacobian(x, fd_step)).collect();
    let spacetime: Vec<(f64, Point3)> = sampling
        .times
        .iter()
        .flat_map(|&t| points.iter().map(move |&x| (t, x)))
        .collect();
    let jac_forcing: Vec<Mat3> = spacetime
        .par_iter()
        .map(|&(t, x)| data.forcing.jacobian(t, x, fd_step))
        .collect();

    let mut worst = [Worst::none(); 6];
    for (k, &x) in points.iter().enumerate() {
        worst[0].update(curl_norm(&jac_phi[k]), (0.0, x));
        worst[1].update(curl_norm(&jac_psi[k]), (0.0, x));
        worst[3].update(diagonal_spread(&jac_phi[k]), (0.0, x));
        worst[4].update(diagonal_spread(&jac_psi[k]), (0.0, x));
    }
    for (k, &at) in spacetime.iter().enumerate() {
        worst[2].update(curl_norm(&jac_forcing[k]), at);
        worst[5].update(diagonal_spread(&jac_forcing[k]), at);
    }

    let conditions = Condition::ALL
        .iter()
        .zip(worst)
        .filter(|(c, _)| data.strong_forcing || **c != Condition::EqualDiagonalForcing)
        .map(|(&condition, w)| ConditionResult {
            condition,
            max_residual: w.value,
            worst: w.at,
            passed: w.value < tol,
        })
        .collect();

    let radii = &sampling.decay_radii;
    let mut decay = vec![
        ("phi".to_string(), check_decay(&data.phi, radii, tol, fd_step)),
        ("psi".to_string(), check_decay(&data.psi, radii, tol, fd_step)),
    ];
    for &t in &sampling.times {
        let report = check_decay_with(
            |x| (data.forcing.value(t, x), data.forcing.jacobian(t, x, fd_step)),
            radii,
            tol,
        );
        decay.push((format!("F(t={t})"), report));
    }

    ValidationReport {
        conditions,
        sample_count: points.len(),
        tol,
        decay,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::{CatalogProfile, RidgeDirection};
    use crate::fields::{ForcingField, ScalarField3, TimeEnvelope, VectorField3};

    fn gaussian(sigma: f64) -> crate::fields::ScalarProfile {
        CatalogProfile::gaussian(sigma, 0.0).unwrap().into_profile()
    }

    fn dir(e: [i8; 3]) -> RidgeDirection {
        RidgeDirection::new(e[0], e[1], e[2]).unwrap()
    }

    fn ridge_problem() -> ProblemData {
        ProblemData::builder()
            .phi(1.0, &gaussian(1.0), dir([1, 1, 1]))
            .phi(-0.5, &CatalogProfile::sine_gaussian(2.0, 1.0, 0.2).unwrap().into_profile(), dir([1, -1, 1]))
            .psi(0.3, &gaussian(0.8), dir([1, 1, -1]))
            .forcing(1.0, TimeEnvelope::exponential(1.0), &gaussian(1.2), dir([1, -1, -1]))
            .build()
    }

    fn rotational() -> VectorField3 {
        let g = |x: Point3| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
        VectorField3::new(
            ScalarField3::from_fn(move |x| -x[1] * g(x)),
            ScalarField3::from_fn(move |x| x[0] * g(x)),
            ScalarField3::zero(),
        )
    }

    /// `grad (x1^2 exp(-r^2))`, written out by hand.
    fn radial_gradient() -> VectorField3 {
        let g = |x: Point3| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
        VectorField3::new(
            ScalarField3::from_fn(move |x| (2.0 * x[0] - 2.0 * x[0].powi(3)) * g(x)),
            ScalarField3::from_fn(move |x| -2.0 * x[0] * x[0] * x[1] * g(x)),
            ScalarField3::from_fn(move |x| -2.0 * x[0] * x[0] * x[2] * g(x)),
        )
    }

    #[test]
    fn ridge_data_passes_with_tiny_residuals() {
        let report = validate_admissible(&ridge_problem(), &SamplingSpec::default(), 1e-6, 1e-4);
        assert!(report.passed(), "{report}");
        for c in &report.conditions {
            assert!(c.max_residual < 1e-8, "{:?}", c);
        }
        assert_eq!(report.conditions.len(), 6);
        assert_eq!(report.sample_count, 209);
    }

    #[test]
    fn ridge_fields_do_not_decay_along_their_planes() {
        // Ridge potentials are constant on planes e . x = const, so the
        // Jacobian e_i e_j f''(0) persists along directions orthogonal to e.
        let data = ProblemData::builder().phi(1.0, &gaussian(1.0), dir([1, 1, 1])).build();
        let report = validate_admissible(&data, &SamplingSpec::default(), 1e-6, 1e-4);
        let (_, phi_decay) = &report.decay[0];
        assert!(phi_decay.values_decay, "{phi_decay}");
        assert!(!phi_decay.derivatives_decay);
        assert!((phi_decay.max_derivative[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rotational_phi_fails_curl() {
        let data = ProblemData::user_supplied(rotational(), VectorField3::zero(), ForcingField::zero());
        let report = validate_admissible(&data, &SamplingSpec::default(), 1e-6, 1e-4);
        assert!(!report.passed());
        assert!(!report.condition(Condition::CurlPhi).unwrap().passed);
        assert!(report.condition(Condition::CurlPsi).unwrap().passed);
        assert!(report.decay_passed(), "compactly concentrated field decays");
    }

    #[test]
    fn radial_gradient_passes_curl_fails_diagonal() {
        let data = ProblemData::user_supplied(radial_gradient(), VectorField3::zero(), ForcingField::zero());
        let report = validate_admissible(&data, &SamplingSpec::default(), 1e-6, 1e-4);
        assert!(report.condition(Condition::CurlPhi).unwrap().passed);
        assert!(!report.condition(Condition::EqualDiagonalPhi).unwrap().passed);
        // at x = (0.5, 0, 0): d1 phi1 = (2 - 10 x1^2 + 4 x1^4) g, d2 phi2 = (-2 x1^2 + 4 x1^2 x2^2) g
        let g = (-0.25f64).exp();
        let d11 = (2.0 - 2.5 + 0.25) * g;
        let d22 = -0.5 * g;
        let j = radial_gradient().jacobian([0.5, 0.0, 0.0], 1e-4);
        assert!((j[0][0] - d11).abs() < 1e-9 && (j[1][1] - d22).abs() < 1e-9);
        assert!((d11 - d22).abs() > 0.1);
    }

    #[test]
    fn superposition_of_admissible_data_passes() {
        let a = ProblemData::builder().phi(1.0, &gaussian(1.0), dir([1, 1, 1])).build();
        let b = ProblemData::builder().phi(1.0, &gaussian(0.6), dir([1, -1, 1])).build();
        let half = ProblemData::linear_combination(&[(0.5, &a), (0.5, &b)]).unwrap();
        let report = validate_admissible(&half, &SamplingSpec::default(), 1e-6, 1e-4);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn weak_forcing_skips_diagonal_condition() {
        // F = grad exp(-r^2): curl-free, unequal diagonal
        let forcing = ForcingField::separable(TimeEnvelope::constant(1.0), radial_gradient());
        let data = ProblemData::user_supplied(VectorField3::zero(), VectorField3::zero(), forcing);
        let strong = validate_admissible(&data, &SamplingSpec::default(), 1e-6, 1e-4);
        assert!(!strong.passed());
        let weak = validate_admissible(&data.with_strong_forcing(false), &SamplingSpec::default(), 1e-6, 1e-4);
        assert!(weak.passed(), "{weak}");
        assert!(weak.condition(Condition::EqualDiagonalForcing).is_none());
    }

    #[test]
    fn key_value_rendering() {
        let report = validate_admissible(&ProblemData::zero(), &SamplingSpec::default(), 1e-6, 1e-4);
        let text = crate::report::render_key_values(&report);
        assert!(text.starts_with("curl_phi=0e0\n"), "{text}");
        assert!(text.ends_with("pass=true\n"));
    }
}
