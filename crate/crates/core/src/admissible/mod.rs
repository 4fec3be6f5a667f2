//! Construction and validation of initial data and forcing in the admissible
//! class: curl-free vector fields whose diagonal first derivatives agree,
//! `d v1/dx1 = d v2/dx2 = d v3/dx3`.
//!
//! The constructive generators are ridge gradients `v = grad f(e . x)` with
//! `e` in `{+1, -1}^3`. For those, `d v_i / d x_j = e_i e_j f''(e . x)`, a
//! symmetric matrix with constant diagonal. Linear combinations of ridge
//! fields stay in the class.

mod profile;
mod validate;

use crate::domain::{Axis, Point3};
use crate::error::{Error, Result};
use crate::fields::{ForcingField, Order, ScalarField, ScalarField3, ScalarProfile, TimeEnvelope, VectorField3};

pub use profile::{CatalogProfile, PROFILE_NAMES};
pub use validate::{validate_admissible, Condition, ConditionResult, SamplingSpec, ValidationReport};

/// Step used when a profile lacks a closed-form first derivative.
const PROFILE_FD_STEP: f64 = 1e-4;

/// Sign vector `(e1, e2, e3)` of a ridge potential `f(e1 x1 + e2 x2 + e3 x3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RidgeDirection([i8; 3]);

impl RidgeDirection {
    pub fn new(e1: i8, e2: i8, e3: i8) -> Result<Self> {
        let signs = [e1, e2, e3];
        if signs.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidParameter {
                name: "direction",
                reason: format!("components must be +1 or -1, got {signs:?}"),
            });
        }
        Ok(RidgeDirection(signs))
    }

    /// All 8 sign vectors.
    pub fn all() -> impl Iterator<Item = RidgeDirection> {
        (0..8u8).map(|b| {
            RidgeDirection(std::array::from_fn(|k| if b >> k & 1 == 0 { 1 } else { -1 }))
        })
    }

    pub fn signs(&self) -> [i8; 3] {
        self.0
    }

    /// `e` and `-e` generate the same family (up to reflecting the profile);
    /// the canonical representative has `e1 = +1`.
    pub fn canonical(self) -> Self {
        if self.0[0] == 1 {
            self
        } else {
            RidgeDirection(self.0.map(|e| -e))
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.0[0] == 1
    }

    fn as_f64(&self) -> [f64; 3] {
        self.0.map(f64::from)
    }

    fn project(&self, x: Point3) -> f64 {
        let e = self.as_f64();
        e[0] * x[0] + e[1] * x[1] + e[2] * x[2]
    }
}

/// Component `i` of `grad f(e . x)`.
struct RidgeComponent {
    profile: ScalarProfile,
    direction: RidgeDirection,
    index: usize,
}

impl RidgeComponent {
    fn sign(&self, k: usize) -> f64 {
        self.direction.as_f64()[k]
    }
}

impl ScalarField for RidgeComponent {
    fn value(&self, x: Point3) -> f64 {
        let s = self.direction.project(x);
        self.sign(self.index) * self.profile.derivative(s, 1, PROFILE_FD_STEP)
    }

    fn analytic_partial(&self, x: Point3, axis: Axis, order: Order) -> Option<f64> {
        let s = self.direction.project(x);
        let ei = self.sign(self.index);
        match order {
            Order::First => self
                .profile
                .analytic_derivative(s, 2)
                .map(|d| ei * self.sign(axis.index()) * d),
            // e_j^2 = 1
            Order::Second => self.profile.analytic_derivative(s, 3).map(|d| ei * d),
        }
    }
}

/// `v_i(x) = e_i f'(e . x)`, the gradient of the ridge potential `f(e . x)`.
pub fn ridge_data(profile: &ScalarProfile, direction: RidgeDirection) -> VectorField3 {
    let comp = |index| {
        ScalarField3::new(RidgeComponent {
            profile: profile.clone(),
            direction,
            index,
        })
    };
    VectorField3::new(comp(0), comp(1), comp(2))
}

/// Pointwise linear combination `sum c_k v_k`.
pub fn superpose(terms: &[(f64, VectorField3)]) -> Result<VectorField3> {
    if terms.is_empty() {
        return Err(Error::EmptySuperposition);
    }
    let refs: Vec<_> = terms.iter().map(|(c, v)| (*c, v)).collect();
    Ok(VectorField3::linear_combination(&refs))
}

/// `F(t, x) = g(t) grad f(e . x)`.
pub fn ridge_forcing(
    envelope: TimeEnvelope,
    profile: &ScalarProfile,
    direction: RidgeDirection,
) -> ForcingField {
    ForcingField::separable(envelope, ridge_data(profile, direction))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Assembled from ridge generators; admissible by construction.
    Constructed,
    /// Arbitrary fields; admissible only if validation says so.
    UserSupplied,
}

/// Initial displacement `phi`, initial velocity `psi` and body force `F`.
#[derive(Debug, Clone)]
pub struct ProblemData {
    pub phi: VectorField3,
    pub psi: VectorField3,
    pub forcing: ForcingField,
    provenance: Provenance,
    /// Also require the forcing's diagonal derivatives to agree, on top of
    /// `curl F = 0`.
    pub strong_forcing: bool,
}

impl ProblemData {
    pub fn zero() -> Self {
        ProblemData {
            phi: VectorField3::zero(),
            psi: VectorField3::zero(),
            forcing: ForcingField::zero(),
            provenance: Provenance::Constructed,
            strong_forcing: true,
        }
    }

    pub fn user_supplied(phi: VectorField3, psi: VectorField3, forcing: ForcingField) -> Self {
        ProblemData {
            phi,
            psi,
            forcing,
            provenance: Provenance::UserSupplied,
            strong_forcing: true,
        }
    }

    pub fn builder() -> RidgeDataBuilder {
        RidgeDataBuilder::default()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_strong_forcing(mut self, strong: bool) -> Self {
        self.strong_forcing = strong;
        self
    }

    /// `sum c_k D_k`; constructed provenance survives only if every term has it.
    pub fn linear_combination(terms: &[(f64, &ProblemData)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptySuperposition);
        }
        let phi: Vec<_> = terms.iter().map(|(c, d)| (*c, &d.phi)).collect();
        let psi: Vec<_> = terms.iter().map(|(c, d)| (*c, &d.psi)).collect();
        let forcing: Vec<_> = terms.iter().map(|(c, d)| (*c, &d.forcing)).collect();
        let provenance = if terms.iter().all(|(_, d)| d.provenance == Provenance::Constructed) {
            Provenance::Constructed
        } else {
            Provenance::UserSupplied
        };
        Ok(ProblemData {
            phi: VectorField3::linear_combination(&phi),
            psi: VectorField3::linear_combination(&psi),
            forcing: ForcingField::linear_combination(&forcing),
            provenance,
            strong_forcing: terms.iter().all(|(_, d)| d.strong_forcing),
        })
    }
}

/// Accumulates ridge terms into [`ProblemData`] with constructed provenance.
#[derive(Default)]
pub struct RidgeDataBuilder {
    phi: Vec<(f64, VectorField3)>,
    psi: Vec<(f64, VectorField3)>,
    forcing: Vec<(f64, ForcingField)>,
}

impl RidgeDataBuilder {
    pub fn phi(mut self, coefficient: f64, profile: &ScalarProfile, direction: RidgeDirection) -> Self {
        self.phi.push((coefficient, ridge_data(profile, direction)));
        self
    }

    pub fn psi(mut self, coefficient: f64, profile: &ScalarProfile, direction: RidgeDirection) -> Self {
        self.psi.push((coefficient, ridge_data(profile, direction)));
        self
    }

    pub fn forcing(
        mut self,
        coefficient: f64,
        envelope: TimeEnvelope,
        profile: &ScalarProfile,
        direction: RidgeDirection,
    ) -> Self {
        self.forcing
            .push((coefficient, ridge_forcing(envelope, profile, direction)));
        self
    }

    pub fn build(self) -> ProblemData {
        let field = |terms: Vec<(f64, VectorField3)>| {
            superpose(&terms).unwrap_or_else(|_| VectorField3::zero())
        };
        let refs: Vec<_> = self.forcing.iter().map(|(c, f)| (*c, f)).collect();
        ProblemData {
            phi: field(self.phi),
            psi: field(self.psi),
            forcing: ForcingField::linear_combination(&refs),
            provenance: Provenance::Constructed,
            strong_forcing: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::halton_box;

    fn gaussian() -> ScalarProfile {
        CatalogProfile::gaussian(1.0, 0.0).unwrap().into_profile()
    }

    fn dir(e1: i8, e2: i8, e3: i8) -> RidgeDirection {
        RidgeDirection::new(e1, e2, e3).unwrap()
    }

    const TWO_OVER_E: f64 = 0.735_758_882_342_884_6;

    #[test]
    fn direction_set() {
        assert_eq!(RidgeDirection::all().count(), 8);
        assert_eq!(RidgeDirection::all().filter(RidgeDirection::is_canonical).count(), 4);
        assert_eq!(dir(-1, 1, -1).canonical(), dir(1, -1, 1));
        assert!(RidgeDirection::new(0, 1, 1).is_err());
        assert!(RidgeDirection::new(1, 2, 1).is_err());
    }

    #[test]
    fn ridge_values() {
        let v = ridge_data(&gaussian(), dir(1, 1, 1));
        assert_eq!(v.value([0.0; 3]), [0.0; 3]);
        for c in v.value([1.0, 0.0, 0.0]) {
            assert!((c + TWO_OVER_E).abs() < 1e-15);
        }
        let w = ridge_data(&gaussian(), dir(1, -1, 1));
        let got = w.value([0.0, 1.0, 0.0]);
        let want = [TWO_OVER_E, -TWO_OVER_E, TWO_OVER_E];
        for k in 0..3 {
            assert!((got[k] - want[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn ridge_jacobian_structure() {
        let prof = CatalogProfile::sine_gaussian(1.5, 1.2, 0.3).unwrap().into_profile();
        for d in RidgeDirection::all() {
            let v = ridge_data(&prof, d);
            let e = d.as_f64();
            for x in halton_box([-2.0; 3], [2.0; 3], 10, 0) {
                let s = d.project(x);
                let f2 = prof.analytic_derivative(s, 2).unwrap();
                let analytic = v.jacobian(x, 1e-4);
                for i in 0..3 {
                    for j in 0..3 {
                        assert_eq!(analytic[i][j], e[i] * e[j] * f2);
                        let fd = ScalarField3::from_fn({
                            let c = v.component(Axis::ALL[i]).clone();
                            move |y| c.value(y)
                        })
                        .partial(Axis::ALL[j], Order::First, x, 1e-3);
                        assert!((fd - analytic[i][j]).abs() < 1e-9);
                    }
                    assert_eq!(analytic[i][i], analytic[0][0]);
                }
            }
        }
    }

    #[test]
    fn superposition_rules() {
        let v = ridge_data(&gaussian(), dir(1, -1, 1));
        assert_eq!(superpose(&[]).unwrap_err(), Error::EmptySuperposition);
        let cancel = superpose(&[(1.0, v.clone()), (-1.0, v.clone())]).unwrap();
        let double = superpose(&[(2.0, v.clone())]).unwrap();
        for x in halton_box([-2.0; 3], [2.0; 3], 20, 3) {
            assert_eq!(cancel.value(x), [0.0; 3]);
            let a = v.value(x);
            let b = double.value(x);
            for k in 0..3 {
                assert_eq!(b[k], 2.0 * a[k]);
            }
        }
    }

    #[test]
    fn ridge_forcing_values() {
        let p = gaussian();
        let zero = ridge_forcing(TimeEnvelope::constant(0.0), &p, dir(1, 1, 1));
        assert!(zero.is_zero());
        assert_eq!(zero.value(1.0, [0.3, 0.1, 0.0]), [0.0; 3]);

        let unit = ridge_forcing(TimeEnvelope::constant(1.0), &p, dir(1, 1, 1));
        for c in unit.value(5.0, [1.0, 0.0, 0.0]) {
            assert!((c + TWO_OVER_E).abs() < 1e-15);
        }
        let decaying = ridge_forcing(TimeEnvelope::exponential(1.0), &p, dir(1, 1, 1));
        for c in decaying.value(2f64.ln(), [1.0, 0.0, 0.0]) {
            assert!((c + (-1.0f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn provenance_tracking() {
        let a = ProblemData::builder().phi(1.0, &gaussian(), dir(1, 1, 1)).build();
        assert_eq!(a.provenance(), Provenance::Constructed);
        let b = ProblemData::user_supplied(VectorField3::zero(), VectorField3::zero(), ForcingField::zero());
        let ab = ProblemData::linear_combination(&[(1.0, &a), (1.0, &b)]).unwrap();
        assert_eq!(ab.provenance(), Provenance::UserSupplied);
        let aa = ProblemData::linear_combination(&[(0.5, &a), (2.0, &a)]).unwrap();
        assert_eq!(aa.provenance(), Provenance::Constructed);
        assert!(ProblemData::linear_combination(&[]).is_err());
    }
}
