//! Analytic scalar and vector fields with exact or finite-difference
//! partial derivatives.
//!
//! Fields are cheap reference-counted handles around trait objects, so data
//! sets can be cloned into superpositions and shared across threads.

pub mod fd;
mod decay;

use std::fmt;
use std::sync::Arc;

use crate::domain::{Axis, Mat3, Point3, Vec3};

pub use decay::{check_decay, check_decay_with, DecayReport, DECAY_DIRECTIONS};

/// Derivative order of a partial derivative along a single axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// A smooth function of one variable.
pub trait Profile: Send + Sync {
    fn value(&self, s: f64) -> f64;

    /// Derivative of order `order >= 1` in closed form, when available.
    fn analytic_derivative(&self, _s: f64, _order: u32) -> Option<f64> {
        None
    }
}

#[derive(Clone)]
pub struct ScalarProfile(Arc<dyn Profile>);

impl fmt::Debug for ScalarProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarProfile(..)")
    }
}

impl ScalarProfile {
    pub fn new(profile: impl Profile + 'static) -> Self {
        ScalarProfile(Arc::new(profile))
    }

    pub fn value(&self, s: f64) -> f64 {
        self.0.value(s)
    }

    pub fn analytic_derivative(&self, s: f64, order: u32) -> Option<f64> {
        if order == 0 {
            return Some(self.value(s));
        }
        self.0.analytic_derivative(s, order)
    }

    /// Derivative of any order, falling back to finite differences of the
    /// next lower order when no closed form is available.
    pub fn derivative(&self, s: f64, order: u32, h: f64) -> f64 {
        if let Some(d) = self.analytic_derivative(s, order) {
            return d;
        }
        match order {
            0 => self.value(s),
            1 => fd::first_derivative_scalar(|r| self.value(r), s, h),
            2 => fd::second_derivative_scalar(|r| self.value(r), s, h),
            n => fd::first_derivative_scalar(|r| self.derivative(r, n - 1, h), s, h),
        }
    }
}

/// Closure-backed profile with optional closed-form first and second
/// derivatives.
pub struct FnProfile {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    d1: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    d2: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl FnProfile {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FnProfile {
            f: Box::new(f),
            d1: None,
            d2: None,
        }
    }

    pub fn with_first(mut self, d1: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d1 = Some(Box::new(d1));
        self
    }

    pub fn with_second(mut self, d2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2 = Some(Box::new(d2));
        self
    }
}

impl Profile for FnProfile {
    fn value(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    fn analytic_derivative(&self, s: f64, order: u32) -> Option<f64> {
        match order {
            1 => self.d1.as_ref().map(|d| d(s)),
            2 => self.d2.as_ref().map(|d| d(s)),
            _ => None,
        }
    }
}

impl From<FnProfile> for ScalarProfile {
    fn from(p: FnProfile) -> Self {
        ScalarProfile::new(p)
    }
}

/// A smooth function on R^3.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: Point3) -> f64;

    fn analytic_partial(&self, _x: Point3, _axis: Axis, _order: Order) -> Option<f64> {
        None
    }

    /// True only when the field is known to vanish identically.
    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Clone)]
pub struct ScalarField3(Arc<dyn ScalarField>);

impl fmt::Debug for ScalarField3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarField3(..)")
    }
}

impl ScalarField3 {
    pub fn new(field: impl ScalarField + 'static) -> Self {
        ScalarField3(Arc::new(field))
    }

    pub fn zero() -> Self {
        ScalarField3::new(ZeroField)
    }

    pub fn from_fn(f: impl Fn(Point3) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField3::new(FnField::new(f))
    }

    pub fn value(&self, x: Point3) -> f64 {
        self.0.value(x)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn analytic_partial(&self, x: Point3, axis: Axis, order: Order) -> Option<f64> {
        self.0.analytic_partial(x, axis, order)
    }

    /// Partial derivative along `axis`: closed form when the field supplies
    /// one, otherwise a Richardson-extrapolated central difference at step
    /// `fd_step`.
    pub fn partial(&self, axis: Axis, order: Order, x: Point3, fd_step: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if let Some(d) = self.analytic_partial(x, axis, order) {
            return d;
        }
        let along = |s: f64| {
            let mut y = x;
            y[axis.index()] = s;
            self.value(y)
        };
        let s = x[axis.index()];
        match order {
            Order::First => fd::first_derivative_scalar(along, s, fd_step),
            Order::Second => fd::second_derivative_scalar(along, s, fd_step),
        }
    }

    /// `d^2 f / dx_i dx_j`, computed for `i != j` as a difference of first
    /// partials.
    pub fn mixed_partial(&self, i: Axis, j: Axis, x: Point3, fd_step: f64) -> f64 {
        if i == j {
            return self.partial(i, Order::Second, x, fd_step);
        }
        let s = x[j.index()];
        fd::first_derivative_scalar(
            |r| {
                let mut y = x;
                y[j.index()] = r;
                self.partial(i, Order::First, y, fd_step)
            },
            s,
            fd_step,
        )
    }

    pub fn gradient(&self, x: Point3, fd_step: f64) -> Vec3 {
        Axis::ALL.map(|ax| self.partial(ax, Order::First, x, fd_step))
    }

    pub fn linear_combination(terms: &[(f64, ScalarField3)]) -> ScalarField3 {
        let kept: Vec<_> = terms
            .iter()
            .filter(|(c, f)| *c != 0.0 && !f.is_zero())
            .cloned()
            .collect();
        if kept.is_empty() {
            ScalarField3::zero()
        } else {
            ScalarField3::new(LinearCombination { terms: kept })
        }
    }
}

/// Spec-level entry point for [`ScalarField3::partial`].
pub fn partial(field: &ScalarField3, axis: Axis, order: Order, x: Point3, fd_step: f64) -> f64 {
    field.partial(axis, order, x, fd_step)
}

struct ZeroField;

impl ScalarField for ZeroField {
    fn value(&self, _x: Point3) -> f64 {
        0.0
    }

    fn analytic_partial(&self, _x: Point3, _axis: Axis, _order: Order) -> Option<f64> {
        Some(0.0)
    }

    fn is_zero(&self) -> bool {
        true
    }
}

type PointFn<T> = Box<dyn Fn(Point3) -> T + Send + Sync>;

/// Closure-backed field with optional closed-form gradient and unmixed
/// second derivatives.
pub struct FnField {
    f: PointFn<f64>,
    gradient: Option<PointFn<Vec3>>,
    second: Option<PointFn<Vec3>>,
}

impl FnField {
    pub fn new(f: impl Fn(Point3) -> f64 + Send + Sync + 'static) -> Self {
        FnField {
            f: Box::new(f),
            gradient: None,
            second: None,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(Point3) -> Vec3 + Send + Sync + 'static) -> Self {
        self.gradient = Some(Box::new(g));
        self
    }

    /// `(d^2/dx1^2, d^2/dx2^2, d^2/dx3^2)`.
    pub fn with_second(mut self, h: impl Fn(Point3) -> Vec3 + Send + Sync + 'static) -> Self {
        self.second = Some(Box::new(h));
        self
    }
}

impl ScalarField for FnField {
    fn value(&self, x: Point3) -> f64 {
        (self.f)(x)
    }

    fn analytic_partial(&self, x: Point3, axis: Axis, order: Order) -> Option<f64> {
        let source = match order {
            Order::First => self.gradient.as_ref(),
            Order::Second => self.second.as_ref(),
        };
        source.map(|g| g(x)[axis.index()])
    }
}

impl From<FnField> for ScalarField3 {
    fn from(f: FnField) -> Self {
        ScalarField3::new(f)
    }
}

struct LinearCombination {
    terms: Vec<(f64, ScalarField3)>,
}

impl ScalarField for LinearCombination {
    fn value(&self, x: Point3) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.value(x)).sum()
    }

    fn analytic_partial(&self, x: Point3, axis: Axis, order: Order) -> Option<f64> {
        self.terms
            .iter()
            .map(|(c, f)| f.analytic_partial(x, axis, order).map(|d| c * d))
            .sum()
    }
}

/// A vector field `(v1, v2, v3)` on R^3.
#[derive(Clone, Debug)]
pub struct VectorField3 {
    components: [ScalarField3; 3],
}

impl VectorField3 {
    pub fn new(c1: ScalarField3, c2: ScalarField3, c3: ScalarField3) -> Self {
        VectorField3 {
            components: [c1, c2, c3],
        }
    }

    pub fn zero() -> Self {
        VectorField3::new(ScalarField3::zero(), ScalarField3::zero(), ScalarField3::zero())
    }

    pub fn component(&self, axis: Axis) -> &ScalarField3 {
        &self.components[axis.index()]
    }

    pub fn value(&self, x: Point3) -> Vec3 {
        self.components.each_ref().map(|c| c.value(x))
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarField3::is_zero)
    }

    /// `J[i][j] = d v_i / d x_j`.
    pub fn jacobian(&self, x: Point3, fd_step: f64) -> Mat3 {
        self.components.each_ref().map(|c| c.gradient(x, fd_step))
    }

    pub fn curl(&self, x: Point3, fd_step: f64) -> Vec3 {
        curl_of_jacobian(&self.jacobian(x, fd_step))
    }

    pub fn divergence(&self, x: Point3, fd_step: f64) -> f64 {
        Axis::ALL
            .iter()
            .map(|&ax| self.component(ax).partial(ax, Order::First, x, fd_step))
            .sum()
    }

    pub fn linear_combination(terms: &[(f64, &VectorField3)]) -> VectorField3 {
        let comp = |k: usize| {
            let parts: Vec<_> = terms
                .iter()
                .map(|(c, v)| (*c, v.components[k].clone()))
                .collect();
            ScalarField3::linear_combination(&parts)
        };
        VectorField3::new(comp(0), comp(1), comp(2))
    }
}

/// `curl v` at `x`.
pub fn curl(v: &VectorField3, x: Point3, fd_step: f64) -> Vec3 {
    v.curl(x, fd_step)
}

pub(crate) fn curl_of_jacobian(j: &Mat3) -> Vec3 {
    [j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]]
}

/// Time envelope `g(t)` of a separable forcing term.
#[derive(Clone)]
pub struct TimeEnvelope {
    g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    zero: bool,
}

impl fmt::Debug for TimeEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TimeEnvelope(..)")
    }
}

impl TimeEnvelope {
    pub fn from_fn(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TimeEnvelope {
            g: Arc::new(g),
            zero: false,
        }
    }

    pub fn constant(c: f64) -> Self {
        TimeEnvelope {
            g: Arc::new(move |_| c),
            zero: c == 0.0,
        }
    }

    /// `exp(-rate t)`.
    pub fn exponential(rate: f64) -> Self {
        TimeEnvelope::from_fn(move |t| (-rate * t).exp())
    }

    /// `cos(omega t)`.
    pub fn cosine(omega: f64) -> Self {
        TimeEnvelope::from_fn(move |t| (omega * t).cos())
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

/// A time-dependent body force `F(t, x)`.
pub trait Forcing: Send + Sync {
    fn value(&self, t: f64, x: Point3) -> Vec3;

    fn component_value(&self, t: f64, x: Point3, component: Axis) -> f64 {
        self.value(t, x)[component.index()]
    }

    /// Closed-form `d F_component / d x_axis`, when available.
    fn analytic_partial(&self, _t: f64, _x: Point3, _component: Axis, _axis: Axis) -> Option<f64> {
        None
    }

    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Clone)]
pub struct ForcingField(Arc<dyn Forcing>);

impl fmt::Debug for ForcingField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ForcingField(..)")
    }
}

impl ForcingField {
    pub fn new(forcing: impl Forcing + 'static) -> Self {
        ForcingField(Arc::new(forcing))
    }

    pub fn zero() -> Self {
        ForcingField::new(ZeroForcing)
    }

    pub fn from_fn(f: impl Fn(f64, Point3) -> Vec3 + Send + Sync + 'static) -> Self {
        ForcingField::new(FnForcing(Box::new(f)))
    }

    /// `F(t, x) = g(t) v(x)`.
    pub fn separable(envelope: TimeEnvelope, field: VectorField3) -> Self {
        if envelope.is_zero() || field.is_zero() {
            return ForcingField::zero();
        }
        ForcingField::new(Separable { envelope, field })
    }

    pub fn value(&self, t: f64, x: Point3) -> Vec3 {
        self.0.value(t, x)
    }

    pub fn component_value(&self, t: f64, x: Point3, component: Axis) -> f64 {
        self.0.component_value(t, x, component)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn partial(&self, t: f64, x: Point3, component: Axis, axis: Axis, fd_step: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if let Some(d) = self.0.analytic_partial(t, x, component, axis) {
            return d;
        }
        fd::first_derivative_scalar(
            |s| {
                let mut y = x;
                y[axis.index()] = s;
                self.component_value(t, y, component)
            },
            x[axis.index()],
            fd_step,
        )
    }

    /// Spatial Jacobian `J[i][j] = d F_i / d x_j` at time `t`.
    pub fn jacobian(&self, t: f64, x: Point3, fd_step: f64) -> Mat3 {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| self.partial(t, x, Axis::ALL[i], Axis::ALL[j], fd_step))
        })
    }

    pub fn linear_combination(terms: &[(f64, &ForcingField)]) -> ForcingField {
        let kept: Vec<_> = terms
            .iter()
            .filter(|(c, f)| *c != 0.0 && !f.is_zero())
            .map(|(c, f)| (*c, (*f).clone()))
            .collect();
        if kept.is_empty() {
            ForcingField::zero()
        } else {
            ForcingField::new(ForcingSum(kept))
        }
    }
}

struct ZeroForcing;

impl Forcing for ZeroForcing {
    fn value(&self, _t: f64, _x: Point3) -> Vec3 {
        [0.0; 3]
    }

    fn analytic_partial(&self, _t: f64, _x: Point3, _c: Axis, _a: Axis) -> Option<f64> {
        Some(0.0)
    }

    fn is_zero(&self) -> bool {
        true
    }
}

struct FnForcing(Box<dyn Fn(f64, Point3) -> Vec3 + Send + Sync>);

impl Forcing for FnForcing {
    fn value(&self, t: f64, x: Point3) -> Vec3 {
        (self.0)(t, x)
    }
}

struct Separable {
    envelope: TimeEnvelope,
    field: VectorField3,
}

impl Forcing for Separable {
    fn value(&self, t: f64, x: Point3) -> Vec3 {
        let g = self.envelope.value(t);
        self.field.value(x).map(|v| g * v)
    }

    fn component_value(&self, t: f64, x: Point3, component: Axis) -> f64 {
        self.envelope.value(t) * self.field.component(component).value(x)
    }

    fn analytic_partial(&self, t: f64, x: Point3, component: Axis, axis: Axis) -> Option<f64> {
        self.field
            .component(component)
            .analytic_partial(x, axis, Order::First)
            .map(|d| self.envelope.value(t) * d)
    }
}

struct ForcingSum(Vec<(f64, ForcingField)>);

impl Forcing for ForcingSum {
    fn value(&self, t: f64, x: Point3) -> Vec3 {
        let mut out = [0.0; 3];
        for (c, f) in &self.0 {
            let v = f.value(t, x);
            for k in 0..3 {
                out[k] += c * v[k];
            }
        }
        out
    }

    fn component_value(&self, t: f64, x: Point3, component: Axis) -> f64 {
        self.0
            .iter()
            .map(|(c, f)| c * f.component_value(t, x, component))
            .sum()
    }

    fn analytic_partial(&self, t: f64, x: Point3, component: Axis, axis: Axis) -> Option<f64> {
        self.0
            .iter()
            .map(|(c, f)| f.0.analytic_partial(t, x, component, axis).map(|d| c * d))
            .sum()
    }
}
