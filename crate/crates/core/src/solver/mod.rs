//! Pointwise evaluation of the exact displacement.
//!
//! Component `k` solves the one-dimensional wave equation along axis `k`
//! with speed `a`, the other two coordinates frozen:
//!
//! ```text
//! u_k(t, x) = [phi_k(x + a t e_k) + phi_k(x - a t e_k)] / 2
//!           + 1/(2a) int_{x_k - a t}^{x_k + a t} psi_k(.., alpha, ..) d alpha
//!           + 1/(2a) int_0^t d tau int_{x_k - a(t - tau)}^{x_k + a(t - tau)} F_k(tau, .., alpha, ..) d alpha
//! ```
//!
//! Velocity and spatial gradient come from differentiating this formula,
//! by the Leibniz rule along axis `k` and under the integral sign across it.

mod quadrature;

pub use quadrature::{integrate_1d, integrate_1d_scaled, Quadrature, QuadratureSpec};

use crate::admissible::ProblemData;
use crate::domain::{Axis, Mat3, Material, Point3, SpacetimePoint, Tolerances, Vec3};
use crate::error::{Error, Result};
use crate::fields::Order;

/// Inner integrals of the forcing term run this much tighter than the outer one.
const INNER_TIGHTENING: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSpec {
    pub quadrature: QuadratureSpec,
    /// Step of the finite-difference fallback for data without closed-form
    /// derivatives.
    pub fd_step: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec::from_tolerances(&Tolerances::default())
    }
}

impl SolverSpec {
    pub fn from_tolerances(tol: &Tolerances) -> Self {
        SolverSpec {
            quadrature: QuadratureSpec::with_rel_tol(tol.quad_rel),
            fd_step: tol.fd_step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementSample {
    pub u: Vec3,
    pub point: SpacetimePoint,
    pub quadrature_error: f64,
}

/// Anything that can be probed as a displacement field. Verification code
/// is written against this trait so that it can be pointed at test doubles.
pub trait DisplacementModel: Sync {
    fn displacement(&self, p: SpacetimePoint) -> Result<DisplacementSample>;

    /// `dU/dt`.
    fn velocity(&self, p: SpacetimePoint) -> Result<Vec3>;

    /// `G[i][j] = d u_i / d x_j`.
    fn space_gradient(&self, p: SpacetimePoint) -> Result<Mat3>;
}

/// The exact solution for one data set and material.
#[derive(Debug, Clone)]
pub struct DalembertSolution {
    data: ProblemData,
    material: Material,
    spec: SolverSpec,
}

/// Running sum of a value and its quadrature error; remembers whether any
/// quadrature hit its panel cap.
#[derive(Debug, Default, Clone)]
struct Acc {
    value: f64,
    error: f64,
    /// Scale of the accumulated terms, `int |f|` for quadratures.
    magnitude: f64,
    failed: bool,
    fault: Option<Error>,
}

impl Acc {
    fn add(&mut self, scale: f64, q: Result<Quadrature>) {
        match q {
            Ok(q) => {
                self.value += scale * q.value;
                self.error += scale.abs() * q.error_estimate;
                self.magnitude += scale.abs() * q.magnitude;
            }
            Err(Error::NoConvergence { value, error_estimate }) => {
                self.value += scale * value;
                self.error += scale.abs() * error_estimate;
                self.magnitude += scale.abs() * (value.abs() + error_estimate);
                self.failed = true;
            }
            Err(other) => {
                self.fault.get_or_insert(other);
            }
        }
    }

    fn absorb(&mut self, other: Acc) {
        self.failed |= other.failed;
        if let Some(e) = other.fault {
            self.fault.get_or_insert(e);
        }
    }

    fn finish(self) -> Result<(f64, f64)> {
        if let Some(e) = self.fault {
            return Err(e);
        }
        if self.failed {
            Err(Error::NoConvergence {
                value: self.value,
                error_estimate: self.error,
            })
        } else {
            Ok((self.value, self.error))
        }
    }
}

fn along(x: Point3, axis: usize, s: f64) -> Point3 {
    let mut y = x;
    y[axis] = s;
    y
}

impl DalembertSolution {
    pub fn new(data: ProblemData, material: Material, spec: SolverSpec) -> Self {
        DalembertSolution { data, material, spec }
    }

    pub fn data(&self) -> &ProblemData {
        &self.data
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn spec(&self) -> &SolverSpec {
        &self.spec
    }

    /// The three-term d'Alembert formula along `axis` for generic
    /// `(initial value, initial rate, source)` functions. `source` is
    /// skipped when `None`; `rate` likewise.
    fn formula(
        &self,
        axis: usize,
        p: SpacetimePoint,
        value: impl Fn(Point3) -> f64,
        rate: Option<&dyn Fn(Point3) -> f64>,
        source: Option<&dyn Fn(f64, Point3) -> f64>,
    ) -> Result<(f64, f64)> {
        let a = self.material.wave_speed();
        let (t, x) = (p.t, p.x);
        let xk = x[axis];
        let reach = a * t;
        let mut acc = Acc {
            value: 0.5 * (value(along(x, axis, xk + reach)) + value(along(x, axis, xk - reach))),
            ..Acc::default()
        };
        if t == 0.0 {
            return acc.finish();
        }
        let quad = &self.spec.quadrature;
        if let Some(rate) = rate {
            let q = integrate_1d(|s| rate(along(x, axis, s)), xk - reach, xk + reach, quad);
            acc.add(0.5 / a, q);
        }
        if let Some(source) = source {
            let inner_spec = quad.tightened(INNER_TIGHTENING);
            let mut inner = Acc::default();
            // the outer tolerance is relative to the inner magnitudes: an
            // inner integral of an odd source is pure rounding
            let q = integrate_1d_scaled(
                |tau| {
                    let half = a * (t - tau);
                    let mut slice = Acc::default();
                    slice.add(
                        1.0,
                        integrate_1d(|s| source(tau, along(x, axis, s)), xk - half, xk + half, &inner_spec),
                    );
                    inner.error = inner.error.max(slice.error);
                    let out = (slice.value, slice.magnitude);
                    inner.absorb(slice);
                    out
                },
                0.0,
                t,
                quad,
            );
            acc.add(0.5 / a, q);
            acc.error += 0.5 / a * inner.error * t;
            acc.absorb(inner);
        }
        acc.finish()
    }

    /// `u_k(p)` with its quadrature error estimate.
    pub fn component(&self, k: Axis, p: SpacetimePoint) -> Result<(f64, f64)> {
        let i = k.index();
        let phi = self.data.phi.component(k);
        let psi = self.data.psi.component(k);
        let forcing = &self.data.forcing;
        let rate = |y: Point3| psi.value(y);
        let source = |tau: f64, y: Point3| forcing.component_value(tau, y, k);
        self.formula(
            i,
            p,
            |y| phi.value(y),
            (!psi.is_zero()).then_some(&rate as &dyn Fn(Point3) -> f64),
            (!forcing.is_zero()).then_some(&source as &dyn Fn(f64, Point3) -> f64),
        )
    }

    /// `d u_k / d x_j` for `j != k`: the same formula applied to the
    /// transverse derivatives of the data.
    fn transverse_derivative(&self, k: Axis, j: Axis, p: SpacetimePoint) -> Result<(f64, f64)> {
        let h = self.spec.fd_step;
        let phi = self.data.phi.component(k);
        let psi = self.data.psi.component(k);
        let forcing = &self.data.forcing;
        let rate = |y: Point3| psi.partial(j, Order::First, y, h);
        let source = |tau: f64, y: Point3| forcing.partial(tau, y, k, j, h);
        self.formula(
            k.index(),
            p,
            |y| if phi.is_zero() { 0.0 } else { phi.partial(j, Order::First, y, h) },
            (!psi.is_zero()).then_some(&rate as &dyn Fn(Point3) -> f64),
            (!forcing.is_zero()).then_some(&source as &dyn Fn(f64, Point3) -> f64),
        )
    }

    /// Endpoint terms produced by differentiating the formula in `t` or in
    /// `x_k`:
    ///
    /// ```text
    /// c1 [phi_k'(+) -/+ phi_k'(-)] + c2 [psi_k(+) +/- psi_k(-)] + c2 int_0^t [F_k(tau, +) +/- F_k(tau, -)] d tau
    /// ```
    ///
    /// with `phi_k'` the derivative along axis `k`.
    fn endpoint_terms(&self, k: Axis, p: SpacetimePoint, in_time: bool) -> Result<(f64, f64)> {
        let a = self.material.wave_speed();
        let h = self.spec.fd_step;
        let i = k.index();
        let (t, x) = (p.t, p.x);
        let xk = x[i];
        let reach = a * t;
        let (c_phi, c_rest, sign) = if in_time {
            (0.5 * a, 0.5, 1.0)
        } else {
            (0.5, 0.5 / a, -1.0)
        };
        let phi = self.data.phi.component(k);
        let psi = self.data.psi.component(k);
        let forcing = &self.data.forcing;

        let mut acc = Acc::default();
        if !phi.is_zero() {
            let plus = phi.partial(k, Order::First, along(x, i, xk + reach), h);
            let minus = phi.partial(k, Order::First, along(x, i, xk - reach), h);
            acc.value += c_phi * if in_time { plus - minus } else { plus + minus };
        }
        if !psi.is_zero() {
            let plus = psi.value(along(x, i, xk + reach));
            let minus = psi.value(along(x, i, xk - reach));
            acc.value += c_rest * (plus + sign * minus);
        }
        if !forcing.is_zero() && t > 0.0 {
            let q = integrate_1d_scaled(
                |tau| {
                    let half = a * (t - tau);
                    let plus = forcing.component_value(tau, along(x, i, xk + half), k);
                    let minus = forcing.component_value(tau, along(x, i, xk - half), k);
                    (plus + sign * minus, plus.abs() + minus.abs())
                },
                0.0,
                t,
                &self.spec.quadrature,
            );
            acc.add(c_rest, q);
        }
        acc.finish()
    }
}

impl DisplacementModel for DalembertSolution {
    fn displacement(&self, p: SpacetimePoint) -> Result<DisplacementSample> {
        let mut u = [0.0; 3];
        let mut err = 0.0f64;
        for k in Axis::ALL {
            let (v, e) = self.component(k, p)?;
            u[k.index()] = v;
            err = err.max(e);
        }
        Ok(DisplacementSample {
            u,
            point: p,
            quadrature_error: err,
        })
    }

    fn velocity(&self, p: SpacetimePoint) -> Result<Vec3> {
        let mut v = [0.0; 3];
        for k in Axis::ALL {
            v[k.index()] = self.endpoint_terms(k, p, true)?.0;
        }
        Ok(v)
    }

    fn space_gradient(&self, p: SpacetimePoint) -> Result<Mat3> {
        let mut g = [[0.0; 3]; 3];
        for i in Axis::ALL {
            for j in Axis::ALL {
                g[i.index()][j.index()] = if i == j {
                    self.endpoint_terms(i, p, false)?.0
                } else {
                    self.transverse_derivative(i, j, p)?.0
                };
            }
        }
        Ok(g)
    }
}

/// `u_k(p)`.
pub fn solve_component(k: Axis, data: &ProblemData, m: &Material, p: SpacetimePoint, spec: &SolverSpec) -> Result<f64> {
    DalembertSolution::new(data.clone(), *m, *spec).component(k, p).map(|(v, _)| v)
}

/// All three displacement components at `p`.
pub fn solve(data: &ProblemData, m: &Material, p: SpacetimePoint, spec: &SolverSpec) -> Result<DisplacementSample> {
    DalembertSolution::new(data.clone(), *m, *spec).displacement(p)
}

/// `dU/dt` at `p`.
pub fn time_derivative(data: &ProblemData, m: &Material, p: SpacetimePoint, spec: &SolverSpec) -> Result<Vec3> {
    DalembertSolution::new(data.clone(), *m, *spec).velocity(p)
}

/// `G[i][j] = d u_i / d x_j` at `p`.
pub fn space_gradient(data: &ProblemData, m: &Material, p: SpacetimePoint, spec: &SolverSpec) -> Result<Mat3> {
    DalembertSolution::new(data.clone(), *m, *spec).space_gradient(p)
}
