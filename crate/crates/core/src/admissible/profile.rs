//! Catalog of one-dimensional profiles used to build ridge data.
//!
//! Every catalog entry has the form
//!
//! ```text
//! f(s) = [P(u) sin(k v) + Q(u) cos(k v)] exp(-u^2),   v = s - s0,  u = v / sigma
//! ```
//!
//! with polynomials `P`, `Q`. That family is closed under differentiation,
//! so derivatives of every order are exact.

use crate::error::{Error, Result};
use crate::fields::{Profile, ScalarProfile};

/// Derivative orders precomputed at construction.
const CACHED_ORDERS: usize = 6;

/// Names accepted by [`CatalogProfile::by_name`].
pub const PROFILE_NAMES: [&str; 4] = ["gaussian", "derivative_of_gaussian", "sine_gaussian", "poly_gaussian"];

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogProfile {
    sigma: f64,
    center: f64,
    wavenumber: f64,
    /// `(P, Q)` coefficient lists (ascending powers of `u`) for derivative
    /// orders `0..CACHED_ORDERS`.
    derivatives: Vec<(Vec<f64>, Vec<f64>)>,
}

impl CatalogProfile {
    /// `exp(-((s - center) / sigma)^2)`.
    pub fn gaussian(sigma: f64, center: f64) -> Result<Self> {
        Self::build(sigma, center, 0.0, vec![], vec![1.0])
    }

    /// First derivative of [`CatalogProfile::gaussian`] with the same parameters.
    pub fn derivative_of_gaussian(sigma: f64, center: f64) -> Result<Self> {
        Self::build(sigma, center, 0.0, vec![], vec![0.0, -2.0 / sigma])
    }

    /// `sin(k (s - center)) exp(-((s - center) / sigma)^2)`.
    pub fn sine_gaussian(wavenumber: f64, sigma: f64, center: f64) -> Result<Self> {
        if !wavenumber.is_finite() {
            return Err(invalid("wavenumber", wavenumber));
        }
        Self::build(sigma, center, wavenumber, vec![1.0], vec![])
    }

    /// `(c0 + c1 u + ... + c4 u^4) exp(-u^2)` with `u = (s - center) / sigma`.
    pub fn poly_gaussian(coefficients: &[f64], sigma: f64, center: f64) -> Result<Self> {
        if coefficients.len() > 5 {
            return Err(Error::InvalidParameter {
                name: "coefficients",
                reason: format!("polynomial degree at most 4, got {}", coefficients.len() - 1),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "coefficients",
                reason: "must be finite".into(),
            });
        }
        Self::build(sigma, center, 0.0, vec![], coefficients.to_vec())
    }

    fn build(sigma: f64, center: f64, wavenumber: f64, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(invalid("sigma", sigma));
        }
        if !center.is_finite() {
            return Err(invalid("center", center));
        }
        let mut derivatives = Vec::with_capacity(CACHED_ORDERS);
        derivatives.push((p, q));
        while derivatives.len() < CACHED_ORDERS {
            let (p, q) = derivatives.last().unwrap();
            derivatives.push(differentiate(p, q, sigma, wavenumber));
        }
        Ok(CatalogProfile {
            sigma,
            center,
            wavenumber,
            derivatives,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn eval(&self, p: &[f64], q: &[f64], s: f64) -> f64 {
        let v = s - self.center;
        let u = v / self.sigma;
        let envelope = (-u * u).exp();
        if envelope == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        if !p.is_empty() && self.wavenumber != 0.0 {
            acc += horner(p, u) * (self.wavenumber * v).sin();
        }
        if !q.is_empty() {
            acc += horner(q, u) * (self.wavenumber * v).cos();
        }
        acc * envelope
    }

    pub fn into_profile(self) -> ScalarProfile {
        ScalarProfile::new(self)
    }
}

impl Profile for CatalogProfile {
    fn value(&self, s: f64) -> f64 {
        let (p, q) = &self.derivatives[0];
        self.eval(p, q, s)
    }

    fn analytic_derivative(&self, s: f64, order: u32) -> Option<f64> {
        let order = order as usize;
        if let Some((p, q)) = self.derivatives.get(order) {
            return Some(self.eval(p, q, s));
        }
        let (mut p, mut q) = self.derivatives.last().cloned().unwrap();
        for _ in CACHED_ORDERS - 1..order {
            (p, q) = differentiate(&p, &q, self.sigma, self.wavenumber);
        }
        Some(self.eval(&p, &q, s))
    }
}

fn invalid(name: &'static str, v: f64) -> Error {
    Error::InvalidParameter {
        name,
        reason: format!("got {v}"),
    }
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * u + ci)
}

/// `d/du` of a polynomial.
fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| i as f64 * ci)
        .collect()
}

/// `a + scale * b` on coefficient lists of possibly different length.
fn axpy(a: &[f64], scale: f64, b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(0.0) + scale * b.get(i).copied().unwrap_or(0.0))
        .collect()
}

/// `u * c`.
fn shift_up(c: &[f64]) -> Vec<f64> {
    if c.is_empty() {
        return vec![];
    }
    std::iter::once(0.0).chain(c.iter().copied()).collect()
}

/// `d/ds` of `[P sin(kv) + Q cos(kv)] exp(-u^2)`:
/// `P -> (P' - 2uP)/sigma - kQ`, `Q -> (Q' - 2uQ)/sigma + kP`.
fn differentiate(p: &[f64], q: &[f64], sigma: f64, k: f64) -> (Vec<f64>, Vec<f64>) {
    let part = |c: &[f64]| {
        axpy(&poly_derivative(c), -2.0, &shift_up(c))
            .into_iter()
            .map(|x| x / sigma)
            .collect::<Vec<_>>()
    };
    let mut np = part(p);
    let mut nq = part(q);
    if k != 0.0 {
        np = axpy(&np, -k, q);
        nq = axpy(&nq, k, p);
    }
    (np, nq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::fd;

    fn all_catalog() -> Vec<CatalogProfile> {
        vec![
            CatalogProfile::gaussian(1.0, 0.0).unwrap(),
            CatalogProfile::gaussian(0.7, 0.3).unwrap(),
            CatalogProfile::derivative_of_gaussian(1.3, -0.2).unwrap(),
            CatalogProfile::sine_gaussian(2.0, 0.9, 0.1).unwrap(),
            CatalogProfile::poly_gaussian(&[1.0, -0.5, 0.25, 0.0, 0.1], 1.1, 0.0).unwrap(),
        ]
    }

    #[test]
    fn gaussian_closed_forms() {
        let g = CatalogProfile::gaussian(1.0, 0.0).unwrap();
        let e = (-1.0f64).exp();
        assert_eq!(g.value(0.0), 1.0);
        assert!((g.analytic_derivative(1.0, 1).unwrap() + 2.0 * e).abs() < 1e-15);
        assert!((g.analytic_derivative(-1.0, 1).unwrap() - 2.0 * e).abs() < 1e-15);
        assert_eq!(g.analytic_derivative(0.0, 2).unwrap(), -2.0);
        // f''' = (12 s - 8 s^3) exp(-s^2)
        assert!((g.analytic_derivative(0.5, 3).unwrap() - 5.0 * (-0.25f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_gaussian_matches_gaussian_derivative() {
        let g = CatalogProfile::gaussian(1.3, -0.2).unwrap();
        let dg = CatalogProfile::derivative_of_gaussian(1.3, -0.2).unwrap();
        for s in [-2.0, -0.5, 0.0, 0.4, 1.9] {
            let a = g.analytic_derivative(s, 1).unwrap();
            assert!((a - dg.value(s)).abs() < 1e-15);
            let a3 = g.analytic_derivative(s, 3).unwrap();
            assert!((a3 - dg.analytic_derivative(s, 2).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        for p in all_catalog() {
            for order in 1..=7u32 {
                for s in [-1.7, -0.4, 0.05, 0.8, 2.3] {
                    let analytic = p.analytic_derivative(s, order).unwrap();
                    let lower = |r: f64| p.analytic_derivative(r, order - 1).unwrap();
                    let numeric = fd::first_derivative_scalar(lower, s, 1e-3);
                    let scale = 1.0 + analytic.abs();
                    assert!(
                        (analytic - numeric).abs() < 1e-7 * scale * 10f64.powi(order as i32 / 2),
                        "{p:?} order {order} at {s}: {analytic} vs {numeric}"
                    );
                }
            }
        }
    }

    #[test]
    fn catalog_decays() {
        for p in all_catalog() {
            for order in 0..4 {
                assert!(p.analytic_derivative(12.0, order).unwrap().abs() < 1e-30);
                assert!(p.analytic_derivative(-12.0, order).unwrap().abs() < 1e-30);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CatalogProfile::gaussian(0.0, 0.0).is_err());
        assert!(CatalogProfile::gaussian(-1.0, 0.0).is_err());
        assert!(CatalogProfile::poly_gaussian(&[1.0; 6], 1.0, 0.0).is_err());
        assert!(CatalogProfile::sine_gaussian(f64::NAN, 1.0, 0.0).is_err());
    }
}
