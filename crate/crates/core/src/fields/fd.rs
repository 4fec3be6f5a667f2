//! Central finite differences with one Richardson extrapolation step.
//!
//! Both stencils are second order at step `h`; combining the estimates at
//! `h` and `h/2` as `(4 D(h/2) - D(h)) / 3` cancels the `h^2` term, leaving
//! a fourth-order result.

/// First derivative of a vector-valued function of one variable.
pub fn first_derivative<const N: usize>(f: impl Fn(f64) -> [f64; N], x: f64, h: f64) -> [f64; N] {
    let d = |h: f64| {
        let (p, m) = (f(x + h), f(x - h));
        std::array::from_fn(|i| (p[i] - m[i]) / (2.0 * h))
    };
    richardson(d(h), d(0.5 * h))
}

/// Second derivative of a vector-valued function of one variable.
pub fn second_derivative<const N: usize>(
    f: impl Fn(f64) -> [f64; N],
    x: f64,
    h: f64,
) -> [f64; N] {
    let c = f(x);
    let d = |h: f64| {
        let (p, m) = (f(x + h), f(x - h));
        std::array::from_fn(|i| (p[i] - 2.0 * c[i] + m[i]) / (h * h))
    };
    richardson(d(h), d(0.5 * h))
}

pub fn first_derivative_scalar(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    first_derivative(|s| [f(s)], x, h)[0]
}

pub fn second_derivative_scalar(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    second_derivative(|s| [f(s)], x, h)[0]
}

fn richardson<const N: usize>(coarse: [f64; N], fine: [f64; N]) -> [f64; N] {
    std::array::from_fn(|i| (4.0 * fine[i] - coarse[i]) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_low_degree_polynomials() {
        let f = |x: f64| 2.0 * x.powi(3) - x * x + 4.0;
        let d1 = first_derivative_scalar(f, 1.5, 1e-2);
        assert!((d1 - (6.0 * 2.25 - 3.0)).abs() < 1e-11);
        let d2 = second_derivative_scalar(f, 1.5, 1e-2);
        assert!((d2 - (12.0 * 1.5 - 2.0)).abs() < 1e-8);
    }

    #[test]
    fn fourth_order_convergence() {
        let f = |x: f64| x.sin();
        let err = |h| (first_derivative_scalar(f, 0.7, h) - 0.7f64.cos()).abs();
        let ratio = err(0.2) / err(0.1);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }
}
