//! Composite 7-point Gauss-Legendre quadrature with panel doubling.

use crate::error::{Error, Result};

/// Nodes of the 7-point Gauss-Legendre rule on `[-1, 1]`.
const NODES: [f64; 7] = [
    -0.949_107_912_342_758_5,
    -0.741_531_185_599_394_4,
    -0.405_845_151_377_397_2,
    0.0,
    0.405_845_151_377_397_2,
    0.741_531_185_599_394_4,
    0.949_107_912_342_758_5,
];

const WEIGHTS: [f64; 7] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_7,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Stop once successive estimates differ by less than this, relative to
    /// the integral of `|f|`.
    pub rel_tol: f64,
    pub max_panel_doublings: u32,
    pub base_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            max_panel_doublings: 12,
            base_panels: 4,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..QuadratureSpec::default()
        }
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                reason: format!("must lie in (0, 1), got {}", self.rel_tol),
            });
        }
        if self.base_panels < 2 {
            return Err(Error::InvalidParameter {
                name: "base_panels",
                reason: format!("must be at least 2, got {}", self.base_panels),
            });
        }
        if self.max_panel_doublings < 1 || self.max_panel_doublings > 30 {
            return Err(Error::InvalidParameter {
                name: "max_panel_doublings",
                reason: format!("must lie in 1..=30, got {}", self.max_panel_doublings),
            });
        }
        Ok(self)
    }

    /// Same schedule with the tolerance tightened by `factor`.
    pub(crate) fn tightened(self, factor: f64) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol / factor,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Difference between the last two panel levels.
    pub error_estimate: f64,
    /// Estimate of `int |f|`, the scale the tolerance is relative to.
    pub magnitude: f64,
    pub panels: usize,
}

/// `(sum f w, sum m w)` on `panels` equal panels, where `f` returns the
/// pair `(f, m)`.
fn composite(f: &mut impl FnMut(f64) -> (f64, f64), lo: f64, hi: f64, panels: usize) -> (f64, f64) {
    let width = (hi - lo) / panels as f64;
    let half = 0.5 * width;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * width;
        let mut panel = 0.0;
        let mut panel_abs = 0.0;
        for (x, w) in NODES.iter().zip(WEIGHTS) {
            let (y, m) = f(mid + half * x);
            panel += w * y;
            panel_abs += w * m;
        }
        sum += panel * half;
        abs_sum += panel_abs * half;
    }
    (sum, abs_sum)
}

/// `int_lo^hi f`. Panels double from `spec.base_panels` until successive
/// estimates agree to `spec.rel_tol`; a zero-length interval returns exactly
/// zero without evaluating `f`. Reversed bounds flip the sign.
///
/// Fails with [`Error::NoConvergence`] when the cap is reached with the
/// difference still above `10 * rel_tol`; the error carries the last value.
pub fn integrate_1d(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    integrate_1d_scaled(
        |s| {
            let y = f(s);
            (y, y.abs())
        },
        lo,
        hi,
        spec,
    )
}

/// Like [`integrate_1d`], but `f` returns `(value, magnitude)` and the
/// tolerance is relative to `int magnitude` instead of `int |value|`.
///
/// Integrands that are themselves results of cancellation (differences of
/// nearly equal terms, or inner integrals of odd functions) need this: their
/// absolute values are rounding noise and carry no scale.
pub fn integrate_1d_scaled(
    mut f: impl FnMut(f64) -> (f64, f64),
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::Precondition("integration bounds must not be NaN".into()));
    }
    if lo == hi {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            magnitude: 0.0,
            panels: 0,
        });
    }
    if lo > hi {
        return integrate_1d_scaled(f, hi, lo, spec).map(|q| Quadrature { value: -q.value, ..q });
    }

    let mut panels = spec.base_panels.max(1);
    let (mut prev, _) = composite(&mut f, lo, hi, panels);
    let mut diff = f64::INFINITY;
    let mut scale = 0.0;
    for _ in 0..spec.max_panel_doublings {
        panels *= 2;
        let (value, abs) = composite(&mut f, lo, hi, panels);
        diff = (value - prev).abs();
        scale = abs;
        prev = value;
        if diff <= spec.rel_tol * scale {
            return Ok(Quadrature {
                value,
                error_estimate: diff,
                magnitude: scale,
                panels,
            });
        }
    }
    if diff <= 10.0 * spec.rel_tol * scale {
        Ok(Quadrature {
            value: prev,
            error_estimate: diff,
            magnitude: scale,
            panels,
        })
    } else {
        Err(Error::NoConvergence {
            value: prev,
            error_estimate: diff,
        })
    }
}
