//! Deterministic quasi-random sampling of boxes (Halton bases 2, 3, 5).

use crate::domain::Point3;

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while index > 0 {
        f /= b;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// `count` Halton points in the box `[lo, hi]`, starting after `offset`.
pub fn halton_box(lo: Point3, hi: Point3, count: usize, offset: u64) -> Vec<Point3> {
    const BASES: [u64; 3] = [2, 3, 5];
    (0..count as u64)
        .map(|i| {
            let idx = offset + i + 1;
            std::array::from_fn(|k| lo[k] + (hi[k] - lo[k]) * halton(idx, BASES[k]))
        })
        .collect()
}

/// Halton points plus the 8 box corners, and the origin when it lies in the
/// box. Corners and origin come first.
pub fn box_samples(lo: Point3, hi: Point3, count: usize, offset: u64) -> Vec<Point3> {
    let mut pts = Vec::with_capacity(count + 9);
    if (0..3).all(|k| lo[k] <= 0.0 && 0.0 <= hi[k]) {
        pts.push([0.0; 3]);
    }
    for c in 0..8 {
        pts.push(std::array::from_fn(|k| if c >> k & 1 == 0 { lo[k] } else { hi[k] }));
    }
    pts.extend(halton_box(lo, hi, count, offset));
    pts
}

/// `count` Halton points `(t, x)` in `[t_lo, t_hi] x [lo, hi]`; time uses
/// base 7.
pub fn halton_spacetime(lo: Point3, hi: Point3, t_lo: f64, t_hi: f64, count: usize, offset: u64) -> Vec<(f64, Point3)> {
    halton_box(lo, hi, count, offset)
        .into_iter()
        .enumerate()
        .map(|(i, x)| (t_lo + (t_hi - t_lo) * halton(offset + i as u64 + 1, 7), x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_values() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-16);
        assert!((halton(4, 5) - 0.8).abs() < 1e-16);
    }

    #[test]
    fn points_stay_in_box() {
        let lo = [-1.0, 0.0, 2.0];
        let hi = [1.0, 0.5, 3.0];
        let pts = box_samples(lo, hi, 100, 7);
        assert_eq!(pts.len(), 108);
        for p in pts {
            for k in 0..3 {
                assert!(lo[k] <= p[k] && p[k] <= hi[k]);
            }
        }
        let with_origin = box_samples([-1.0; 3], [1.0; 3], 3, 0);
        assert_eq!(with_origin[0], [0.0; 3]);
        assert_eq!(with_origin.len(), 12);
    }

    #[test]
    fn deterministic() {
        assert_eq!(halton_box([0.0; 3], [1.0; 3], 20, 3), halton_box([0.0; 3], [1.0; 3], 20, 3));
    }
}
