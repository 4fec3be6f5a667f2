//! Sample evaluation and the two export formats: CSV with a header row and
//! legacy VTK structured points (ASCII).

use std::io::{self, Write};

use rayon::prelude::*;

use elasto_core::stress::stress_of_model;
use elasto_core::{Axis, DalembertSolution, DisplacementModel, Material, Point3, Result, SpacetimePoint, Vec3};

use crate::config::SliceSpec;

/// Displacement and, optionally, stress at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub point: SpacetimePoint,
    pub u: Vec3,
    /// `[tau11, tau22, tau33, tau12, tau13, tau23]`
    pub stress: Option<[f64; 6]>,
}

/// Evaluates `model` at every point, in order.
pub fn evaluate(model: &DalembertSolution, m: &Material, points: &[SpacetimePoint], with_stress: bool) -> Result<Vec<Sample>> {
    points
        .par_iter()
        .map(|&p| {
            let u = model.displacement(p)?.u;
            let stress = if with_stress {
                Some(stress_of_model(model, m, p)?.voigt())
            } else {
                None
            };
            Ok(Sample { point: p, u, stress })
        })
        .collect()
}

/// A plane of samples. `values` is row-major with the first in-plane axis
/// fastest and `components` entries per node.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSlice {
    pub spec: SliceSpec,
    pub time: f64,
    pub components: usize,
    pub values: Vec<f64>,
}

impl FieldSlice {
    pub fn from_samples(spec: SliceSpec, time: f64, samples: &[Sample]) -> FieldSlice {
        let with_stress = samples.first().is_some_and(|s| s.stress.is_some());
        let components = if with_stress { 9 } else { 3 };
        let mut values = Vec::with_capacity(samples.len() * components);
        for s in samples {
            values.extend_from_slice(&s.u);
            if let Some(tau) = s.stress {
                values.extend_from_slice(&tau);
            }
        }
        FieldSlice {
            spec,
            time,
            components,
            values,
        }
    }

    pub fn node_count(&self) -> usize {
        self.spec.resolution[0] * self.spec.resolution[1]
    }
}

/// The two axes spanning a plane normal to `axis`, in increasing order.
pub fn in_plane_axes(axis: Axis) -> [Axis; 2] {
    match axis {
        Axis::X1 => [Axis::X2, Axis::X3],
        Axis::X2 => [Axis::X1, Axis::X3],
        Axis::X3 => [Axis::X1, Axis::X2],
    }
}

fn lerp(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

pub fn slice_points(spec: &SliceSpec) -> Vec<Point3> {
    let [a, b] = in_plane_axes(spec.axis);
    let [na, nb] = spec.resolution;
    let mut out = Vec::with_capacity(na * nb);
    for j in 0..nb {
        for i in 0..na {
            let mut x = [0.0; 3];
            x[spec.axis.index()] = spec.offset;
            x[a.index()] = lerp(spec.lo[0], spec.hi[0], i, na);
            x[b.index()] = lerp(spec.lo[1], spec.hi[1], j, nb);
            out.push(x);
        }
    }
    out
}

/// Nodes of an `n^3` lattice over the box, first axis fastest.
pub fn volume_points(lo: Point3, hi: Point3, n: usize) -> Vec<Point3> {
    let mut out = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                out.push([lerp(lo[0], hi[0], i, n), lerp(lo[1], hi[1], j, n), lerp(lo[2], hi[2], k, n)]);
            }
        }
    }
    out
}

pub const CSV_HEADER: &str = "t,x1,x2,x3,u1,u2,u3";
pub const CSV_STRESS_HEADER: &str = ",tau11,tau22,tau33,tau12,tau13,tau23";

pub fn write_csv(w: &mut impl Write, samples: &[Sample]) -> io::Result<()> {
    let with_stress = samples.first().is_some_and(|s| s.stress.is_some());
    write!(w, "{CSV_HEADER}")?;
    if with_stress {
        write!(w, "{CSV_STRESS_HEADER}")?;
    }
    writeln!(w)?;
    for s in samples {
        let p = s.point;
        write!(w, "{:e},{:e},{:e},{:e},{:e},{:e},{:e}", p.t, p.x[0], p.x[1], p.x[2], s.u[0], s.u[1], s.u[2])?;
        if let Some(tau) = s.stress {
            for v in tau {
                write!(w, ",{v:e}")?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Geometry of a structured-points data set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub dims: [usize; 3],
    pub origin: Point3,
    pub spacing: [f64; 3],
}

impl Lattice {
    pub fn volume(lo: Point3, hi: Point3, n: usize) -> Lattice {
        Lattice {
            dims: [n; 3],
            origin: lo,
            spacing: std::array::from_fn(|a| (hi[a] - lo[a]) / (n - 1) as f64),
        }
    }

    /// A one-node-thick lattice for a slice; the normal spacing is 1.
    pub fn slice(spec: &SliceSpec) -> Lattice {
        let [a, b] = in_plane_axes(spec.axis);
        let mut dims = [1; 3];
        let mut origin = [0.0; 3];
        let mut spacing = [1.0; 3];
        origin[spec.axis.index()] = spec.offset;
        for (k, ax) in [a, b].into_iter().enumerate() {
            let i = ax.index();
            dims[i] = spec.resolution[k];
            origin[i] = spec.lo[k];
            spacing[i] = (spec.hi[k] - spec.lo[k]) / (spec.resolution[k] - 1) as f64;
        }
        Lattice { dims, origin, spacing }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Writes displacement as `VECTORS` and, when present, stress as a full
/// symmetric `TENSORS` field. Samples must follow the lattice order.
pub fn write_vtk(w: &mut impl Write, title: &str, lattice: &Lattice, samples: &[Sample]) -> io::Result<()> {
    if samples.len() != lattice.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{} samples for a lattice of {} points", samples.len(), lattice.len()),
        ));
    }
    let [nx, ny, nz] = lattice.dims;
    let [ox, oy, oz] = lattice.origin;
    let [sx, sy, sz] = lattice.spacing;
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {nx} {ny} {nz}")?;
    writeln!(w, "ORIGIN {ox:e} {oy:e} {oz:e}")?;
    writeln!(w, "SPACING {sx:e} {sy:e} {sz:e}")?;
    writeln!(w, "POINT_DATA {}", lattice.len())?;
    writeln!(w, "VECTORS displacement double")?;
    for s in samples {
        writeln!(w, "{:e} {:e} {:e}", s.u[0], s.u[1], s.u[2])?;
    }
    if samples.first().is_some_and(|s| s.stress.is_some()) {
        writeln!(w, "TENSORS stress double")?;
        for s in samples {
            let [t11, t22, t33, t12, t13, t23] = s.stress.unwrap_or([0.0; 6]);
            writeln!(w, "{t11:e} {t12:e} {t13:e}")?;
            writeln!(w, "{t12:e} {t22:e} {t23:e}")?;
            writeln!(w, "{t13:e} {t23:e} {t33:e}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: f64, x: Point3, u: Vec3) -> Sample {
        Sample {
            point: SpacetimePoint { t, x },
            u,
            stress: None,
        }
    }

    #[test]
    fn csv_has_header_and_scientific_numbers() {
        let mut out = Vec::new();
        write_csv(&mut out, &[sample(0.5, [1.0, -2.0, 0.0], [0.25, 0.0, -1e-3])]).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "t,x1,x2,x3,u1,u2,u3\n5e-1,1e0,-2e0,0e0,2.5e-1,0e0,-1e-3\n");
    }

    #[test]
    fn csv_with_stress_has_twelve_columns() {
        let mut s = sample(0.0, [0.0; 3], [0.0; 3]);
        s.stress = Some([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let mut out = Vec::new();
        write_csv(&mut out, &[s]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0].split(',').count(), 13);
        assert_eq!(lines[1].split(',').count(), 13);
        assert!(lines[0].ends_with("tau23"));
    }

    #[test]
    fn slice_points_follow_the_plane() {
        let spec = SliceSpec {
            axis: Axis::X2,
            offset: 0.5,
            resolution: [3, 2],
            lo: [-1.0, 0.0],
            hi: [1.0, 2.0],
        };
        let pts = slice_points(&spec);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], [-1.0, 0.5, 0.0]);
        assert_eq!(pts[1], [0.0, 0.5, 0.0]);
        assert_eq!(pts[5], [1.0, 0.5, 2.0]);
        let lattice = Lattice::slice(&spec);
        assert_eq!(lattice.dims, [3, 1, 2]);
        assert_eq!(lattice.spacing, [1.0, 1.0, 2.0]);
    }

    #[test]
    fn vtk_layout() {
        let lattice = Lattice::volume([0.0; 3], [1.0; 3], 2);
        let samples: Vec<Sample> = volume_points([0.0; 3], [1.0; 3], 2)
            .into_iter()
            .map(|x| sample(0.0, x, x))
            .collect();
        let mut out = Vec::new();
        write_vtk(&mut out, "test", &lattice, &samples).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[3], "DATASET STRUCTURED_POINTS");
        assert_eq!(lines[4], "DIMENSIONS 2 2 2");
        assert_eq!(lines[7], "POINT_DATA 8");
        assert_eq!(lines[9], "0e0 0e0 0e0");
        assert_eq!(lines[10], "1e0 0e0 0e0");
        assert_eq!(lines.len(), 9 + 8);
        assert!(write_vtk(&mut Vec::new(), "x", &lattice, &samples[..3]).is_err());
    }
}
