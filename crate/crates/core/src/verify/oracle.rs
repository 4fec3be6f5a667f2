use rayon::prelude::*;

use crate::admissible::ProblemData;
use crate::domain::{Material, Point3, SpacetimePoint, Vec3};
use crate::error::{Error, Result};
use crate::solver::DisplacementModel;

/// Largest admissible CFL factor.
pub const MAX_CFL: f64 = 0.9;

/// Fields below this fraction of their peak count as zero for the
/// support check.
const SUPPORT_THRESHOLD: f64 = 1e-10;

/// A uniform grid on a box with `n` cells per axis and a fixed time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: Point3,
    pub hi: Point3,
    pub n: usize,
    pub dt: f64,
    pub steps: usize,
    pub cfl: f64,
}

impl GridSpec {
    /// Largest stable step for the leapfrog scheme on this grid:
    /// `cfl * h_min / (c_p sqrt 3)`.
    pub fn max_dt(&self, m: &Material) -> f64 {
        let h = self.spacing();
        let h_min = h[0].min(h[1]).min(h[2]);
        self.cfl * h_min / (m.p_wave_speed() * 3f64.sqrt())
    }

    /// Smallest number of equal steps reaching `final_time` under the CFL
    /// limit.
    pub fn for_final_time(lo: Point3, hi: Point3, n: usize, final_time: f64, m: &Material, cfl: f64) -> Result<GridSpec> {
        if !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::InvalidParameter {
                name: "final_time",
                reason: format!("must be positive, got {final_time}"),
            });
        }
        let probe = GridSpec { lo, hi, n, dt: 1.0, steps: 1, cfl };
        probe.check_geometry()?;
        let steps = (final_time / probe.max_dt(m) * (1.0 + 1e-12)).ceil().max(1.0) as usize;
        let grid = GridSpec {
            dt: final_time / steps as f64,
            steps,
            ..probe
        };
        grid.validated(m)
    }

    /// `levels` grids, each with twice the cells and twice the steps of
    /// the previous one, so `dt / h` is the same on every level.
    pub fn refinement_ladder(lo: Point3, hi: Point3, n0: usize, levels: usize, final_time: f64, m: &Material, cfl: f64) -> Result<Vec<GridSpec>> {
        let base = GridSpec::for_final_time(lo, hi, n0, final_time, m, cfl)?;
        (0..levels)
            .map(|l| {
                let f = 1usize << l;
                GridSpec {
                    n: base.n * f,
                    steps: base.steps * f,
                    dt: final_time / (base.steps * f) as f64,
                    ..base
                }
                .validated(m)
            })
            .collect()
    }

    fn check_geometry(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter {
                name: "grid.n",
                reason: format!("need at least 2 cells per axis, got {}", self.n),
            });
        }
        for i in 0..3 {
            if !(self.lo[i] < self.hi[i]) || !self.lo[i].is_finite() || !self.hi[i].is_finite() {
                return Err(Error::InvalidParameter {
                    name: "grid.lo",
                    reason: format!("need lo < hi on every axis, got {:?} and {:?}", self.lo, self.hi),
                });
            }
        }
        if !(self.cfl > 0.0 && self.cfl <= MAX_CFL) {
            return Err(Error::InvalidParameter {
                name: "grid.cfl",
                reason: format!("must lie in (0, {MAX_CFL}], got {}", self.cfl),
            });
        }
        Ok(())
    }

    pub fn validated(self, m: &Material) -> Result<GridSpec> {
        self.check_geometry()?;
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter {
                name: "grid.dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        let max_dt = self.max_dt(m);
        if self.dt > max_dt * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt: self.dt, max_dt });
        }
        Ok(self)
    }

    pub fn spacing(&self) -> [f64; 3] {
        std::array::from_fn(|i| (self.hi[i] - self.lo[i]) / self.n as f64)
    }

    /// Nodes per axis.
    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Displacement at the nodes of a grid at one time. Nodes are stored with
/// the first index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: GridSpec,
    pub time: f64,
    pub values: Vec<Vec3>,
}

impl GridField {
    fn zeros(grid: GridSpec, time: f64) -> Self {
        let n = grid.nodes();
        GridField {
            grid,
            time,
            values: vec![[0.0; 3]; n * n * n],
        }
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.grid.nodes();
        i + n * (j + n * k)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.values[self.index(i, j, k)]
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> Point3 {
        node_position(&self.grid, [i, j, k])
    }

    /// `(position, value)` for every node.
    pub fn iter(&self) -> impl Iterator<Item = (Point3, Vec3)> + '_ {
        let n = self.grid.nodes();
        self.values
            .iter()
            .enumerate()
            .map(move |(idx, v)| (node_position(&self.grid, [idx % n, (idx / n) % n, idx / (n * n)]), *v))
    }
}

fn node_position(grid: &GridSpec, ijk: [usize; 3]) -> Point3 {
    let h = grid.spacing();
    std::array::from_fn(|a| {
        if ijk[a] == grid.n {
            grid.hi[a]
        } else {
            grid.lo[a] + ijk[a] as f64 * h[a]
        }
    })
}

fn on_boundary(n: usize, ijk: [usize; 3]) -> bool {
    ijk.iter().any(|&c| c == 0 || c == n)
}

/// What the oracle imposes on the outer layer of nodes.
#[derive(Clone, Copy)]
pub enum Boundary<'a> {
    /// Zero displacement. Only meaningful while waves stay inside the box,
    /// so the data must be negligible near the boundary.
    ZeroClamped,
    /// Values taken from a displacement model at each step.
    Prescribed(&'a dyn DisplacementModel),
}

impl std::fmt::Debug for Boundary<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::ZeroClamped => f.write_str("ZeroClamped"),
            Boundary::Prescribed(_) => f.write_str("Prescribed"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OracleOptions {
    /// Keep the field every this many steps (and the last one).
    pub snapshot_every: Option<usize>,
    /// Record the discrete energy after every step.
    pub record_energy: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub last: GridField,
    pub snapshots: Vec<GridField>,
    /// Energy between consecutive levels, `E[n]` between steps `n` and
    /// `n + 1`. Conserved up to rounding for unforced runs with clamped
    /// boundaries.
    pub energy: Vec<f64>,
}

/// Samples a displacement model at every node.
pub fn sample_model(model: &dyn DisplacementModel, grid: &GridSpec, t: f64) -> Result<GridField> {
    let mut field = GridField::zeros(*grid, t);
    let n = grid.nodes();
    field
        .values
        .par_iter_mut()
        .enumerate()
        .try_for_each(|(idx, v)| {
            let x = node_position(grid, [idx % n, (idx / n) % n, idx / (n * n)]);
            *v = model.displacement(SpacetimePoint { t, x })?.u;
            Ok::<(), Error>(())
        })?;
    Ok(field)
}

fn sample_fields(grid: &GridSpec, f: impl Fn(Point3) -> Vec3 + Sync) -> Vec<Vec3> {
    let n = grid.nodes();
    (0..n * n * n)
        .into_par_iter()
        .map(|idx| f(node_position(grid, [idx % n, (idx / n) % n, idx / (n * n)])))
        .collect()
}

fn check_support(data: &ProblemData, m: &Material, grid: &GridSpec, phi: &[Vec3], psi: &[Vec3]) -> Result<()> {
    let n = grid.nodes();
    let magnitude = |v: &Vec3| v.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let force0 = sample_fields(grid, |x| data.forcing.value(0.0, x));
    let peak = phi
        .iter()
        .chain(psi)
        .chain(&force0)
        .map(magnitude)
        .fold(0.0f64, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let threshold = SUPPORT_THRESHOLD * peak;
    let centre: Point3 = std::array::from_fn(|a| 0.5 * (grid.lo[a] + grid.hi[a]));
    let half_width = (0..3).map(|a| 0.5 * (grid.hi[a] - grid.lo[a])).fold(f64::INFINITY, f64::min);
    let mut radius = 0.0f64;
    for idx in 0..n * n * n {
        let ijk = [idx % n, (idx / n) % n, idx / (n * n)];
        let big = [&phi[idx], &psi[idx], &force0[idx]].iter().any(|v| magnitude(v) > threshold);
        if !big {
            continue;
        }
        let x = node_position(grid, ijk);
        if on_boundary(grid.n, ijk) {
            return Err(Error::SupportViolation(format!(
                "initial data reach {:e} at boundary node ({}, {}, {}), above {SUPPORT_THRESHOLD:e} of the peak {peak:e}",
                magnitude(&phi[idx]).max(magnitude(&psi[idx])).max(magnitude(&force0[idx])),
                x[0],
                x[1],
                x[2]
            )));
        }
        let r = (0..3).map(|a| (x[a] - centre[a]).abs()).fold(0.0f64, f64::max);
        radius = radius.max(r);
    }
    let h = grid.spacing();
    let margin = 2.0 * h[0].max(h[1]).max(h[2]);
    let reach = radius + m.p_wave_speed() * grid.final_time() + margin;
    if reach > half_width {
        return Err(Error::SupportViolation(format!(
            "data extend to {radius} from the centre; waves travel {} by t = {}, past the half-width {half_width}",
            m.p_wave_speed() * grid.final_time(),
            grid.final_time()
        )));
    }
    Ok(())
}

/// `(mu Lap_h U + (lambda + mu) grad_h div_h U) / rho + F(t)` at interior
/// nodes, zero on the boundary.
fn acceleration(data: &ProblemData, m: &Material, grid: &GridSpec, u: &[Vec3], t: f64, out: &mut [Vec3]) {
    let n = grid.nodes();
    let h = grid.spacing();
    let (rho, lambda, mu) = (m.rho(), m.lambda(), m.mu());
    let stride = [1, n, n * n];
    let forced = !data.forcing.is_zero();
    out.par_chunks_mut(n * n).enumerate().for_each(|(k, slab)| {
        for j in 0..n {
            for i in 0..n {
                let ijk = [i, j, k];
                let local = i + n * j;
                if on_boundary(grid.n, ijk) {
                    slab[local] = [0.0; 3];
                    continue;
                }
                let c = i + n * (j + n * k);
                // d[a][b][comp] = d_a d_b U_comp
                let mut d = [[[0.0; 3]; 3]; 3];
                for a in 0..3 {
                    let (p, q) = (c + stride[a], c - stride[a]);
                    for comp in 0..3 {
                        d[a][a][comp] = (u[p][comp] - 2.0 * u[c][comp] + u[q][comp]) / (h[a] * h[a]);
                    }
                    for b in a + 1..3 {
                        let (sa, sb) = (stride[a], stride[b]);
                        for comp in 0..3 {
                            let v = (u[c + sa + sb][comp] - u[c + sa - sb][comp] - u[c - sa + sb][comp]
                                + u[c - sa - sb][comp])
                                / (4.0 * h[a] * h[b]);
                            d[a][b][comp] = v;
                            d[b][a][comp] = v;
                        }
                    }
                }
                let force = if forced {
                    data.forcing.value(t, node_position(grid, ijk))
                } else {
                    [0.0; 3]
                };
                slab[local] = std::array::from_fn(|comp| {
                    let lap = d[0][0][comp] + d[1][1][comp] + d[2][2][comp];
                    let grad_div = d[comp][0][0] + d[comp][1][1] + d[comp][2][2];
                    (mu * lap + (lambda + mu) * grad_div) / rho + force[comp]
                });
            }
        }
    });
}

fn apply_boundary(boundary: &Boundary<'_>, grid: &GridSpec, t: f64, u: &mut [Vec3]) -> Result<()> {
    let n = grid.nodes();
    u.par_iter_mut().enumerate().try_for_each(|(idx, v)| {
        let ijk = [idx % n, (idx / n) % n, idx / (n * n)];
        if !on_boundary(grid.n, ijk) {
            return Ok(());
        }
        *v = match boundary {
            Boundary::ZeroClamped => [0.0; 3],
            Boundary::Prescribed(model) => model.displacement(SpacetimePoint { t, x: node_position(grid, ijk) })?.u,
        };
        Ok::<(), Error>(())
    })
}

fn energy(m: &Material, grid: &GridSpec, next: &[Vec3], cur: &[Vec3], acc: &[Vec3]) -> f64 {
    let h = grid.spacing();
    let volume = h[0] * h[1] * h[2];
    let rho = m.rho();
    let dt = grid.dt;
    let sum: f64 = (0..next.len())
        .into_par_iter()
        .map(|i| {
            let mut kinetic = 0.0;
            let mut potential = 0.0;
            for c in 0..3 {
                let v = (next[i][c] - cur[i][c]) / dt;
                kinetic += v * v;
                potential -= next[i][c] * acc[i][c];
            }
            0.5 * rho * (kinetic + potential)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    sum * volume
}

/// Explicit leapfrog for the displacement form of the elastic system with
/// second-order central differences in space.
pub fn oracle_solve(
    data: &ProblemData,
    m: &Material,
    grid: &GridSpec,
    boundary: Boundary<'_>,
    options: OracleOptions,
) -> Result<OracleRun> {
    let grid = grid.validated(m)?;
    let phi = sample_fields(&grid, |x| data.phi.value(x));
    let psi = sample_fields(&grid, |x| data.psi.value(x));
    if matches!(boundary, Boundary::ZeroClamped) {
        check_support(data, m, &grid, &phi, &psi)?;
    }
    let dt = grid.dt;
    let mut prev = phi;
    apply_boundary(&boundary, &grid, 0.0, &mut prev)?;
    let mut acc = vec![[0.0; 3]; prev.len()];
    acceleration(data, m, &grid, &prev, 0.0, &mut acc);

    let mut cur: Vec<Vec3> = prev
        .par_iter()
        .zip(&psi)
        .zip(&acc)
        .map(|((u, v), a)| std::array::from_fn(|c| u[c] + dt * v[c] + 0.5 * dt * dt * a[c]))
        .collect();
    apply_boundary(&boundary, &grid, dt, &mut cur)?;

    let mut snapshots = Vec::new();
    let every = options.snapshot_every.filter(|&e| e > 0);
    if every.is_some() {
        snapshots.push(GridField {
            grid,
            time: 0.0,
            values: prev.clone(),
        });
    }
    let mut energies = Vec::new();
    if options.record_energy {
        energies.push(energy(m, &grid, &cur, &prev, &acc));
    }
    let mut snapshot = |step: usize, values: &[Vec3]| {
        if let Some(e) = every {
            if step.is_multiple_of(e) || step == grid.steps {
                snapshots.push(GridField {
                    grid,
                    time: step as f64 * dt,
                    values: values.to_vec(),
                });
            }
        }
    };
    snapshot(1, &cur);

    for step in 1..grid.steps {
        let t = step as f64 * dt;
        acceleration(data, m, &grid, &cur, t, &mut acc);
        // prev becomes the next level in place
        prev.par_iter_mut()
            .zip(&cur)
            .zip(&acc)
            .for_each(|((p, u), a)| *p = std::array::from_fn(|c| 2.0 * u[c] - p[c] + dt * dt * a[c]));
        apply_boundary(&boundary, &grid, t + dt, &mut prev)?;
        if options.record_energy {
            energies.push(energy(m, &grid, &prev, &cur, &acc));
        }
        std::mem::swap(&mut prev, &mut cur);
        snapshot(step + 1, &cur);
    }

    Ok(OracleRun {
        last: GridField {
            grid,
            time: grid.final_time(),
            values: cur,
        },
        snapshots,
        energy: energies,
    })
}
