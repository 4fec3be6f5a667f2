use std::fmt;

use crate::admissible::ProblemData;
use crate::domain::Material;
use crate::error::{Error, Result};
use crate::report::KeyValues;
use crate::solver::DisplacementModel;

use super::oracle::{oracle_solve, sample_model, Boundary, GridField, GridSpec, OracleOptions};

/// Something that produces the displacement on a grid at its final time.
pub trait GridSolver: Sync {
    fn solve_grid(&self, data: &ProblemData, m: &Material, grid: &GridSpec) -> Result<GridField>;
}

/// The leapfrog scheme with a chosen boundary treatment.
#[derive(Debug, Clone, Copy)]
pub struct LeapfrogOracle<'a> {
    pub boundary: Boundary<'a>,
}

impl GridSolver for LeapfrogOracle<'_> {
    fn solve_grid(&self, data: &ProblemData, m: &Material, grid: &GridSpec) -> Result<GridField> {
        Ok(oracle_solve(data, m, grid, self.boundary, OracleOptions::default())?.last)
    }
}

/// Samples a model directly. Useful to check the comparison machinery.
pub struct ExactSampler<'a>(pub &'a dyn DisplacementModel);

impl GridSolver for ExactSampler<'_> {
    fn solve_grid(&self, _data: &ProblemData, _m: &Material, grid: &GridSpec) -> Result<GridField> {
        sample_model(self.0, grid, grid.final_time())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelError {
    pub n: usize,
    pub spacing: f64,
    pub dt: f64,
    /// Largest component error over all nodes.
    pub linf: f64,
    /// Root mean square of the nodal error norms.
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub final_time: f64,
    pub levels: Vec<LevelError>,
}

fn rate(coarse: f64, fine: f64, h_coarse: f64, h_fine: f64) -> Option<f64> {
    (coarse > 0.0 && fine > 0.0).then(|| (coarse / fine).ln() / (h_coarse / h_fine).ln())
}

impl ComparisonReport {
    /// Observed order between consecutive levels in the max norm. `None`
    /// where an error is exactly zero.
    pub fn orders_linf(&self) -> Vec<Option<f64>> {
        self.levels
            .windows(2)
            .map(|w| rate(w[0].linf, w[1].linf, w[0].spacing, w[1].spacing))
            .collect()
    }

    pub fn orders_l2(&self) -> Vec<Option<f64>> {
        self.levels
            .windows(2)
            .map(|w| rate(w[0].l2, w[1].l2, w[0].spacing, w[1].spacing))
            .collect()
    }

    /// True when every max-norm order is defined and inside `[lo, hi]`.
    pub fn orders_within(&self, lo: f64, hi: f64) -> bool {
        self.orders_linf().iter().all(|o| o.is_some_and(|o| (lo..=hi).contains(&o)))
    }
}

/// Runs `solver` on each grid and measures its error against `exact` at
/// `final_time`.
pub fn compare(
    data: &ProblemData,
    m: &Material,
    grids: &[GridSpec],
    final_time: f64,
    solver: &dyn GridSolver,
    exact: &dyn DisplacementModel,
) -> Result<ComparisonReport> {
    if grids.len() < 2 {
        return Err(Error::Precondition(format!(
            "a convergence study needs at least two grids, got {}",
            grids.len()
        )));
    }
    for g in grids {
        if (g.final_time() - final_time).abs() > 1e-9 * final_time.abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "grid with n = {} ends at t = {}, not {final_time}",
                g.n,
                g.final_time()
            )));
        }
    }
    let mut levels = Vec::with_capacity(grids.len());
    for g in grids {
        let approx = solver.solve_grid(data, m, g)?;
        let reference = sample_model(exact, g, g.final_time())?;
        let mut linf = 0.0f64;
        let mut sq = 0.0;
        for (a, r) in approx.values.iter().zip(&reference.values) {
            let mut e2 = 0.0;
            for c in 0..3 {
                let e = a[c] - r[c];
                linf = linf.max(e.abs());
                e2 += e * e;
            }
            sq += e2;
        }
        levels.push(LevelError {
            n: g.n,
            spacing: g.spacing()[0],
            dt: g.dt,
            linf,
            l2: (sq / approx.values.len() as f64).sqrt(),
        });
    }
    Ok(ComparisonReport { final_time, levels })
}

fn show(o: Option<f64>) -> String {
    o.map_or_else(|| "undefined".to_string(), |o| format!("{o:e}"))
}

impl KeyValues for ComparisonReport {
    fn key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![("final_time".to_string(), format!("{:e}", self.final_time))];
        for l in &self.levels {
            kv.push((format!("linf_n{}", l.n), format!("{:e}", l.linf)));
            kv.push((format!("l2_n{}", l.n), format!("{:e}", l.l2)));
        }
        for (w, o) in self.levels.windows(2).zip(self.orders_linf()) {
            kv.push((format!("order_n{}_n{}", w[0].n, w[1].n), show(o)));
        }
        kv
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "grid comparison at t = {}", self.final_time)?;
        writeln!(f, "  {:>5} {:>12} {:>12} {:>12} {:>12}", "n", "h", "dt", "max error", "rms error")?;
        for l in &self.levels {
            writeln!(f, "  {:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", l.n, l.spacing, l.dt, l.linf, l.l2)?;
        }
        for (w, (o, o2)) in self.levels.windows(2).zip(self.orders_linf().into_iter().zip(self.orders_l2())) {
            writeln!(f, "  order {} -> {}: max {}, rms {}", w[0].n, w[1].n, show(o), show(o2))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::{CatalogProfile, RidgeDirection};
    use crate::solver::{DalembertSolution, SolverSpec};

    fn setup() -> (ProblemData, Material) {
        let data = ProblemData::builder()
            .phi(
                1.0,
                &CatalogProfile::gaussian(1.0, 0.0).unwrap().into_profile(),
                RidgeDirection::new(1, 1, 1).unwrap(),
            )
            .build();
        (data, Material::new(1.0, 1.0, 1.0).unwrap())
    }

    #[test]
    fn needs_two_grids() {
        let (data, m) = setup();
        let sol = DalembertSolution::new(data.clone(), m, SolverSpec::default());
        let g = GridSpec::for_final_time([-1.0; 3], [1.0; 3], 4, 0.1, &m, 0.5).unwrap();
        let err = compare(&data, &m, &[g], 0.1, &ExactSampler(&sol), &sol).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn exact_sampler_has_no_error_and_no_order() {
        let (data, m) = setup();
        let sol = DalembertSolution::new(data.clone(), m, SolverSpec::default());
        let grids = GridSpec::refinement_ladder([-1.0; 3], [1.0; 3], 4, 2, 0.1, &m, 0.5).unwrap();
        let report = compare(&data, &m, &grids, 0.1, &ExactSampler(&sol), &sol).unwrap();
        assert!(report.levels.iter().all(|l| l.linf == 0.0));
        assert_eq!(report.orders_linf(), vec![None]);
        assert!(!report.orders_within(1.6, 2.4));
    }

    #[test]
    fn leapfrog_converges_at_second_order() {
        let (data, m) = setup();
        let sol = DalembertSolution::new(data.clone(), m, SolverSpec::default());
        let grids = GridSpec::refinement_ladder([-2.0; 3], [2.0; 3], 8, 3, 0.25, &m, 0.5).unwrap();
        let oracle = LeapfrogOracle {
            boundary: Boundary::Prescribed(&sol),
        };
        let report = compare(&data, &m, &grids, 0.25, &oracle, &sol).unwrap();
        assert!(report.orders_within(1.6, 2.4), "{report}");
    }
}
