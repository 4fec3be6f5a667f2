use elasto_core::admissible::{CatalogProfile, ProblemData, RidgeDirection};
use elasto_core::fields::TimeEnvelope;
use elasto_core::verify::{compare, oracle_solve, Boundary, GridSpec, LeapfrogOracle, OracleOptions};
use elasto_core::{DalembertSolution, Error, Material, SolverSpec};

fn gaussian(sigma: f64) -> elasto_core::fields::ScalarProfile {
    CatalogProfile::gaussian(sigma, 0.0).unwrap().into_profile()
}

#[test]
fn forced_run_converges_at_second_order() {
    let m = Material::new(1.0, 0.5, 1.0).unwrap();
    let data = ProblemData::builder()
        .forcing(1.0, TimeEnvelope::cosine(3.0), &gaussian(0.8), RidgeDirection::new(1, -1, 1).unwrap())
        .build();
    let sol = DalembertSolution::new(data.clone(), m, SolverSpec::default());
    let grids = GridSpec::refinement_ladder([-1.5; 3], [1.5; 3], 8, 2, 0.3, &m, 0.5).unwrap();
    let oracle = LeapfrogOracle {
        boundary: Boundary::Prescribed(&sol),
    };
    let report = compare(&data, &m, &grids, 0.3, &oracle, &sol).unwrap();
    let order = report.orders_linf()[0].unwrap();
    assert!((1.6..=2.4).contains(&order), "{report}");
}

#[test]
fn ridge_data_cannot_use_clamped_boundaries() {
    // ridge data are constant along the ridge and never fall off at the box
    let m = Material::new(1.0, 1.0, 1.0).unwrap();
    let data = ProblemData::builder()
        .phi(1.0, &gaussian(1.0), RidgeDirection::new(1, 1, 1).unwrap())
        .build();
    let grid = GridSpec::for_final_time([-4.0; 3], [4.0; 3], 16, 0.5, &m, 0.5).unwrap();
    let err = oracle_solve(&data, &m, &grid, Boundary::ZeroClamped, OracleOptions::default()).unwrap_err();
    assert!(matches!(err, Error::SupportViolation(_)), "{err}");
}
