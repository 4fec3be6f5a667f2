use std::fs;

use elasto_cli::config::Format;
use elasto_cli::{
    cmd_compare, cmd_export, cmd_solve, cmd_validate, cmd_verify, cmd_verify_with, parse_config, CliError, OutputOptions,
    RunConfig, EXIT_FAIL, EXIT_PASS,
};
use elasto_core::solver::DisplacementSample;
use elasto_core::{DalembertSolution, DisplacementModel, Error, Mat3, Material, SpacetimePoint, Vec3};

const RIDGE: &str = include_str!("fixtures/ridge.conf");
const ROTATIONAL: &str = include_str!("fixtures/rotational.conf");

fn ridge() -> RunConfig {
    parse_config(RIDGE).unwrap()
}

/// Ridge data without forcing on a small box, cheap enough for grid studies.
fn unforced() -> RunConfig {
    let mut cfg = ridge();
    cfg.forcing.terms.clear();
    cfg
}

#[test]
fn validate_exit_codes() {
    assert_eq!(cmd_validate(&ridge()).unwrap().code, EXIT_PASS);
    let out = cmd_validate(&parse_config(ROTATIONAL).unwrap()).unwrap();
    assert_eq!(out.code, EXIT_FAIL);
    assert!(out.report.contains("curl_phi"), "{}", out.report);
}

#[test]
fn solve_refuses_unvalidated_data_unless_forced() {
    let mut cfg = parse_config(ROTATIONAL).unwrap();
    cfg.output.points = vec![[0.5, 0.1, 0.2, 0.3]];
    let refused = cmd_solve(&cfg, &OutputOptions::default()).unwrap();
    assert_eq!(refused.code, EXIT_FAIL);
    assert!(refused.report.contains("--force"));
    let forced = cmd_solve(
        &cfg,
        &OutputOptions {
            force: true,
            ..OutputOptions::default()
        },
    )
    .unwrap();
    assert_eq!(forced.code, EXIT_PASS);
    assert!(forced.report.starts_with("t,x1,x2,x3,u1,u2,u3\n"));
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn initial_slice_equals_phi() {
    let mut cfg = ridge();
    cfg.output.time = 0.0;
    let out = cmd_solve(&cfg, &OutputOptions::default()).unwrap();
    let data = elasto_cli::build::problem_data(&cfg).unwrap();
    let rows = rows(&out.report);
    assert_eq!(rows.len(), 20);
    for r in rows {
        let phi = data.phi.value([r[1], r[2], r[3]]);
        assert_eq!(&r[4..7], &phi);
    }
}

#[test]
fn slice_matches_library_values_exactly() {
    let cfg = ridge();
    let out = cmd_solve(&cfg, &OutputOptions::default()).unwrap();
    let sol = DalembertSolution::new(
        elasto_cli::build::problem_data(&cfg).unwrap(),
        elasto_cli::build::material(&cfg).unwrap(),
        elasto_cli::build::solver_spec(&cfg).unwrap(),
    );
    for r in rows(&out.report) {
        let u = sol.displacement(SpacetimePoint::new(r[0], [r[1], r[2], r[3]]).unwrap()).unwrap().u;
        assert_eq!(&r[4..7], &u);
    }
}

#[test]
fn zero_data_give_an_all_zero_file() {
    let mut cfg = RunConfig::with_material(ridge().material);
    cfg.output.points = vec![[0.0, 0.0, 0.0, 0.0], [1.0, 0.5, -0.5, 2.0]];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.csv");
    let opts = OutputOptions {
        stress: true,
        out: Some(path.clone()),
        ..OutputOptions::default()
    };
    let out = cmd_solve(&cfg, &opts).unwrap();
    assert_eq!(out.code, EXIT_PASS);
    let text = fs::read_to_string(&path).unwrap();
    let rows = rows(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.len() == 13 && r[4..].iter().all(|v| *v == 0.0)));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ridge();
    let run = |name: &str, format: Format| {
        let path = dir.path().join(name);
        let opts = OutputOptions {
            stress: true,
            format: Some(format),
            out: Some(path.clone()),
            ..OutputOptions::default()
        };
        cmd_solve(&cfg, &opts).unwrap();
        fs::read(path).unwrap()
    };
    assert_eq!(run("a.vtk", Format::Vtk), run("b.vtk", Format::Vtk));
    assert_eq!(run("a.csv", Format::Csv), run("b.csv", Format::Csv));
}

#[test]
fn export_writes_a_volume() {
    let mut cfg = unforced();
    cfg.output.volume_resolution = 3;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("volume.vtk");
    let opts = OutputOptions {
        format: Some(Format::Vtk),
        out: Some(path.clone()),
        ..OutputOptions::default()
    };
    assert_eq!(cmd_export(&cfg, &opts).unwrap().code, EXIT_PASS);
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("DIMENSIONS 3 3 3\n"));
    assert!(text.contains("POINT_DATA 27\n"));
    let missing = cmd_export(&cfg, &OutputOptions::default()).unwrap_err();
    assert!(matches!(missing, CliError::Usage(_)));
}

#[test]
fn verify_passes_for_admissible_data() {
    let out = cmd_verify(&ridge()).unwrap();
    assert_eq!(out.code, EXIT_PASS, "{}", out.report);
}

/// The exact solution computed with half the wave speed.
struct SlowDouble(DalembertSolution);

impl SlowDouble {
    fn new(cfg: &RunConfig) -> Self {
        let m = elasto_cli::build::material(cfg).unwrap();
        let slow = Material::new(4.0 * m.rho(), m.lambda(), m.mu()).unwrap();
        SlowDouble(DalembertSolution::new(
            elasto_cli::build::problem_data(cfg).unwrap(),
            slow,
            elasto_cli::build::solver_spec(cfg).unwrap(),
        ))
    }
}

impl DisplacementModel for SlowDouble {
    fn displacement(&self, p: SpacetimePoint) -> elasto_core::Result<DisplacementSample> {
        self.0.displacement(p)
    }
    fn velocity(&self, p: SpacetimePoint) -> elasto_core::Result<Vec3> {
        self.0.velocity(p)
    }
    fn space_gradient(&self, p: SpacetimePoint) -> elasto_core::Result<Mat3> {
        self.0.space_gradient(p)
    }
}

#[test]
fn verify_catches_a_wrong_wave_speed() {
    let cfg = unforced();
    let out = cmd_verify_with(&cfg, &SlowDouble::new(&cfg)).unwrap();
    assert_eq!(out.code, EXIT_FAIL, "{}", out.report);
    assert!(out.report.contains("reduced_wave"));
}

#[test]
fn verify_rejects_times_below_the_step() {
    let mut cfg = unforced();
    cfg.sampling.verify_times = vec![0.0, 0.5];
    let err = cmd_verify(&cfg).unwrap_err();
    assert!(matches!(err, CliError::Core(Error::Precondition(_))), "{err}");
}

#[test]
fn compare_two_grid_ridge_study_passes() {
    let out = cmd_compare(&unforced()).unwrap();
    assert_eq!(out.code, EXIT_PASS, "{}", out.report);
}

#[test]
fn compare_needs_two_grids() {
    let mut cfg = unforced();
    cfg.grid.levels = vec![8];
    let err = cmd_compare(&cfg).unwrap_err();
    assert!(matches!(err, CliError::Core(Error::Precondition(_))), "{err}");
}

#[test]
fn compare_rejects_a_box_too_small_for_the_travel_distance() {
    let text = "[material]\nrho = 1\nlambda = 1\nmu = 1\n[phi]\nterm = 1 * blob(width=0.3)\n\
                [grid]\nlo = -1.5, -1.5, -1.5\nhi = 1.5, 1.5, 1.5\nlevels = 8, 16\nfinal_time = 1\nboundary = zero\n";
    let err = cmd_compare(&parse_config(text).unwrap()).unwrap_err();
    assert!(matches!(err, CliError::Core(Error::SupportViolation(_))), "{err}");
}
