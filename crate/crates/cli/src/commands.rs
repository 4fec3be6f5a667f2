use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use elasto_core::admissible::validate_admissible;
use elasto_core::sampling::halton_box;
use elasto_core::verify::{compare, identity_suite, residual_study, LeapfrogOracle, ResidualStudy};
use elasto_core::{DalembertSolution, DisplacementModel, Material, ProblemData, SpacetimePoint};

use crate::build;
use crate::config::{parse_config, ConfigError, Format, RunConfig};
use crate::output::{evaluate, slice_points, volume_points, write_csv, write_vtk, Lattice, Sample};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

/// Observed orders accepted by `compare` and by the residual part of
/// `verify`.
pub const ORDER_RANGE: (f64, f64) = (1.5, 2.5);

/// Residuals below this are treated as exact, where an order means nothing.
const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] elasto_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// What a command prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

impl Outcome {
    fn verdict(passed: bool, mut report: String) -> Outcome {
        let _ = writeln!(report, "result: {}", if passed { "PASS" } else { "FAIL" });
        Outcome {
            code: if passed { EXIT_PASS } else { EXIT_FAIL },
            report,
        }
    }
}

/// Flags shared by the commands that write data.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputOptions {
    pub force: bool,
    pub stress: bool,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

struct Setup {
    material: Material,
    data: ProblemData,
    solution: DalembertSolution,
}

fn setup(cfg: &RunConfig) -> Result<Setup> {
    let material = build::material(cfg)?;
    let data = build::problem_data(cfg)?;
    let solution = DalembertSolution::new(data.clone(), material, build::solver_spec(cfg)?);
    Ok(Setup {
        material,
        data,
        solution,
    })
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome> {
    let data = build::problem_data(cfg)?;
    let report = validate_admissible(
        &data,
        &build::sampling(&cfg.sampling),
        cfg.tolerances.check_tol,
        cfg.tolerances.fd_step,
    );
    Ok(Outcome {
        code: if report.passed() { EXIT_PASS } else { EXIT_FAIL },
        report: report.to_string(),
    })
}

/// Runs validation unless forced; `Some` carries the refusal.
fn gate(cfg: &RunConfig, force: bool) -> Result<Option<Outcome>> {
    if force {
        return Ok(None);
    }
    let v = cmd_validate(cfg)?;
    if v.code == EXIT_PASS {
        return Ok(None);
    }
    Ok(Some(Outcome {
        code: EXIT_FAIL,
        report: format!("{}refusing to evaluate data that failed validation (use --force to override)\n", v.report),
    }))
}

fn write_to(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    body(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn emit(
    samples: &[Sample],
    format: Format,
    lattice: Option<Lattice>,
    title: &str,
    out: Option<&Path>,
) -> Result<String> {
    let render = |w: &mut dyn Write| -> io::Result<()> {
        let mut w = w;
        match (format, lattice) {
            (Format::Csv, _) => write_csv(&mut w, samples),
            (Format::Vtk, Some(l)) => write_vtk(&mut w, title, &l, samples),
            (Format::Vtk, None) => unreachable!("checked by the caller"),
        }
    };
    match out {
        Some(path) => {
            write_to(path, |w| render(w))?;
            Ok(format!("wrote {} samples to {}\n", samples.len(), path.display()))
        }
        None => {
            let mut buf = Vec::new();
            render(&mut buf).map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
            Ok(String::from_utf8(buf).expect("writers emit ASCII"))
        }
    }
}

/// Displacement at the configured points, or on the configured slice when
/// there are none.
pub fn cmd_solve(cfg: &RunConfig, opts: &OutputOptions) -> Result<Outcome> {
    if let Some(refusal) = gate(cfg, opts.force)? {
        return Ok(refusal);
    }
    let s = setup(cfg)?;
    let format = opts.format.unwrap_or(cfg.output.format);
    let out = opts.out.as_deref().or(cfg.output.path.as_deref());
    let (points, lattice) = if !cfg.output.points.is_empty() {
        if format == Format::Vtk {
            return Err(CliError::Usage(
                "vtk output needs a slice; use csv for scattered points".into(),
            ));
        }
        let pts = cfg
            .output
            .points
            .iter()
            .map(|p| SpacetimePoint::new(p[0], [p[1], p[2], p[3]]))
            .collect::<elasto_core::Result<Vec<_>>>()?;
        (pts, None)
    } else if let Some(spec) = &cfg.output.slice {
        let t = cfg.output.time;
        let pts = slice_points(spec)
            .into_iter()
            .map(|x| SpacetimePoint { t, x })
            .collect();
        (pts, Some(Lattice::slice(spec)))
    } else {
        return Err(CliError::Usage(
            "nothing to solve: add `point` lines or `slice_axis` to [output]".into(),
        ));
    };
    let samples = evaluate(&s.solution, &s.material, &points, opts.stress)?;
    let title = format!("displacement at t = {}", cfg.output.time);
    let report = emit(&samples, format, lattice, &title, out)?;
    Ok(Outcome {
        code: EXIT_PASS,
        report,
    })
}

/// Volume snapshot of the exact solution over the grid box.
pub fn cmd_export(cfg: &RunConfig, opts: &OutputOptions) -> Result<Outcome> {
    let out = opts
        .out
        .as_deref()
        .or(cfg.output.path.as_deref())
        .ok_or_else(|| CliError::Usage("export needs an output path: pass --out or set [output] path".into()))?;
    if let Some(refusal) = gate(cfg, opts.force)? {
        return Ok(refusal);
    }
    let s = setup(cfg)?;
    let n = cfg.output.volume_resolution;
    let (lo, hi) = (cfg.grid.lo, cfg.grid.hi);
    let t = cfg.output.time;
    let points: Vec<SpacetimePoint> = volume_points(lo, hi, n)
        .into_iter()
        .map(|x| SpacetimePoint { t, x })
        .collect();
    let samples = evaluate(&s.solution, &s.material, &points, opts.stress)?;
    let format = opts.format.unwrap_or(cfg.output.format);
    let title = format!("displacement at t = {t}");
    let report = emit(&samples, format, Some(Lattice::volume(lo, hi, n)), &title, Some(out))?;
    Ok(Outcome {
        code: EXIT_PASS,
        report,
    })
}

fn verify_points(cfg: &RunConfig) -> Vec<SpacetimePoint> {
    let s = &cfg.sampling;
    let space = halton_box(s.lo, s.hi, s.verify_count, s.seed);
    s.verify_times
        .iter()
        .flat_map(|&t| space.iter().map(move |&x| SpacetimePoint { t, x }))
        .collect()
}

fn residual_passes(study: &ResidualStudy) -> bool {
    if study.coarse.max <= RESIDUAL_FLOOR {
        return true;
    }
    let order = study.order();
    (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&order)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    cmd_verify_with(cfg, &s.solution)
}

/// Residual and identity checks against an arbitrary displacement model,
/// with the material and data taken from `cfg`.
pub fn cmd_verify_with(cfg: &RunConfig, model: &dyn DisplacementModel) -> Result<Outcome> {
    let m = build::material(cfg)?;
    let data = build::problem_data(cfg)?;
    let points = verify_points(cfg);
    let s = &cfg.sampling;
    let study = residual_study(model, &data, &m, &points, s.residual_step)?;
    let identities = identity_suite(model, &data, &m, &points, s.identity_step, s.identity_tol)?;
    let residual_ok = residual_passes(&study);
    let mut report = String::new();
    let _ = write!(report, "{study}");
    let _ = writeln!(
        report,
        "  order within [{}, {}]: {}",
        ORDER_RANGE.0,
        ORDER_RANGE.1,
        if residual_ok { "ok" } else { "FAIL" }
    );
    let _ = write!(report, "{identities}");
    Ok(Outcome::verdict(residual_ok && identities.passed(), report))
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Outcome> {
    let s = setup(cfg)?;
    let grids = build::grids(cfg, &s.material)?;
    let oracle = LeapfrogOracle {
        boundary: build::boundary(cfg.grid.boundary, &s.solution),
    };
    let report = compare(&s.data, &s.material, &grids, cfg.grid.final_time, &oracle, &s.solution)?;
    let passed = report.orders_within(ORDER_RANGE.0, ORDER_RANGE.1);
    Ok(Outcome::verdict(passed, report.to_string()))
}
