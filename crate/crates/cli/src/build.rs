//! Turns a parsed configuration into library objects.

use elasto_core::admissible::{ridge_data, ridge_forcing, CatalogProfile, SamplingSpec};
use elasto_core::fields::{ForcingField, ScalarField3, ScalarProfile, TimeEnvelope, VectorField3};
use elasto_core::verify::{Boundary, GridSpec};
use elasto_core::{DisplacementModel, Material, ProblemData, Result, RidgeDirection, SolverSpec};

use crate::config::{BoundaryKind, EnvelopeSpec, ProfileSpec, RunConfig, SamplingConfig, ShapeSpec};

pub fn material(cfg: &RunConfig) -> Result<Material> {
    Material::new(cfg.material.rho, cfg.material.lambda, cfg.material.mu)
}

pub fn solver_spec(cfg: &RunConfig) -> Result<SolverSpec> {
    Ok(SolverSpec::from_tolerances(&cfg.tolerances.validated()?))
}

pub fn profile(spec: &ProfileSpec) -> Result<ScalarProfile> {
    let p = match *spec {
        ProfileSpec::Gaussian { sigma, center } => CatalogProfile::gaussian(sigma, center)?,
        ProfileSpec::DerivativeOfGaussian { sigma, center } => CatalogProfile::derivative_of_gaussian(sigma, center)?,
        ProfileSpec::SineGaussian { k, sigma, center } => CatalogProfile::sine_gaussian(k, sigma, center)?,
        ProfileSpec::PolyGaussian {
            coefficients,
            sigma,
            center,
        } => CatalogProfile::poly_gaussian(&coefficients, sigma, center)?,
    };
    Ok(p.into_profile())
}

fn envelope(spec: &EnvelopeSpec) -> TimeEnvelope {
    match *spec {
        EnvelopeSpec::Constant => TimeEnvelope::constant(1.0),
        EnvelopeSpec::Exponential { rate } => TimeEnvelope::exponential(rate),
        EnvelopeSpec::Cosine { omega } => TimeEnvelope::cosine(omega),
    }
}

fn bump(width: f64) -> impl Fn([f64; 3]) -> f64 + Copy + Send + Sync + 'static {
    move |x: [f64; 3]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (width * width)).exp()
}

fn shape_field(shape: &ShapeSpec) -> Result<VectorField3> {
    Ok(match *shape {
        ShapeSpec::Ridge { profile: p, direction } => {
            let [a, b, c] = direction;
            ridge_data(&profile(&p)?, RidgeDirection::new(a, b, c)?)
        }
        ShapeSpec::Rotational { width } => {
            let g = bump(width);
            VectorField3::new(
                ScalarField3::from_fn(move |x| -x[1] * g(x)),
                ScalarField3::from_fn(move |x| x[0] * g(x)),
                ScalarField3::zero(),
            )
        }
        ShapeSpec::Radial { width } => {
            let g = bump(width);
            let c = -2.0 / (width * width);
            VectorField3::new(
                ScalarField3::from_fn(move |x| c * x[0] * g(x)),
                ScalarField3::from_fn(move |x| c * x[1] * g(x)),
                ScalarField3::from_fn(move |x| c * x[2] * g(x)),
            )
        }
        ShapeSpec::Blob { width } => {
            let g = bump(width);
            VectorField3::new(ScalarField3::from_fn(g), ScalarField3::from_fn(g), ScalarField3::from_fn(g))
        }
    })
}

fn direction(d: [i8; 3]) -> Result<RidgeDirection> {
    RidgeDirection::new(d[0], d[1], d[2])
}

/// Ridge-only configurations give constructed data; any other field shape
/// makes the whole data set user supplied.
pub fn problem_data(cfg: &RunConfig) -> Result<ProblemData> {
    let all_ridge = cfg.phi.iter().chain(&cfg.psi).all(|t| t.shape.is_ridge())
        && cfg.forcing.terms.iter().all(|t| t.shape.is_ridge());
    let data = if all_ridge {
        let mut b = ProblemData::builder();
        for t in &cfg.phi {
            if let ShapeSpec::Ridge { profile: p, direction: d } = &t.shape {
                b = b.phi(t.coefficient, &profile(p)?, direction(*d)?);
            }
        }
        for t in &cfg.psi {
            if let ShapeSpec::Ridge { profile: p, direction: d } = &t.shape {
                b = b.psi(t.coefficient, &profile(p)?, direction(*d)?);
            }
        }
        for t in &cfg.forcing.terms {
            if let ShapeSpec::Ridge { profile: p, direction: d } = &t.shape {
                b = b.forcing(t.coefficient, envelope(&t.envelope), &profile(p)?, direction(*d)?);
            }
        }
        b.build()
    } else {
        let combine = |terms: &[crate::config::Term]| -> Result<VectorField3> {
            let fields = terms
                .iter()
                .map(|t| Ok((t.coefficient, shape_field(&t.shape)?)))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<(f64, &VectorField3)> = fields.iter().map(|(c, f)| (*c, f)).collect();
            Ok(VectorField3::linear_combination(&refs))
        };
        let forcing = cfg
            .forcing
            .terms
            .iter()
            .map(|t| {
                let field = match &t.shape {
                    ShapeSpec::Ridge { profile: p, direction: d } => {
                        ridge_forcing(envelope(&t.envelope), &profile(p)?, direction(*d)?)
                    }
                    other => ForcingField::separable(envelope(&t.envelope), shape_field(other)?),
                };
                Ok((t.coefficient, field))
            })
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<(f64, &ForcingField)> = forcing.iter().map(|(c, f)| (*c, f)).collect();
        ProblemData::user_supplied(combine(&cfg.phi)?, combine(&cfg.psi)?, ForcingField::linear_combination(&refs))
    };
    Ok(data.with_strong_forcing(cfg.forcing.strong))
}

pub fn sampling(s: &SamplingConfig) -> SamplingSpec {
    SamplingSpec {
        lo: s.lo,
        hi: s.hi,
        count: s.count,
        times: s.times.clone(),
        seed_offset: s.seed,
        decay_radii: s.decay_radii.clone(),
    }
}

/// Grids for every configured level. The coarsest level takes the fewest
/// steps the CFL limit allows; finer levels scale the step count with the
/// cell count so that `dt / h` is shared.
pub fn grids(cfg: &RunConfig, m: &Material) -> Result<Vec<GridSpec>> {
    let g = &cfg.grid;
    let Some(&n0) = g.levels.first() else {
        return Ok(Vec::new());
    };
    let base = GridSpec::for_final_time(g.lo, g.hi, n0, g.final_time, m, g.cfl)?;
    g.levels
        .iter()
        .map(|&n| {
            let steps = (base.steps * n).div_ceil(n0);
            GridSpec {
                n,
                steps,
                dt: g.final_time / steps as f64,
                ..base
            }
            .validated(m)
        })
        .collect()
}

pub fn boundary<'a>(kind: BoundaryKind, exact: &'a dyn DisplacementModel) -> Boundary<'a> {
    match kind {
        BoundaryKind::Exact => Boundary::Prescribed(exact),
        BoundaryKind::Zero => Boundary::ZeroClamped,
    }
}
