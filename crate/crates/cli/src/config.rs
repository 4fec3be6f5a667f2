//! Line-oriented run configuration: `[section]` headers, `key = value`
//! lines and `#` comments. See `docs/config.md` for the grammar.

use std::fmt::Write as _;
use std::path::PathBuf;

use elasto_core::admissible::PROFILE_NAMES;
use elasto_core::{Axis, Tolerances};
use thiserror::Error;

/// Non-ridge field shapes. They exist to exercise the validator and the
/// oracle; none of them is admissible.
pub const FIELD_NAMES: [&str; 3] = ["rotational", "radial", "blob"];
pub const ENVELOPE_NAMES: [&str; 3] = ["constant", "exponential", "cosine"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown {kind} `{name}`{}", suggestion.as_ref().map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default())]
    UnknownProfile {
        line: usize,
        kind: &'static str,
        name: String,
        suggestion: Option<String>,
    },
    #[error("{key}: {reason}")]
    Range { key: String, reason: String },
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSpec {
    Gaussian { sigma: f64, center: f64 },
    DerivativeOfGaussian { sigma: f64, center: f64 },
    SineGaussian { k: f64, sigma: f64, center: f64 },
    PolyGaussian { coefficients: [f64; 5], sigma: f64, center: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeSpec {
    Ridge { profile: ProfileSpec, direction: [i8; 3] },
    /// `(-x2, x1, 0) exp(-|x|^2 / w^2)`
    Rotational { width: f64 },
    /// `grad exp(-|x|^2 / w^2)`
    Radial { width: f64 },
    /// `(1, 1, 1) exp(-|x|^2 / w^2)`
    Blob { width: f64 },
}

impl ShapeSpec {
    pub fn is_ridge(&self) -> bool {
        matches!(self, ShapeSpec::Ridge { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub shape: ShapeSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvelopeSpec {
    Constant,
    Exponential { rate: f64 },
    Cosine { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingTerm {
    pub coefficient: f64,
    pub envelope: EnvelopeSpec,
    pub shape: ShapeSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec {
    /// Whether the forcing must also have equal diagonal derivatives.
    pub strong: bool,
    pub terms: Vec<ForcingTerm>,
}

impl Default for ForcingSpec {
    fn default() -> Self {
        ForcingSpec {
            strong: true,
            terms: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialSpec {
    pub rho: f64,
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub count: usize,
    pub times: Vec<f64>,
    pub seed: u64,
    pub decay_radii: Vec<f64>,
    pub verify_count: usize,
    pub verify_times: Vec<f64>,
    pub residual_step: f64,
    pub identity_step: f64,
    pub identity_tol: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            lo: [-2.0; 3],
            hi: [2.0; 3],
            count: 200,
            times: vec![0.0, 0.5, 1.0],
            seed: 0,
            decay_radii: vec![5.0, 10.0, 20.0],
            verify_count: 20,
            verify_times: vec![0.25, 0.5, 1.0],
            residual_step: 1e-2,
            identity_step: 1e-3,
            identity_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Boundary nodes follow the exact solution.
    Exact,
    /// Boundary nodes stay at zero.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    /// Cells per axis on each refinement level.
    pub levels: Vec<usize>,
    pub final_time: f64,
    pub cfl: f64,
    pub boundary: BoundaryKind,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            lo: [-4.0; 3],
            hi: [4.0; 3],
            levels: vec![32, 64],
            final_time: 0.5,
            cfl: 0.5,
            boundary: BoundaryKind::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Vtk,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Vtk => "vtk",
        }
    }
}

/// A plane normal to `axis` at `offset`, sampled on a `resolution` grid
/// spanning `lo..hi` in the two remaining axes (in increasing order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSpec {
    pub axis: Axis,
    pub offset: f64,
    pub resolution: [usize; 2],
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
    /// `(t, x1, x2, x3)` sample points.
    pub points: Vec<[f64; 4]>,
    /// Time of slices and volume snapshots.
    pub time: f64,
    pub slice: Option<SliceSpec>,
    /// Nodes per axis of volume snapshots over the grid box.
    pub volume_resolution: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            format: Format::Csv,
            path: None,
            points: Vec::new(),
            time: 0.0,
            slice: None,
            volume_resolution: 17,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub material: MaterialSpec,
    pub phi: Vec<Term>,
    pub psi: Vec<Term>,
    pub forcing: ForcingSpec,
    pub tolerances: Tolerances,
    pub sampling: SamplingConfig,
    pub grid: GridConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    /// Unit material, no data, defaults everywhere else.
    pub fn with_material(material: MaterialSpec) -> Self {
        RunConfig {
            material,
            phi: Vec::new(),
            psi: Vec::new(),
            forcing: ForcingSpec::default(),
            tolerances: Tolerances::default(),
            sampling: SamplingConfig::default(),
            grid: GridConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

const SECTIONS: [&str; 8] = ["material", "phi", "psi", "forcing", "tolerances", "sampling", "grid", "output"];

fn keys_of(section: &str) -> &'static [&'static str] {
    match section {
        "material" => &["rho", "lambda", "mu"],
        "phi" | "psi" => &["term"],
        "forcing" => &["term", "strong"],
        "tolerances" => &["quad_rel", "fd_step", "check_tol"],
        "sampling" => &[
            "lo",
            "hi",
            "count",
            "times",
            "seed",
            "decay_radii",
            "verify_count",
            "verify_times",
            "residual_step",
            "identity_step",
            "identity_tol",
        ],
        "grid" => &["lo", "hi", "levels", "final_time", "cfl", "boundary"],
        "output" => &[
            "format",
            "path",
            "point",
            "time",
            "slice_axis",
            "slice_offset",
            "slice_resolution",
            "slice_lo",
            "slice_hi",
            "volume_resolution",
        ],
        _ => &[],
    }
}

fn repeatable(section: &str, key: &str) -> bool {
    key == "term" || (section == "output" && key == "point")
}

/// Closest candidate within a small edit distance.
fn suggest<'a>(name: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<String> {
    candidates
        .into_iter()
        .map(|c| (strsim::levenshtein(name, c), c))
        .filter(|&(d, c)| d <= 2.max(c.len() / 3))
        .min_by_key(|&(d, _)| d)
        .map(|(_, c)| c.to_string())
}

fn parse_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        message: message.into(),
    }
}

fn range(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Range {
        key: key.into(),
        reason: reason.into(),
    }
}

fn number(line: usize, key: &str, s: &str) -> Result<f64> {
    let s = s.trim();
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("`{key}`: expected a finite number, got `{s}`")))
}

fn integer<T: std::str::FromStr>(line: usize, key: &str, s: &str) -> Result<T> {
    let s = s.trim();
    s.parse::<T>()
        .map_err(|_| parse_err(line, format!("`{key}`: expected a non-negative integer, got `{s}`")))
}

fn list(line: usize, key: &str, s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| number(line, key, p)).collect()
}

fn fixed<const N: usize>(line: usize, key: &str, s: &str) -> Result<[f64; N]> {
    let v = list(line, key, s)?;
    v.try_into()
        .map_err(|v: Vec<f64>| parse_err(line, format!("`{key}`: expected {N} comma-separated numbers, got {}", v.len())))
}

fn boolean(line: usize, key: &str, s: &str) -> Result<bool> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(parse_err(line, format!("`{key}`: expected true or false, got `{other}`"))),
    }
}

/// `name(k = v, ...)` with its arguments in order.
struct Call<'a> {
    name: &'a str,
    args: Vec<(&'a str, f64)>,
}

fn parse_call(line: usize, s: &str) -> Result<Call<'_>> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| parse_err(line, format!("expected `name(...)`, got `{s}`")))?;
    if !s.ends_with(')') {
        return Err(parse_err(line, format!("missing `)` in `{s}`")));
    }
    let name = s[..open].trim();
    let inner = &s[open + 1..s.len() - 1];
    let mut args = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value` in `{part}`")))?;
        let k = k.trim();
        if args.iter().any(|(seen, _)| *seen == k) {
            return Err(parse_err(line, format!("parameter `{k}` given twice")));
        }
        args.push((k, number(line, k, v)?));
    }
    Ok(Call { name, args })
}

impl Call<'_> {
    /// Checks the argument names and returns their values, using the
    /// default for missing optional ones.
    fn take<const N: usize>(&self, line: usize, params: [(&str, Option<f64>); N]) -> Result<[f64; N]> {
        for (k, _) in &self.args {
            if !params.iter().any(|(p, _)| p == k) {
                let hint = suggest(k, params.iter().map(|(p, _)| *p))
                    .map(|s| format!(" (did you mean `{s}`?)"))
                    .unwrap_or_default();
                return Err(parse_err(line, format!("`{}` takes no parameter `{k}`{hint}", self.name)));
            }
        }
        let mut out = [0.0; N];
        for (slot, (p, default)) in out.iter_mut().zip(params) {
            *slot = match self.args.iter().find(|(k, _)| *k == p) {
                Some((_, v)) => *v,
                None => default.ok_or_else(|| parse_err(line, format!("`{}` needs parameter `{p}`", self.name)))?,
            };
        }
        Ok(out)
    }
}

fn parse_direction(line: usize, s: &str) -> Result<[i8; 3]> {
    let chars: Vec<char> = s.trim().chars().collect();
    if chars.len() != 3 {
        return Err(parse_err(line, format!("ridge direction must be three signs like `+-+`, got `{}`", s.trim())));
    }
    let mut d = [0i8; 3];
    for (slot, c) in d.iter_mut().zip(chars) {
        *slot = match c {
            '+' => 1,
            '-' => -1,
            _ => return Err(parse_err(line, format!("ridge direction must use only `+` and `-`, got `{}`", s.trim()))),
        };
    }
    Ok(d)
}

fn parse_shape(line: usize, call: &Call<'_>, direction: Option<&str>) -> Result<ShapeSpec> {
    let center = ("center", Some(0.0));
    let profile = match call.name {
        "gaussian" => {
            let [sigma, center] = call.take(line, [("sigma", None), center])?;
            Some(ProfileSpec::Gaussian { sigma, center })
        }
        "derivative_of_gaussian" => {
            let [sigma, center] = call.take(line, [("sigma", None), center])?;
            Some(ProfileSpec::DerivativeOfGaussian { sigma, center })
        }
        "sine_gaussian" => {
            let [k, sigma, center] = call.take(line, [("k", None), ("sigma", None), center])?;
            Some(ProfileSpec::SineGaussian { k, sigma, center })
        }
        "poly_gaussian" => {
            let zero = Some(0.0);
            let [c0, c1, c2, c3, c4, sigma, center] = call.take(
                line,
                [("c0", zero), ("c1", zero), ("c2", zero), ("c3", zero), ("c4", zero), ("sigma", None), center],
            )?;
            Some(ProfileSpec::PolyGaussian {
                coefficients: [c0, c1, c2, c3, c4],
                sigma,
                center,
            })
        }
        _ => None,
    };
    if let Some(profile) = profile {
        let direction = direction.ok_or_else(|| {
            parse_err(line, format!("profile `{}` needs a ridge direction, e.g. `@ +++`", call.name))
        })?;
        return Ok(ShapeSpec::Ridge {
            profile,
            direction: parse_direction(line, direction)?,
        });
    }
    if FIELD_NAMES.contains(&call.name) {
        if direction.is_some() {
            return Err(parse_err(line, format!("`{}` is not a ridge profile and takes no direction", call.name)));
        }
        let [width] = call.take(line, [("width", None)])?;
        return Ok(match call.name {
            "rotational" => ShapeSpec::Rotational { width },
            "radial" => ShapeSpec::Radial { width },
            _ => ShapeSpec::Blob { width },
        });
    }
    Err(ConfigError::UnknownProfile {
        line,
        kind: "profile",
        name: call.name.to_string(),
        suggestion: suggest(call.name, PROFILE_NAMES.iter().chain(&FIELD_NAMES).copied()),
    })
}

fn parse_envelope(line: usize, call: &Call<'_>) -> Result<EnvelopeSpec> {
    match call.name {
        "constant" => {
            call.take(line, [])?;
            Ok(EnvelopeSpec::Constant)
        }
        "exponential" => {
            let [rate] = call.take(line, [("rate", None)])?;
            Ok(EnvelopeSpec::Exponential { rate })
        }
        "cosine" => {
            let [omega] = call.take(line, [("omega", None)])?;
            Ok(EnvelopeSpec::Cosine { omega })
        }
        other => Err(ConfigError::UnknownProfile {
            line,
            kind: "envelope",
            name: other.to_string(),
            suggestion: suggest(other, ENVELOPE_NAMES),
        }),
    }
}

/// Splits `coef * a(..) * b(..) @ dir` into the coefficient, the calls and
/// the direction. `*` inside parentheses does not split.
fn split_term(line: usize, s: &str) -> Result<(f64, Vec<&str>, Option<&str>)> {
    let (body, direction) = match s.rsplit_once('@') {
        Some((b, d)) => (b, Some(d)),
        None => (s, None),
    };
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&body[start..]);
    if parts.len() < 2 {
        return Err(parse_err(line, format!("expected `<coefficient> * <profile>(...)`, got `{}`", s.trim())));
    }
    let coefficient = number(line, "coefficient", parts[0])?;
    Ok((coefficient, parts[1..].to_vec(), direction))
}

fn parse_term(line: usize, s: &str) -> Result<Term> {
    let (coefficient, calls, direction) = split_term(line, s)?;
    if calls.len() != 1 {
        return Err(parse_err(line, "a displacement term is `<coefficient> * <profile>(...) [@ <direction>]`"));
    }
    let call = parse_call(line, calls[0])?;
    Ok(Term {
        coefficient,
        shape: parse_shape(line, &call, direction)?,
    })
}

fn parse_forcing_term(line: usize, s: &str) -> Result<ForcingTerm> {
    let (coefficient, calls, direction) = split_term(line, s)?;
    if calls.len() != 2 {
        return Err(parse_err(
            line,
            "a forcing term is `<coefficient> * <envelope>(...) * <profile>(...) [@ <direction>]`",
        ));
    }
    let envelope = parse_envelope(line, &parse_call(line, calls[0])?)?;
    let shape = parse_shape(line, &parse_call(line, calls[1])?, direction)?;
    Ok(ForcingTerm {
        coefficient,
        envelope,
        shape,
    })
}

fn parse_axis(line: usize, s: &str) -> Result<Axis> {
    s.trim()
        .parse::<usize>()
        .ok()
        .and_then(Axis::from_number)
        .ok_or_else(|| parse_err(line, format!("`slice_axis`: expected 1, 2 or 3, got `{}`", s.trim())))
}

#[derive(Default)]
struct MaterialDraft {
    rho: Option<f64>,
    lambda: Option<f64>,
    mu: Option<f64>,
}

#[derive(Default)]
struct SliceDraft {
    axis: Option<Axis>,
    offset: Option<f64>,
    resolution: Option<[usize; 2]>,
    lo: Option<[f64; 2]>,
    hi: Option<[f64; 2]>,
    first_line: Option<usize>,
}

/// Parses and range-checks a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut material = MaterialDraft::default();
    let mut cfg = RunConfig::with_material(MaterialSpec {
        rho: 1.0,
        lambda: 1.0,
        mu: 1.0,
    });
    let mut slice = SliceDraft::default();
    let mut section: Option<&str> = None;
    let mut seen: Vec<(String, String)> = Vec::new();
    let mut seen_sections: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, format!("malformed section header `{content}`")))?
                .trim();
            let known = SECTIONS.iter().find(|s| **s == name).ok_or_else(|| {
                let hint = suggest(name, SECTIONS).map(|s| format!(" (did you mean `{s}`?)")).unwrap_or_default();
                parse_err(line, format!("unknown section `[{name}]`{hint}"))
            })?;
            if seen_sections.iter().any(|s| s == name) {
                return Err(parse_err(line, format!("section `[{name}]` appears twice")));
            }
            seen_sections.push(name.to_string());
            section = Some(known);
            continue;
        }
        let sec = section.ok_or_else(|| parse_err(line, "key outside of any section"))?;
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !keys_of(sec).contains(&key) {
            let hint = suggest(key, keys_of(sec).iter().copied())
                .map(|s| format!(" (did you mean `{s}`?)"))
                .unwrap_or_default();
            return Err(parse_err(line, format!("unknown key `{key}` in `[{sec}]`{hint}")));
        }
        if !repeatable(sec, key) {
            if seen.iter().any(|(s, k)| s == sec && k == key) {
                return Err(parse_err(line, format!("`{sec}.{key}` given twice")));
            }
            seen.push((sec.to_string(), key.to_string()));
        }

        match (sec, key) {
            ("material", "rho") => material.rho = Some(number(line, key, value)?),
            ("material", "lambda") => material.lambda = Some(number(line, key, value)?),
            ("material", "mu") => material.mu = Some(number(line, key, value)?),
            ("phi", "term") => cfg.phi.push(parse_term(line, value)?),
            ("psi", "term") => cfg.psi.push(parse_term(line, value)?),
            ("forcing", "term") => cfg.forcing.terms.push(parse_forcing_term(line, value)?),
            ("forcing", "strong") => cfg.forcing.strong = boolean(line, key, value)?,
            ("tolerances", "quad_rel") => cfg.tolerances.quad_rel = number(line, key, value)?,
            ("tolerances", "fd_step") => cfg.tolerances.fd_step = number(line, key, value)?,
            ("tolerances", "check_tol") => cfg.tolerances.check_tol = number(line, key, value)?,
            ("sampling", "lo") => cfg.sampling.lo = fixed(line, key, value)?,
            ("sampling", "hi") => cfg.sampling.hi = fixed(line, key, value)?,
            ("sampling", "count") => cfg.sampling.count = integer(line, key, value)?,
            ("sampling", "times") => cfg.sampling.times = list(line, key, value)?,
            ("sampling", "seed") => cfg.sampling.seed = integer(line, key, value)?,
            ("sampling", "decay_radii") => cfg.sampling.decay_radii = list(line, key, value)?,
            ("sampling", "verify_count") => cfg.sampling.verify_count = integer(line, key, value)?,
            ("sampling", "verify_times") => cfg.sampling.verify_times = list(line, key, value)?,
            ("sampling", "residual_step") => cfg.sampling.residual_step = number(line, key, value)?,
            ("sampling", "identity_step") => cfg.sampling.identity_step = number(line, key, value)?,
            ("sampling", "identity_tol") => cfg.sampling.identity_tol = number(line, key, value)?,
            ("grid", "lo") => cfg.grid.lo = fixed(line, key, value)?,
            ("grid", "hi") => cfg.grid.hi = fixed(line, key, value)?,
            ("grid", "levels") => {
                cfg.grid.levels = value
                    .split(',')
                    .map(|p| integer(line, key, p))
                    .collect::<Result<Vec<usize>>>()?
            }
            ("grid", "final_time") => cfg.grid.final_time = number(line, key, value)?,
            ("grid", "cfl") => cfg.grid.cfl = number(line, key, value)?,
            ("grid", "boundary") => {
                cfg.grid.boundary = match value {
                    "exact" => BoundaryKind::Exact,
                    "zero" => BoundaryKind::Zero,
                    other => return Err(parse_err(line, format!("`boundary`: expected exact or zero, got `{other}`"))),
                }
            }
            ("output", "format") => cfg.output.format = parse_format(value).ok_or_else(|| {
                parse_err(line, format!("`format`: expected csv or vtk, got `{value}`"))
            })?,
            ("output", "path") => {
                if value.is_empty() {
                    return Err(parse_err(line, "`path` must not be empty"));
                }
                cfg.output.path = Some(PathBuf::from(value));
            }
            ("output", "point") => cfg.output.points.push(fixed(line, key, value)?),
            ("output", "time") => cfg.output.time = number(line, key, value)?,
            ("output", "volume_resolution") => cfg.output.volume_resolution = integer(line, key, value)?,
            ("output", k) if k.starts_with("slice_") => {
                slice.first_line.get_or_insert(line);
                match k {
                    "slice_axis" => slice.axis = Some(parse_axis(line, value)?),
                    "slice_offset" => slice.offset = Some(number(line, key, value)?),
                    "slice_resolution" => {
                        let v = value
                            .split(',')
                            .map(|p| integer(line, key, p))
                            .collect::<Result<Vec<usize>>>()?;
                        slice.resolution = Some(v.try_into().map_err(|_| {
                            parse_err(line, "`slice_resolution`: expected two comma-separated integers")
                        })?);
                    }
                    "slice_lo" => slice.lo = Some(fixed(line, key, value)?),
                    _ => slice.hi = Some(fixed(line, key, value)?),
                }
            }
            _ => unreachable!("key list and match arms agree"),
        }
    }

    cfg.material = MaterialSpec {
        rho: material.rho.ok_or_else(|| range("material.rho", "missing"))?,
        lambda: material.lambda.ok_or_else(|| range("material.lambda", "missing"))?,
        mu: material.mu.ok_or_else(|| range("material.mu", "missing"))?,
    };
    if let Some(first) = slice.first_line {
        let axis = slice
            .axis
            .ok_or_else(|| parse_err(first, "slice keys need `slice_axis`"))?;
        cfg.output.slice = Some(SliceSpec {
            axis,
            offset: slice.offset.unwrap_or(0.0),
            resolution: slice.resolution.unwrap_or([21, 21]),
            lo: slice.lo.unwrap_or([-2.0; 2]),
            hi: slice.hi.unwrap_or([2.0; 2]),
        });
    }
    check_ranges(&cfg)?;
    Ok(cfg)
}

pub fn parse_format(s: &str) -> Option<Format> {
    match s {
        "csv" => Some(Format::Csv),
        "vtk" => Some(Format::Vtk),
        _ => None,
    }
}

fn positive(key: impl Into<String>, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(range(key, format!("must be positive, got {v}")))
    }
}

fn ordered_box(key: &str, lo: &[f64], hi: &[f64]) -> Result<()> {
    if lo.iter().zip(hi).all(|(l, h)| l < h) {
        Ok(())
    } else {
        Err(range(key, format!("need lo < hi on every axis, got {lo:?} and {hi:?}")))
    }
}

fn check_shape(key: &str, shape: &ShapeSpec) -> Result<()> {
    match shape {
        ShapeSpec::Ridge { profile, .. } => {
            let sigma = match profile {
                ProfileSpec::Gaussian { sigma, .. }
                | ProfileSpec::DerivativeOfGaussian { sigma, .. }
                | ProfileSpec::SineGaussian { sigma, .. }
                | ProfileSpec::PolyGaussian { sigma, .. } => *sigma,
            };
            positive(format!("{key}.sigma"), sigma)
        }
        ShapeSpec::Rotational { width } | ShapeSpec::Radial { width } | ShapeSpec::Blob { width } => {
            positive(format!("{key}.width"), *width)
        }
    }
}

fn check_ranges(cfg: &RunConfig) -> Result<()> {
    let m = &cfg.material;
    positive("material.rho", m.rho)?;
    positive("material.mu", m.mu)?;
    if !(m.lambda + 2.0 * m.mu > 0.0) {
        return Err(range("material.lambda", format!("lambda + 2 mu must be positive, got {}", m.lambda + 2.0 * m.mu)));
    }
    for (name, terms) in [("phi", &cfg.phi), ("psi", &cfg.psi)] {
        for (i, t) in terms.iter().enumerate() {
            check_shape(&format!("{name}.term[{}]", i + 1), &t.shape)?;
        }
    }
    for (i, t) in cfg.forcing.terms.iter().enumerate() {
        check_shape(&format!("forcing.term[{}]", i + 1), &t.shape)?;
    }

    let tol = &cfg.tolerances;
    positive("tolerances.quad_rel", tol.quad_rel)?;
    if tol.quad_rel >= 1.0 {
        return Err(range("tolerances.quad_rel", format!("must be below 1, got {}", tol.quad_rel)));
    }
    positive("tolerances.fd_step", tol.fd_step)?;
    positive("tolerances.check_tol", tol.check_tol)?;

    let s = &cfg.sampling;
    ordered_box("sampling.lo", &s.lo, &s.hi)?;
    if let Some(t) = s.times.iter().find(|t| **t < 0.0) {
        return Err(range("sampling.times", format!("times must be non-negative, got {t}")));
    }
    if s.times.is_empty() {
        return Err(range("sampling.times", "need at least one time"));
    }
    for r in &s.decay_radii {
        positive("sampling.decay_radii", *r)?;
    }
    if s.verify_count == 0 {
        return Err(range("sampling.verify_count", "must be at least 1"));
    }
    if s.verify_times.is_empty() {
        return Err(range("sampling.verify_times", "need at least one time"));
    }
    if let Some(t) = s.verify_times.iter().find(|t| **t < 0.0) {
        return Err(range("sampling.verify_times", format!("times must be non-negative, got {t}")));
    }
    positive("sampling.residual_step", s.residual_step)?;
    positive("sampling.identity_step", s.identity_step)?;
    positive("sampling.identity_tol", s.identity_tol)?;

    let g = &cfg.grid;
    ordered_box("grid.lo", &g.lo, &g.hi)?;
    if g.levels.iter().any(|&n| n < 2) {
        return Err(range("grid.levels", format!("every level needs at least 2 cells, got {:?}", g.levels)));
    }
    if g.levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(range("grid.levels", format!("levels must increase, got {:?}", g.levels)));
    }
    positive("grid.final_time", g.final_time)?;
    if !(g.cfl > 0.0 && g.cfl <= 0.9) {
        return Err(range("grid.cfl", format!("must lie in (0, 0.9], got {}", g.cfl)));
    }

    let o = &cfg.output;
    if o.time < 0.0 {
        return Err(range("output.time", format!("must be non-negative, got {}", o.time)));
    }
    if let Some(p) = o.points.iter().find(|p| p[0] < 0.0) {
        return Err(range("output.point", format!("time must be non-negative, got {}", p[0])));
    }
    if o.volume_resolution < 2 {
        return Err(range("output.volume_resolution", format!("need at least 2 nodes, got {}", o.volume_resolution)));
    }
    if let Some(sl) = &o.slice {
        if sl.resolution.iter().any(|&r| r < 2) {
            return Err(range("output.slice_resolution", format!("need at least 2 per axis, got {:?}", sl.resolution)));
        }
        ordered_box("output.slice_lo", &sl.lo, &sl.hi)?;
    }
    Ok(())
}

fn nums(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn render_direction(d: [i8; 3]) -> String {
    d.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

fn render_shape(shape: &ShapeSpec) -> String {
    match shape {
        ShapeSpec::Ridge { profile, direction } => {
            let call = match profile {
                ProfileSpec::Gaussian { sigma, center } => format!("gaussian(sigma={sigma}, center={center})"),
                ProfileSpec::DerivativeOfGaussian { sigma, center } => {
                    format!("derivative_of_gaussian(sigma={sigma}, center={center})")
                }
                ProfileSpec::SineGaussian { k, sigma, center } => {
                    format!("sine_gaussian(k={k}, sigma={sigma}, center={center})")
                }
                ProfileSpec::PolyGaussian {
                    coefficients: c,
                    sigma,
                    center,
                } => format!(
                    "poly_gaussian(c0={}, c1={}, c2={}, c3={}, c4={}, sigma={sigma}, center={center})",
                    c[0], c[1], c[2], c[3], c[4]
                ),
            };
            format!("{call} @ {}", render_direction(*direction))
        }
        ShapeSpec::Rotational { width } => format!("rotational(width={width})"),
        ShapeSpec::Radial { width } => format!("radial(width={width})"),
        ShapeSpec::Blob { width } => format!("blob(width={width})"),
    }
}

fn render_envelope(e: &EnvelopeSpec) -> String {
    match e {
        EnvelopeSpec::Constant => "constant()".into(),
        EnvelopeSpec::Exponential { rate } => format!("exponential(rate={rate})"),
        EnvelopeSpec::Cosine { omega } => format!("cosine(omega={omega})"),
    }
}

/// Canonical text of a configuration; `parse_config` reads it back to an
/// equal value.
pub fn render_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let m = &cfg.material;
    let _ = writeln!(s, "[material]\nrho = {}\nlambda = {}\nmu = {}", m.rho, m.lambda, m.mu);
    for (name, terms) in [("phi", &cfg.phi), ("psi", &cfg.psi)] {
        let _ = writeln!(s, "\n[{name}]");
        for t in terms {
            let _ = writeln!(s, "term = {} * {}", t.coefficient, render_shape(&t.shape));
        }
    }
    let _ = writeln!(s, "\n[forcing]\nstrong = {}", cfg.forcing.strong);
    for t in &cfg.forcing.terms {
        let _ = writeln!(
            s,
            "term = {} * {} * {}",
            t.coefficient,
            render_envelope(&t.envelope),
            render_shape(&t.shape)
        );
    }
    let tol = &cfg.tolerances;
    let _ = writeln!(
        s,
        "\n[tolerances]\nquad_rel = {}\nfd_step = {}\ncheck_tol = {}",
        tol.quad_rel, tol.fd_step, tol.check_tol
    );
    let sm = &cfg.sampling;
    let _ = writeln!(s, "\n[sampling]\nlo = {}\nhi = {}", nums(&sm.lo), nums(&sm.hi));
    let _ = writeln!(s, "count = {}\ntimes = {}\nseed = {}", sm.count, nums(&sm.times), sm.seed);
    let _ = writeln!(s, "decay_radii = {}", nums(&sm.decay_radii));
    let _ = writeln!(s, "verify_count = {}\nverify_times = {}", sm.verify_count, nums(&sm.verify_times));
    let _ = writeln!(
        s,
        "residual_step = {}\nidentity_step = {}\nidentity_tol = {}",
        sm.residual_step, sm.identity_step, sm.identity_tol
    );
    let g = &cfg.grid;
    let levels = g.levels.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ");
    let _ = writeln!(s, "\n[grid]\nlo = {}\nhi = {}\nlevels = {levels}", nums(&g.lo), nums(&g.hi));
    let boundary = match g.boundary {
        BoundaryKind::Exact => "exact",
        BoundaryKind::Zero => "zero",
    };
    let _ = writeln!(s, "final_time = {}\ncfl = {}\nboundary = {boundary}", g.final_time, g.cfl);
    let o = &cfg.output;
    let _ = writeln!(s, "\n[output]\nformat = {}", o.format.name());
    if let Some(p) = &o.path {
        let _ = writeln!(s, "path = {}", p.display());
    }
    for p in &o.points {
        let _ = writeln!(s, "point = {}", nums(p));
    }
    let _ = writeln!(s, "time = {}\nvolume_resolution = {}", o.time, o.volume_resolution);
    if let Some(sl) = &o.slice {
        let _ = writeln!(
            s,
            "slice_axis = {}\nslice_offset = {}\nslice_resolution = {}, {}\nslice_lo = {}\nslice_hi = {}",
            sl.axis.index() + 1,
            sl.offset,
            sl.resolution[0],
            sl.resolution[1],
            nums(&sl.lo),
            nums(&sl.hi)
        );
    }
    s
}
