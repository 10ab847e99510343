//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error. Artifacts go
//! to `--out`, else to `$QUASILOCAL_OUT_DIR/<command>.<ext>`, else to stdout.
//! Notices and summaries go to stderr.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasilocal_core::dyson::{
    cholesky_dyson, factor_diagonal, hermitize, tridiagonal_omega, DysonMap, HermitizeOptions,
};
use quasilocal_core::lattice::LatticeHamiltonian;
use quasilocal_core::metric::{
    closed_form_theta, diagonal_multiparam_metric, gamma_family, positivity_check,
    solve_band_metric, solver_window, superpose, MetricSpec, Positivity,
};
use quasilocal_core::scattering::{kappa_grid, solve_scattering, Incidence, ScatteringOptions};
use quasilocal_core::{DysonError, Real};
use serde_json::{json, Value};

use crate::fixtures;
use crate::json::{
    band_to_json, dyson_to_json, float_value, metric_to_json, JsonScalar, ModelDescriptor,
    ModelName, ScalarValue,
};

pub const OUT_DIR_ENV: &str = "QUASILOCAL_OUT_DIR";

pub const CSV_HEADER: &str = "kappa,E,Re(R),Im(R),Re(T),Im(T),deficit";

#[derive(Parser, Debug)]
#[command(
    name = "quasilocal",
    version,
    about = "Quasilocal metrics, Dyson maps and scattering for non-Hermitian lattice Hamiltonians"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a metric Θ and check H†Θ = ΘH on the interior.
    Metric(MetricArgs),
    /// Scan reflection and transmission over a wavenumber grid (CSV).
    Scatter(ScatterArgs),
    /// Factor a metric into Ω and form 𝔥 = ΩHΩ⁻¹.
    Hermitize(HermitizeArgs),
    /// Positivity of 2Θ₁ + γΘ₂ over a γ grid.
    Positivity(PositivityArgs),
    /// Replay the bundled reference matrices exactly.
    VerifyFixtures(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalarMode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OmegaKind {
    Diagonal,
    Tridiagonal,
    Cholesky,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Left,
    Right,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Scalar field: exact rationals or floats. Decimal inputs force floats.
    #[arg(long, value_enum, default_value = "exact")]
    pub scalar: ScalarMode,
    /// Output file for the primary artifact.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// point-defect, two-center, multiparam or free.
    #[arg(long, default_value = "point-defect")]
    pub model: String,
    /// Coupling, as "p/q" or a decimal.
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub g: String,
    /// Two-center separation.
    #[arg(long = "M")]
    pub separation: Option<usize>,
    /// Multiparameter couplings, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Vec<String>,
    /// Window half-width: sites -N..=N.
    #[arg(long = "N")]
    pub window: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MetricArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Metric range: Θ_R has R nonzero diagonals.
    #[arg(long = "R", default_value_t = 1)]
    pub range: usize,
    /// Superposition weights α₁, …, α_R (point defect only).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Vec<String>,
    /// Solve the linear system instead of using the closed form.
    #[arg(long)]
    pub solve: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of wavenumbers.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.1)]
    pub kappa_min: f64,
    /// Defaults to π − 0.1.
    #[arg(long)]
    pub kappa_max: Option<f64>,
    /// Largest accepted unitarity deficit.
    #[arg(long, default_value_t = 1e-10)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value = "left")]
    pub incidence: Side,
    /// Extra free sites between the defect and the matching sites.
    #[arg(long, default_value_t = 0)]
    pub padding: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct HermitizeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "diagonal")]
    pub omega: OmegaKind,
    /// γ of the metric 2Θ₁ + γΘ₂ factored by `--omega cholesky`.
    #[arg(long, default_value = "-1/2", allow_hyphen_values = true)]
    pub gamma: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct PositivityArgs {
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub g: String,
    #[arg(long = "N", default_value_t = 20)]
    pub window: usize,
    /// lo:hi:step
    #[arg(long, default_value = "-3/2:3/2:1/4", allow_hyphen_values = true)]
    pub gamma_grid: String,
    /// Bisection steps used to refine each sign change.
    #[arg(long, default_value_t = 20)]
    pub refine: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub g: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Metric(a) => cmd_metric(&a),
        Command::Scatter(a) => cmd_scatter(&a),
        Command::Hermitize(a) => cmd_hermitize(&a),
        Command::Positivity(a) => cmd_positivity(&a),
        Command::VerifyFixtures(a) => cmd_verify_fixtures(&a),
    }
}

fn parse_value(text: &str) -> Result<ScalarValue, CliError> {
    ScalarValue::parse(text).map_err(usage)
}

/// Float mode if requested or if any input is a decimal.
fn resolve_mode(requested: ScalarMode, values: &[&ScalarValue]) -> ScalarMode {
    if requested == ScalarMode::Exact && values.iter().any(|v| !v.is_exact()) {
        eprintln!("note: decimal input, switching to float mode");
        return ScalarMode::Float;
    }
    requested
}

fn descriptor(m: &ModelArgs, default_window: usize) -> Result<ModelDescriptor, CliError> {
    let model =
        ModelName::parse(&m.model).ok_or_else(|| usage(format!("unknown model `{}`", m.model)))?;
    let params = m
        .params
        .iter()
        .map(|p| parse_value(p))
        .collect::<Result<Vec<_>, _>>()?;
    let g = match model {
        ModelName::PointDefect | ModelName::TwoCenter => Some(parse_value(&m.g)?),
        _ => None,
    };
    if model == ModelName::TwoCenter && m.separation.is_none() {
        return Err(usage("two-center needs --M"));
    }
    if model == ModelName::MultiParam && params.is_empty() {
        return Err(usage("multiparam needs --params"));
    }
    Ok(ModelDescriptor {
        model,
        g,
        separation: m.separation.filter(|_| model == ModelName::TwoCenter),
        params: if model == ModelName::MultiParam {
            params
        } else {
            Vec::new()
        },
        window: m.window.unwrap_or(default_window),
    })
}

fn descriptor_values(d: &ModelDescriptor) -> Vec<&ScalarValue> {
    d.g.iter().chain(&d.params).collect()
}

fn require_window(window: usize, range: usize) -> Result<(), CliError> {
    if window < 2 * range + 4 {
        return Err(usage(format!(
            "window N = {window} too small for R = {range}: need N >= 2R + 4 = {}",
            2 * range + 4
        )));
    }
    Ok(())
}

fn build<T: JsonScalar>(d: &ModelDescriptor) -> Result<LatticeHamiltonian<T>, CliError> {
    d.build::<T>().map_err(usage)
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, content)
        .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

/// Writes the primary artifact; returns its path, or `None` for stdout.
fn emit(common: &Common, default_name: &str, content: &str) -> Result<Option<PathBuf>, CliError> {
    let path = match (&common.out, std::env::var_os(OUT_DIR_ENV)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(PathBuf::from(dir).join(default_name)),
        (None, None) => None,
    };
    match path {
        Some(p) => {
            write_file(&p, content)?;
            eprintln!("wrote {}", p.display());
            Ok(Some(p))
        }
        None => {
            print!("{content}");
            Ok(None)
        }
    }
}

fn metric_for<T: JsonScalar + Real>(
    a: &MetricArgs,
    d: &ModelDescriptor,
    h: &LatticeHamiltonian<T>,
) -> Result<MetricSpec<T>, CliError> {
    let r = a.range;
    let n = d.window;
    let solve = |diamond: usize| -> Result<MetricSpec<T>, CliError> {
        let need = solver_window(r, diamond);
        if n < need {
            return Err(usage(format!("solver needs N >= {need} for R = {r}")));
        }
        solve_band_metric(&h.matrix, r, diamond)
            .map_err(|e| CliError::Verification(format!("no band metric found: {e}")))
    };
    match d.model {
        ModelName::PointDefect | ModelName::FreeLaplacian => {
            let g = match d.model {
                ModelName::PointDefect => d.coupling::<T>().map_err(usage)?,
                _ => T::zero(),
            };
            if !a.alphas.is_empty() {
                let alphas = a
                    .alphas
                    .iter()
                    .map(|s| {
                        T::from_scalar_value(&parse_value(s)?)
                            .ok_or_else(|| usage("alphas must match the scalar mode"))
                    })
                    .collect::<Result<Vec<T>, _>>()?;
                let terms = alphas
                    .into_iter()
                    .enumerate()
                    .map(|(k, alpha)| Ok((alpha, closed_form_theta(k + 1, g.clone(), n)?)))
                    .collect::<Result<Vec<_>, quasilocal_core::MetricError>>()
                    .map_err(usage)?;
                return superpose(&terms).map_err(usage);
            }
            if a.solve {
                return solve(r + 1);
            }
            closed_form_theta(r, g, n).map_err(usage)
        }
        ModelName::TwoCenter => {
            let m = d.separation.unwrap_or(1);
            solve(r + 2 * m - 1)
        }
        ModelName::MultiParam => {
            if r != 1 {
                return Err(usage("the multiparameter metric is diagonal: use --R 1"));
            }
            let params = d
                .params
                .iter()
                .map(|p| T::from_scalar_value(p).ok_or_else(|| usage("params must be exact")))
                .collect::<Result<Vec<T>, _>>()?;
            diagonal_multiparam_metric(params, n).map_err(usage)
        }
    }
}

fn run_metric<T: JsonScalar + Real>(a: &MetricArgs, d: &ModelDescriptor) -> Result<(), CliError> {
    let h = build::<T>(d)?;
    let spec = metric_for(a, d, &h)?;
    let res = spec.residual(&h.matrix).map_err(usage)?;
    let scale = spec
        .matrix
        .entries()
        .map(|(_, _, v)| v.abs())
        .fold(T::one(), |acc, v| if v > acc { v } else { acc });
    let zero = if T::KIND.is_exact() {
        res.interior_is_zero()
    } else {
        res.interior_max_abs.to_f64() <= 1e-10 * scale.to_f64()
    };
    let positivity = positivity_check(&spec).map_err(usage)?;
    let out = json!({
        "model": d.to_json(),
        "metric": metric_to_json(&spec),
        "residual": {
            "interior_radius": res.interior_radius,
            "interior_max_abs": res.interior_max_abs.to_json(),
            "zero": zero,
        },
        "positivity": positivity_json(&positivity),
    });
    emit(&a.common, "metric.json", &render(&out))?;
    eprintln!(
        "metric: {} diagonals, residual {} on interior radius {}",
        spec.matrix.offsets().count(),
        if zero { "zero" } else { "NONZERO" },
        res.interior_radius
    );
    if zero {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "residual H†Θ − ΘH is {} on the interior",
            res.interior_max_abs.to_f64()
        )))
    }
}

fn positivity_json(p: &Positivity) -> Value {
    match p {
        Positivity::Positive => json!({ "positive": true, "failing_site": null }),
        Positivity::NotPositive { site } => json!({ "positive": false, "failing_site": site }),
    }
}

pub fn cmd_metric(a: &MetricArgs) -> Result<(), CliError> {
    let d = descriptor(&a.model, 2 * a.range + 10)?;
    require_window(d.window, a.range)?;
    let alphas = a
        .alphas
        .iter()
        .map(|s| parse_value(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut values = descriptor_values(&d);
    values.extend(&alphas);
    match resolve_mode(a.common.scalar, &values) {
        ScalarMode::Exact => run_metric::<quasilocal_core::Rational>(a, &d),
        ScalarMode::Float => run_metric::<f64>(a, &d),
    }
}

pub fn cmd_scatter(a: &ScatterArgs) -> Result<(), CliError> {
    let d = descriptor(&a.model, 20)?;
    if a.common.scalar == ScalarMode::Exact {
        eprintln!("note: scattering amplitudes are complex floats; running in float mode");
    }
    let h = build::<f64>(&d)?;
    let hi = a.kappa_max.unwrap_or(std::f64::consts::PI - 0.1);
    if a.grid == 0 {
        return Err(usage("--grid must be positive"));
    }
    let options = ScatteringOptions {
        incidence: match a.incidence {
            Side::Left => Incidence::Left,
            Side::Right => Incidence::Right,
        },
        padding: a.padding,
    };
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let (mut max_deficit, mut max_condition, mut singular) = (0.0_f64, 0.0_f64, 0usize);
    for kappa in kappa_grid(a.kappa_min, hi, a.grid) {
        match solve_scattering(&h.matrix, kappa, options) {
            Ok(r) => {
                max_deficit = max_deficit.max(r.unitarity_deficit);
                max_condition = max_condition.max(r.condition_number);
                csv.push_str(&format!(
                    "{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}\n",
                    r.kappa,
                    r.energy,
                    r.reflection.re,
                    r.reflection.im,
                    r.transmission.re,
                    r.transmission.im,
                    r.unitarity_deficit
                ));
            }
            Err(quasilocal_core::ScatteringError::Singular) => singular += 1,
            Err(e) => return Err(usage(e)),
        }
    }
    let passed = max_deficit <= a.threshold && singular == 0;
    let summary = json!({
        "model": d.to_json(),
        "grid": a.grid,
        "kappa_min": float_value(a.kappa_min),
        "kappa_max": float_value(hi),
        "incidence": format!("{:?}", a.incidence).to_lowercase(),
        "max_deficit": float_value(max_deficit),
        "max_condition": float_value(max_condition),
        "singular_points": singular,
        "threshold": float_value(a.threshold),
        "passed": passed,
    });
    let summary_text = render(&summary);
    match emit(&a.common, "scatter.csv", &csv)? {
        Some(path) => write_file(&path.with_extension("summary.json"), &summary_text)?,
        None => eprint!("{summary_text}"),
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "max unitarity deficit {max_deficit:e} (threshold {:e}), {singular} singular points",
            a.threshold
        )))
    }
}

fn run_hermitize<T>(a: &HermitizeArgs, d: &ModelDescriptor) -> Result<(), CliError>
where
    T: JsonScalar + Real,
    T::Sqrt: JsonScalar,
{
    let h = build::<T>(d)?;
    let n = d.window;
    let map: DysonMap<T::Sqrt> = match a.omega {
        OmegaKind::Diagonal => {
            let theta = match d.model {
                ModelName::PointDefect => {
                    closed_form_theta(1, d.coupling::<T>().map_err(usage)?, n)
                }
                ModelName::FreeLaplacian => closed_form_theta(1, T::zero(), n),
                ModelName::MultiParam => diagonal_multiparam_metric(
                    d.params
                        .iter()
                        .map(|p| {
                            T::from_scalar_value(p).ok_or_else(|| usage("params must be exact"))
                        })
                        .collect::<Result<Vec<T>, _>>()?,
                    n,
                ),
                ModelName::TwoCenter => {
                    let m = d.separation.unwrap_or(1);
                    solve_band_metric(&h.matrix, 1, 2 * m)
                }
            }
            .map_err(usage)?;
            factor_diagonal(&theta.matrix).map_err(usage)?
        }
        OmegaKind::Tridiagonal => {
            if d.model != ModelName::PointDefect {
                return Err(usage(
                    "--omega tridiagonal is defined for the point defect only",
                ));
            }
            tridiagonal_omega(d.coupling::<T>().map_err(usage)?, n).map_err(usage)?
        }
        OmegaKind::Cholesky => unreachable!("handled in float mode"),
    };
    finish_hermitize(a, d, &h.matrix.lift(), &map)
}

fn run_cholesky(
    a: &HermitizeArgs,
    d: &ModelDescriptor,
    gamma: &ScalarValue,
) -> Result<(), CliError> {
    if d.model != ModelName::PointDefect {
        return Err(usage(
            "--omega cholesky factors 2Θ₁ + γΘ₂ of the point defect",
        ));
    }
    let h = build::<f64>(d)?;
    let g = d.coupling::<f64>().map_err(usage)?;
    let theta = gamma_family(g, gamma.to_f64(), d.window).map_err(usage)?;
    let map = cholesky_dyson(&theta.matrix).map_err(|e| match e {
        DysonError::Cholesky(_) => {
            CliError::Verification(format!("metric is not positive definite: {e}"))
        }
        other => usage(other),
    })?;
    finish_hermitize(a, d, &h.matrix, &map)
}

fn finish_hermitize<S: JsonScalar>(
    a: &HermitizeArgs,
    d: &ModelDescriptor,
    h: &quasilocal_core::BandMatrix<S>,
    map: &DysonMap<S>,
) -> Result<(), CliError> {
    let result = hermitize(h, map, HermitizeOptions::default());
    let out = match &result {
        Ok(hh) => {
            let mut report = json!({ "interior_radius": hh.interior_radius, "exact": hh.exact });
            if !S::KIND.is_exact() {
                report["deficit"] = float_value(hh.deficit);
            }
            json!({
                "model": d.to_json(),
                "omega": dyson_to_json(map),
                "h": band_to_json(&hh.matrix),
                "hermiticity": report,
            })
        }
        Err(DysonError::HermiticityViolation { deficit }) => {
            return Err(CliError::Verification(format!(
                "𝔥 is not Hermitian on the interior (deficit {deficit:e})"
            )))
        }
        Err(e) => return Err(usage(e)),
    };
    if let Some(w) = map.warning {
        eprintln!("warning: {w}");
    }
    emit(&a.common, "hermitize.json", &render(&out))?;
    eprintln!(
        "hermitize: 𝔥 Hermitian on the interior ({})",
        map.provenance.name()
    );
    Ok(())
}

pub fn cmd_hermitize(a: &HermitizeArgs) -> Result<(), CliError> {
    let d = descriptor(&a.model, 12)?;
    let range = if a.omega == OmegaKind::Diagonal { 1 } else { 2 };
    require_window(d.window, range)?;
    let gamma = parse_value(&a.gamma)?;
    if a.omega == OmegaKind::Cholesky {
        if a.common.scalar == ScalarMode::Exact {
            eprintln!("note: the triangular factor is computed in float mode");
        }
        return run_cholesky(a, &d, &gamma);
    }
    match resolve_mode(a.common.scalar, &descriptor_values(&d)) {
        ScalarMode::Exact => run_hermitize::<quasilocal_core::Rational>(a, &d),
        ScalarMode::Float => run_hermitize::<f64>(a, &d),
    }
}

/// `lo:hi:step` as a list of grid values, endpoints included.
fn gamma_grid<T: JsonScalar + Real>(spec: &[ScalarValue; 3]) -> Result<Vec<T>, CliError> {
    let conv = |v: &ScalarValue| {
        T::from_scalar_value(v).ok_or_else(|| usage("grid must match the scalar mode"))
    };
    let (lo, hi, step) = (conv(&spec[0])?, conv(&spec[1])?, conv(&spec[2])?);
    if step <= T::zero() || hi < lo {
        return Err(usage("gamma grid needs lo <= hi and a positive step"));
    }
    let span = (hi.clone() - lo.clone()).to_f64() / step.to_f64();
    if span > 1e5 {
        return Err(usage("gamma grid has too many points"));
    }
    let count = (span + 1e-9).floor() as i64;
    Ok((0..=count)
        .map(|k| lo.clone() + T::from_i64(k) * step.clone())
        .collect())
}

fn run_positivity<T: JsonScalar + Real>(
    a: &PositivityArgs,
    g: &ScalarValue,
    grid: &[ScalarValue; 3],
) -> Result<(), CliError> {
    let g = T::from_scalar_value(g).ok_or_else(|| usage("g must match the scalar mode"))?;
    let check = |gamma: &T| -> Result<Positivity, CliError> {
        positivity_check(&gamma_family(g.clone(), gamma.clone(), a.window).map_err(usage)?)
            .map_err(usage)
    };
    let gammas = gamma_grid::<T>(grid)?;
    let mut rows = Vec::new();
    let mut states = Vec::new();
    for gamma in &gammas {
        let p = check(gamma)?;
        let mut row = positivity_json(&p);
        row["gamma"] = gamma.to_json();
        rows.push(row);
        states.push(p.is_positive());
    }
    let half = T::from_rational(&quasilocal_core::ratio(1, 2));
    let mut transitions = Vec::new();
    for k in 1..gammas.len() {
        if states[k] == states[k - 1] {
            continue;
        }
        let (mut inside, mut outside) = if states[k - 1] {
            (gammas[k - 1].clone(), gammas[k].clone())
        } else {
            (gammas[k].clone(), gammas[k - 1].clone())
        };
        for _ in 0..a.refine {
            let mid = half.clone() * (inside.clone() + outside.clone());
            if check(&mid)?.is_positive() {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        transitions.push(json!({
            "grid": [gammas[k - 1].to_json(), gammas[k].to_json()],
            "inside": inside.to_json(),
            "outside": outside.to_json(),
        }));
        eprintln!(
            "positivity: boundary between γ = {:.6} and {:.6}",
            inside.to_f64(),
            outside.to_f64()
        );
    }
    let out = json!({
        "g": g.to_json(),
        "N": a.window,
        "rows": rows,
        "transitions": transitions,
    });
    emit(&a.common, "positivity.json", &render(&out))?;
    Ok(())
}

pub fn cmd_positivity(a: &PositivityArgs) -> Result<(), CliError> {
    require_window(a.window, 2)?;
    let g = parse_value(&a.g)?;
    let parts: Vec<&str> = a.gamma_grid.split(':').collect();
    if parts.len() != 3 {
        return Err(usage("--gamma-grid expects lo:hi:step"));
    }
    let grid = [
        parse_value(parts[0])?,
        parse_value(parts[1])?,
        parse_value(parts[2])?,
    ];
    let values: Vec<&ScalarValue> = std::iter::once(&g).chain(&grid).collect();
    match resolve_mode(a.common.scalar, &values) {
        ScalarMode::Exact => run_positivity::<quasilocal_core::Rational>(a, &g, &grid),
        ScalarMode::Float => run_positivity::<f64>(a, &g, &grid),
    }
}

pub fn cmd_verify_fixtures(a: &VerifyArgs) -> Result<(), CliError> {
    if a.common.scalar == ScalarMode::Float {
        return Err(usage("fixtures are verified in exact mode only"));
    }
    let g = match parse_value(&a.g)? {
        ScalarValue::Exact(g) => g,
        ScalarValue::Float(_) => return Err(usage("fixtures need an exact coupling such as 1/2")),
    };
    let report = fixtures::verify(&g).map_err(usage)?;
    for m in &report.matrices {
        eprintln!(
            "{:<28} {:>4} entries  {}",
            m.name,
            m.checked,
            if m.passed() { "ok" } else { "MISMATCH" }
        );
        for e in &m.errata {
            eprintln!(
                "    erratum at {:?}: printed {}, computed {}",
                e.at, e.printed, e.computed
            );
        }
    }
    emit(&a.common, "fixtures.json", &render(&report.to_json()))?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification("fixture mismatch".to_string()))
    }
}
