//! The five subcommands. Each reads a validated configuration, writes its
//! outputs and `report.json` into the output directory and returns an
//! [`Outcome`].

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;
use wavefocus::ensemble::{effective_medium_compare, sample_particles};
use wavefocus::forward::{solve_scattering, Potential, ScatteringSolution, SolveMethod};
use wavefocus::grid::{far_field_map, ComplexField, DomainGrid, FarField, SphereGrid, WaveContext};
use wavefocus::inverse::{
    annulus_pattern, cap_pattern, density, design_from_potential, design_with, far_field_singular_values,
    random_source, sphere_capacitance, DesignOptions, DesignTarget, RegularizationPolicy,
};
use wavefocus::io;

use crate::config::{
    wave_context, DesignConfig, DiagnoseConfig, EnsembleConfig, EnsembleSource, ForwardConfig, PotentialConfig,
    RegConfig, TargetConfig, VerifyConfig,
};
use crate::error::{CliError, CliResult};
use crate::report::{write_complex, write_far, write_real, write_report, GridSummary};

/// Result of a command that ran to completion.
#[derive(Debug)]
pub struct Outcome {
    /// Whether the command met its acceptance rule.
    pub passed: bool,
    /// Explanation when `passed` is false.
    pub message: String,
}

impl Outcome {
    fn ok() -> Self {
        Self { passed: true, message: String::new() }
    }

    fn check(passed: bool, message: impl FnOnce() -> String) -> Self {
        Self { passed, message: if passed { String::new() } else { message() } }
    }
}

/// Reads and validates a JSON configuration; relative paths inside it are
/// resolved against the configuration's directory.
pub fn load<C: DeserializeOwned>(path: &Path, validate: impl FnOnce(&mut C, &Path) -> CliResult<()>) -> CliResult<C> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read configuration {}: {e}", path.display())))?;
    let mut config: C = serde_json::from_str(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    validate(&mut config, &base)?;
    Ok(config)
}

pub fn prepare_out(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Input(format!("cannot create output directory {}: {e}", dir.display())))
}

fn read_complex(path: &Path) -> CliResult<ComplexField<f64>> {
    io::read_field(io::open(path)?).map_err(|e| located(path, e))
}

fn read_far(path: &Path) -> CliResult<FarField<f64>> {
    io::read_far_field(io::open(path)?).map_err(|e| located(path, e))
}

fn located(path: &Path, e: wavefocus::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn cplx(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

#[derive(Debug, Serialize)]
struct DesignReport {
    k: f64,
    alpha: [f64; 3],
    grid: GridSummary,
    directions: usize,
    target_norm: f64,
    epsilon: f64,
    lambda: f64,
    h_norm: f64,
    residual_fit: f64,
    delta: f64,
    delta_fallback: bool,
    min_psi: f64,
    min_kept_psi: f64,
    cut_fraction: f64,
    residual_final: f64,
    final_bound: f64,
    infeasible_voxels: usize,
    negative_voxels: usize,
    complex_voxels: usize,
    expected_particles: f64,
    passed: bool,
    warnings: Vec<String>,
    files: Vec<&'static str>,
}

/// Designs `q_δ` for the configured target. Passes when
/// `residual_final ≤ 2ε`.
pub fn design(config: &Path, out: &Path, seed: Option<u64>) -> CliResult<Outcome> {
    let mut cfg: DesignConfig = load(config, |c: &mut DesignConfig, base| c.validate(base))?;
    if let (Some(s), TargetConfig::Synthetic { seed, .. }) = (seed, &mut cfg.target) {
        *seed = s;
    }
    prepare_out(out)?;
    let grid = cfg.grid.build()?;
    let context = wave_context(cfg.k, cfg.alpha)?;
    let generated_sphere = || cfg.sphere.as_ref().expect("validated").build();
    let f = match &cfg.target {
        TargetConfig::Cap { axis, half_angle_deg, amplitude } => {
            cap_pattern(&generated_sphere()?, *axis, half_angle_deg.to_radians(), cplx(*amplitude))?
        }
        TargetConfig::Annulus { axis, inner_deg, outer_deg, amplitude } => annulus_pattern(
            &generated_sphere()?,
            *axis,
            inner_deg.to_radians(),
            outer_deg.to_radians(),
            cplx(*amplitude),
        )?,
        TargetConfig::File { path } => read_far(path)?,
        TargetConfig::Synthetic { seed, scale } => {
            let h = random_source(&grid, *seed).map(|z| z * *scale);
            far_field_map(&grid, &generated_sphere()?, cfg.k, &h)?
        }
        TargetConfig::Zero => FarField::zeros(&generated_sphere()?),
    };
    let sphere = Arc::clone(f.sphere());
    let target = match (cfg.epsilon, cfg.relative_epsilon) {
        (Some(e), _) => DesignTarget::new(f, e, context)?,
        (None, Some(r)) => {
            if f.l2_norm() == 0.0 {
                return Err(CliError::Input("relative_epsilon needs a nonzero target; use epsilon".into()));
            }
            DesignTarget::relative(f, r, context)?
        }
        (None, None) => unreachable!("validated"),
    };
    let reg = match cfg.reg {
        RegConfig::Discrepancy => RegularizationPolicy::Discrepancy,
        RegConfig::Fixed { lambda } => RegularizationPolicy::Fixed(lambda),
    };
    let mut options = DesignOptions::new(reg);
    options.particle_radius = cfg.particle_radius;
    if let Some(path) = &cfg.background {
        options.background = Some(on_grid(read_complex(path)?, &grid, path)?);
    }
    let r = design_with(&target, &grid, &sphere, &options)?;

    write_complex(out, "q_delta.field", r.q_delta.field())?;
    write_complex(out, "h_delta.field", &r.h_delta)?;
    write_complex(out, "psi.field", &r.psi)?;
    write_complex(out, "psi_delta.field", &r.psi_delta)?;
    write_real(out, "density_raw.field", &r.density.raw)?;
    write_real(out, "density_clipped.field", &r.density.clipped)?;
    write_far(out, "target.csv", &r.target.f)?;
    write_far(out, "predicted.csv", &r.predicted)?;

    let bound = 2.0 * r.target.epsilon;
    let passed = r.residual_final <= bound;
    let report = DesignReport {
        k: cfg.k,
        alpha: context.alpha(),
        grid: GridSummary::of(&grid),
        directions: sphere.len(),
        target_norm: r.target.f.l2_norm(),
        epsilon: r.target.epsilon,
        lambda: r.lambda,
        h_norm: r.h_norm,
        residual_fit: r.residual_fit,
        delta: r.delta,
        delta_fallback: r.delta_fallback,
        min_psi: r.min_psi,
        min_kept_psi: r.min_kept_psi,
        cut_fraction: r.cut_fraction,
        residual_final: r.residual_final,
        final_bound: bound,
        infeasible_voxels: r.infeasible_voxels,
        negative_voxels: r.density.negative_voxels,
        complex_voxels: r.density.complex_voxels,
        expected_particles: r.density.expected_count(),
        passed,
        warnings: r.warnings.clone(),
        files: vec![
            "q_delta.field",
            "h_delta.field",
            "psi.field",
            "psi_delta.field",
            "density_raw.field",
            "density_clipped.field",
            "target.csv",
            "predicted.csv",
        ],
    };
    write_report(out, &report)?;
    Ok(Outcome::check(passed, || format!("residual_final {} exceeds 2 epsilon = {bound}", r.residual_final)))
}

/// Moves a field read from disk onto `grid`, which must describe the same
/// voxels.
fn on_grid(field: ComplexField<f64>, grid: &Arc<DomainGrid<f64>>, path: &Path) -> CliResult<ComplexField<f64>> {
    if !field.grid().same_as(grid) {
        return Err(CliError::Input(format!("{}: field grid differs from the configured grid", path.display())));
    }
    Ok(ComplexField::new(Arc::clone(grid), field.into_values())?)
}

fn method_name(m: SolveMethod) -> &'static str {
    match m {
        SolveMethod::Auto => "auto",
        SolveMethod::Dense => "dense",
        SolveMethod::Iterative => "gmres",
    }
}

fn potential(cfg: &PotentialConfig, context: WaveContext<f64>) -> CliResult<Potential<f64>> {
    let field = match cfg {
        PotentialConfig::File { path } => read_complex(path)?,
        PotentialConfig::Constant { grid, value } => ComplexField::constant(&grid.build()?, cplx(*value)),
    };
    Ok(Potential::new(field, context))
}

#[derive(Debug, Serialize)]
struct ForwardReport {
    k: f64,
    alpha: [f64; 3],
    grid: GridSummary,
    directions: usize,
    tol: f64,
    method: &'static str,
    residual: f64,
    iterations: usize,
    amplitude_norm: f64,
    files: Vec<&'static str>,
}

/// Solves the scattering problem for a potential. Fails when the solver
/// does not reach the tolerance.
pub fn forward(config: &Path, out: &Path, tol: Option<f64>) -> CliResult<Outcome> {
    let mut cfg: ForwardConfig = load(config, |c: &mut ForwardConfig, base| c.validate(base))?;
    if let Some(t) = tol {
        cfg.tol = positive_tol(t)?;
    }
    prepare_out(out)?;
    let context = wave_context(cfg.k, cfg.alpha)?;
    let q = potential(&cfg.potential, context)?;
    let sphere = cfg.sphere.build()?;
    let sol = solve_scattering(&q, &sphere, cfg.tol)?;
    write_complex(out, "u.field", &sol.u)?;
    write_far(out, "amplitude.csv", &sol.amplitude)?;
    write_report(out, &forward_report(&cfg, &context, &q, &sol))?;
    Ok(Outcome::ok())
}

fn forward_report(
    cfg: &ForwardConfig,
    context: &WaveContext<f64>,
    q: &Potential<f64>,
    sol: &ScatteringSolution<f64>,
) -> ForwardReport {
    ForwardReport {
        k: cfg.k,
        alpha: context.alpha(),
        grid: GridSummary::of(q.grid()),
        directions: sol.amplitude.len(),
        tol: cfg.tol,
        method: method_name(sol.method),
        residual: sol.residual,
        iterations: sol.iterations,
        amplitude_norm: sol.amplitude.l2_norm(),
        files: vec!["u.field", "amplitude.csv"],
    }
}

fn positive_tol(t: f64) -> CliResult<f64> {
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(CliError::Input(format!("--tol must be positive, got {t}")))
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    k: f64,
    alpha: [f64; 3],
    grid: GridSummary,
    directions: usize,
    tol: f64,
    method: &'static str,
    residual: f64,
    iterations: usize,
    amplitude_norm: f64,
    predicted_norm: Option<f64>,
    mismatch: Option<f64>,
    tolerance: f64,
    passed: bool,
    files: Vec<&'static str>,
}

/// Solves the forward problem for a designed potential and compares the
/// amplitude with the prediction. Passes when the relative L² mismatch is
/// within the tolerance.
pub fn verify(config: &Path, out: &Path, tol: Option<f64>) -> CliResult<Outcome> {
    let mut cfg: VerifyConfig = load(config, |c: &mut VerifyConfig, base| c.validate(base))?;
    if let Some(t) = tol {
        cfg.tol = positive_tol(t)?;
    }
    let context = wave_context(cfg.k, cfg.alpha)?;
    let q = Potential::new(read_complex(&cfg.potential)?, context);
    let predicted = cfg.predicted.as_deref().map(read_far).transpose()?;
    let sphere = match (&predicted, &cfg.sphere) {
        (Some(p), _) => Arc::clone(p.sphere()),
        (None, Some(s)) => s.build()?,
        (None, None) => unreachable!("validated"),
    };
    prepare_out(out)?;
    let sol = solve_scattering(&q, &sphere, cfg.tol)?;
    write_far(out, "amplitude.csv", &sol.amplitude)?;
    let mismatch = match &predicted {
        Some(p) => Some(relative_mismatch(&sol.amplitude, p)?),
        None => None,
    };
    let passed = mismatch.is_none_or(|m| m <= cfg.tolerance);
    let report = VerifyReport {
        k: cfg.k,
        alpha: context.alpha(),
        grid: GridSummary::of(q.grid()),
        directions: sphere.len(),
        tol: cfg.tol,
        method: method_name(sol.method),
        residual: sol.residual,
        iterations: sol.iterations,
        amplitude_norm: sol.amplitude.l2_norm(),
        predicted_norm: predicted.as_ref().map(FarField::l2_norm),
        mismatch,
        tolerance: cfg.tolerance,
        passed,
        files: vec!["amplitude.csv"],
    };
    write_report(out, &report)?;
    Ok(Outcome::check(passed, || {
        format!("mismatch {} exceeds tolerance {}", mismatch.unwrap_or(f64::NAN), cfg.tolerance)
    }))
}

/// `‖a - p‖ / ‖p‖`, or the absolute distance when `p = 0`.
fn relative_mismatch(a: &FarField<f64>, p: &FarField<f64>) -> CliResult<f64> {
    let d = a.distance(p)?;
    let n = p.l2_norm();
    Ok(if n > 0.0 { d / n } else { d })
}

#[derive(Debug, Serialize)]
struct SeedSummary {
    seed: u64,
    particles: usize,
    mean_spacing: Option<f64>,
    residual: f64,
    distance: f64,
    volume_fraction: f64,
}

#[derive(Debug, Serialize)]
struct RadiusSummary {
    a: f64,
    capacitance: f64,
    mean_particles: f64,
    mean_volume_fraction: f64,
    capacitance_density: f64,
    distance_to_design: f64,
    per_seed: Vec<SeedSummary>,
}

#[derive(Debug, Serialize)]
struct EnsembleReport {
    k: f64,
    alpha: [f64; 3],
    grid: GridSummary,
    directions: usize,
    mean_contrast: f64,
    predicted_norm: f64,
    seeds: Vec<u64>,
    radii: Vec<RadiusSummary>,
    /// Distances in the order of `radii`.
    distances: Vec<f64>,
    /// Whether the distance decreases as the radius decreases.
    decreasing_with_radius: bool,
    tolerance: f64,
    passed: bool,
    files: Vec<String>,
}

/// Samples particle clouds from a designed potential, solves the
/// Foldy–Lax system for each and compares the seed-averaged amplitude
/// with the prediction. Passes when the distance at the smallest radius
/// is within the tolerance.
pub fn ensemble(config: &Path, out: &Path, seed: Option<u64>, tol: Option<f64>) -> CliResult<Outcome> {
    let mut cfg: EnsembleConfig = load(config, |c: &mut EnsembleConfig, base| c.validate(base))?;
    if let Some(s) = seed {
        cfg.seed = s;
        if cfg.seed.checked_add(cfg.n_seeds as u64).is_none() {
            return Err(CliError::Input("seed range overflows".into()));
        }
    }
    if let Some(t) = tol {
        cfg.tol = positive_tol(t)?;
    }
    let context = wave_context(cfg.k, cfg.alpha)?;
    let (q, predicted) = match &cfg.source {
        EnsembleSource::Files { potential, predicted } => {
            (Potential::new(read_complex(potential)?, context), read_far(predicted)?)
        }
        EnsembleSource::Uniform { grid, value, sphere } => {
            let grid = grid.build()?;
            let q = Potential::new(ComplexField::constant(&grid, Complex64::new(*value, 0.0)), context);
            let d = design_from_potential(&q, &sphere.build()?, cfg.tol, cfg.radii[0])?;
            (d.q_delta, d.predicted)
        }
    };
    let sphere: Arc<SphereGrid<f64>> = Arc::clone(predicted.sphere());
    let background = Potential::zero(q.grid(), context);
    let seeds = cfg.seeds();
    prepare_out(out)?;

    let mut radii = Vec::with_capacity(cfg.radii.len());
    let mut files = Vec::new();
    let mut mean_contrast = 0.0;
    for (i, &a) in cfg.radii.iter().enumerate() {
        let r = effective_medium_compare(&q, &background, &predicted, a, &seeds, &sphere)?;
        mean_contrast = r.mean_contrast;
        if cfg.write_clouds && !q.field().is_zero() {
            let dens = density(&q, &background, sphere_capacitance(a))?;
            for &s in &seeds {
                let cloud = sample_particles(&dens.raw, a, s)?;
                let name = format!("cloud_r{i}_s{s}.csv");
                io::create(out.join(&name), |w| io::write_cloud(w, &cloud))?;
                files.push(name);
            }
        }
        radii.push(RadiusSummary {
            a,
            capacitance: r.capacitance,
            mean_particles: r.mean_count,
            mean_volume_fraction: r.mean_volume_fraction,
            capacitance_density: r.capacitance_density,
            distance_to_design: r.distance,
            per_seed: r
                .per_seed
                .iter()
                .map(|s| SeedSummary {
                    seed: s.seed,
                    particles: s.count,
                    mean_spacing: s.mean_spacing,
                    residual: s.residual,
                    distance: s.distance,
                    volume_fraction: s.volume_fraction,
                })
                .collect(),
        });
    }
    let distances: Vec<f64> = radii.iter().map(|r| r.distance_to_design).collect();
    let mut order: Vec<usize> = (0..radii.len()).collect();
    order.sort_by(|&i, &j| cfg.radii[j].total_cmp(&cfg.radii[i]));
    let decreasing_with_radius = order.windows(2).all(|w| distances[w[1]] <= distances[w[0]]);
    let smallest = *order.last().expect("radii not empty");
    let final_distance = distances[smallest];
    let passed = final_distance <= cfg.tolerance;
    let report = EnsembleReport {
        k: cfg.k,
        alpha: context.alpha(),
        grid: GridSummary::of(q.grid()),
        directions: sphere.len(),
        mean_contrast,
        predicted_norm: predicted.l2_norm(),
        seeds,
        radii,
        distances,
        decreasing_with_radius,
        tolerance: cfg.tolerance,
        passed,
        files,
    };
    write_report(out, &report)?;
    Ok(Outcome::check(passed, || {
        format!("distance {final_distance} at the smallest radius exceeds tolerance {}", cfg.tolerance)
    }))
}

#[derive(Debug, Serialize)]
struct DiagnoseReport {
    k: f64,
    grid: GridSummary,
    directions: usize,
    rows: usize,
    cols: usize,
    largest: f64,
    smallest: f64,
    /// `σ_max / σ_min`; `null` when `σ_min = 0`.
    condition_number: f64,
    rank_tolerance: f64,
    numerical_rank: usize,
    monotone: bool,
    files: Vec<&'static str>,
}

/// Singular values of the discretized far-field map.
pub fn diagnose(config: &Path, out: &Path) -> CliResult<Outcome> {
    let cfg: DiagnoseConfig = load(config, |c: &mut DiagnoseConfig, _| c.validate())?;
    prepare_out(out)?;
    let grid = cfg.grid.build()?;
    let sphere = cfg.sphere.build()?;
    let r = far_field_singular_values(&grid, &sphere, cfg.k)?;
    let mut csv = String::from("index,sigma\n");
    for (i, s) in r.singular_values.iter().enumerate() {
        csv.push_str(&format!("{i},{s}\n"));
    }
    fs::write(out.join("singular_values.csv"), csv)?;
    let largest = r.singular_values.first().copied().unwrap_or(0.0);
    let smallest = r.singular_values.last().copied().unwrap_or(0.0);
    let cutoff = cfg.rank_tolerance * largest;
    let report = DiagnoseReport {
        k: cfg.k,
        grid: GridSummary::of(&grid),
        directions: sphere.len(),
        rows: r.rows,
        cols: r.cols,
        largest,
        smallest,
        condition_number: r.condition_number,
        rank_tolerance: cfg.rank_tolerance,
        numerical_rank: r.singular_values.iter().filter(|&&s| s > cutoff).count(),
        monotone: r.is_monotone(),
        files: vec!["singular_values.csv"],
    };
    write_report(out, &report)?;
    Ok(Outcome::ok())
}
