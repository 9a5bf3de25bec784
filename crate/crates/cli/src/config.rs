//! JSON configuration of every command, validated before any computation.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use wavefocus::grid::{Aabb, DomainGrid, Region, SphereGrid, WaveContext};

use crate::error::{CliError, CliResult};

/// Tolerance on `|α| = 1` before the direction is normalized.
const ALPHA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub shape: [usize; 3],
    #[serde(default)]
    pub region: RegionConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionConfig {
    #[default]
    Box,
    Ball {
        center: [f64; 3],
        radius: f64,
    },
}

impl GridConfig {
    pub fn build(&self) -> CliResult<Arc<DomainGrid<f64>>> {
        let region = match self.region {
            RegionConfig::Box => Region::Box,
            RegionConfig::Ball { center, radius } => Region::Ball { center, radius },
        };
        Ok(Arc::new(DomainGrid::new(Aabb::new(self.min, self.max), self.shape, region)?))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereConfig {
    pub n_polar: usize,
    pub n_azimuthal: usize,
}

impl SphereConfig {
    pub fn build(&self) -> CliResult<Arc<SphereGrid<f64>>> {
        Ok(Arc::new(SphereGrid::product(self.n_polar, self.n_azimuthal)?))
    }
}

pub fn wave_context(k: f64, alpha: [f64; 3]) -> CliResult<WaveContext<f64>> {
    let n = alpha.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !((n - 1.0).abs() <= ALPHA_TOL) {
        return Err(CliError::Input(format!("alpha must be a unit vector, |alpha| = {n}")));
    }
    Ok(WaveContext::normalized(k, alpha)?)
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input(format!("{name} must be positive and finite, got {v}")))
    }
}

fn existing(base: &Path, p: &Path) -> CliResult<PathBuf> {
    let full = if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
    if full.is_file() {
        Ok(full)
    } else {
        Err(CliError::Input(format!("input file {} does not exist", full.display())))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    /// `amplitude` on `{β : β·axis ≥ cos(half_angle_deg)}`.
    Cap {
        axis: [f64; 3],
        half_angle_deg: f64,
        amplitude: [f64; 2],
    },
    /// `amplitude` on `{β : cos(outer) ≤ β·axis ≤ cos(inner)}`.
    Annulus {
        axis: [f64; 3],
        inner_deg: f64,
        outer_deg: f64,
        amplitude: [f64; 2],
    },
    /// Far-field file; its directions replace the `sphere` section.
    File {
        path: PathBuf,
    },
    /// `f = B h*` for a seeded Gaussian `h*` scaled by `scale`.
    Synthetic {
        #[serde(default)]
        seed: u64,
        #[serde(default = "one")]
        scale: f64,
    },
    Zero,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegConfig {
    Discrepancy,
    Fixed { lambda: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub k: f64,
    pub alpha: [f64; 3],
    /// Absolute accuracy goal for `‖f - Bh‖`.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Accuracy goal relative to `‖f‖`.
    #[serde(default)]
    pub relative_epsilon: Option<f64>,
    pub grid: GridConfig,
    #[serde(default)]
    pub sphere: Option<SphereConfig>,
    pub target: TargetConfig,
    pub reg: RegConfig,
    #[serde(default = "default_radius")]
    pub particle_radius: f64,
    /// Field file holding the background potential `q₀`.
    #[serde(default)]
    pub background: Option<PathBuf>,
}

fn default_radius() -> f64 {
    0.01
}

impl DesignConfig {
    pub fn validate(&mut self, base: &Path) -> CliResult<()> {
        positive("k", self.k)?;
        wave_context(self.k, self.alpha)?;
        match (self.epsilon, self.relative_epsilon) {
            (Some(e), None) => positive("epsilon", e)?,
            (None, Some(e)) => positive("relative_epsilon", e)?,
            _ => return Err(CliError::Input("exactly one of epsilon and relative_epsilon is required".into())),
        }
        positive("particle_radius", self.particle_radius)?;
        self.grid.build()?;
        match &mut self.target {
            TargetConfig::Cap { axis, half_angle_deg, .. } => {
                unit_axis(axis)?;
                if !(*half_angle_deg > 0.0 && *half_angle_deg <= 180.0) {
                    return Err(CliError::Input(format!("half_angle_deg must lie in (0, 180], got {half_angle_deg}")));
                }
            }
            TargetConfig::Annulus { axis, inner_deg, outer_deg, .. } => {
                unit_axis(axis)?;
                if !(*inner_deg >= 0.0 && inner_deg < outer_deg && *outer_deg <= 180.0) {
                    return Err(CliError::Input("annulus needs 0 <= inner_deg < outer_deg <= 180".into()));
                }
            }
            TargetConfig::File { path } => *path = existing(base, path)?,
            TargetConfig::Synthetic { scale, .. } => positive("scale", *scale)?,
            TargetConfig::Zero => {}
        }
        if !matches!(self.target, TargetConfig::File { .. }) {
            self.sphere
                .as_ref()
                .ok_or_else(|| CliError::Input("sphere is required for generated targets".into()))?
                .build()?;
        }
        if let RegConfig::Fixed { lambda } = self.reg {
            positive("lambda", lambda)?;
        }
        if let Some(p) = &self.background {
            self.background = Some(existing(base, p)?);
        }
        Ok(())
    }
}

fn unit_axis(axis: &[f64; 3]) -> CliResult<()> {
    let n = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input("axis must be a nonzero vector".into()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    /// Field file with the values of `q`.
    File { path: PathBuf },
    /// Constant `value = [re, im]` on the masked voxels of `grid`.
    Constant { grid: GridConfig, value: [f64; 2] },
}

impl PotentialConfig {
    fn validate(&mut self, base: &Path) -> CliResult<()> {
        match self {
            PotentialConfig::File { path } => *path = existing(base, path)?,
            PotentialConfig::Constant { grid, value } => {
                grid.build()?;
                if !value.iter().all(|v| v.is_finite()) {
                    return Err(CliError::Input("potential value must be finite".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardConfig {
    pub k: f64,
    pub alpha: [f64; 3],
    pub sphere: SphereConfig,
    pub potential: PotentialConfig,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    1e-8
}

impl ForwardConfig {
    pub fn validate(&mut self, base: &Path) -> CliResult<()> {
        positive("k", self.k)?;
        wave_context(self.k, self.alpha)?;
        positive("tol", self.tol)?;
        self.sphere.build()?;
        self.potential.validate(base)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub k: f64,
    pub alpha: [f64; 3],
    /// Field file with `q`.
    pub potential: PathBuf,
    /// Far-field file with the expected amplitude; its directions are used.
    #[serde(default)]
    pub predicted: Option<PathBuf>,
    /// Directions used when no prediction is given.
    #[serde(default)]
    pub sphere: Option<SphereConfig>,
    /// Largest accepted relative L² mismatch.
    #[serde(default = "default_mismatch")]
    pub tolerance: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_mismatch() -> f64 {
    0.05
}

impl VerifyConfig {
    pub fn validate(&mut self, base: &Path) -> CliResult<()> {
        positive("k", self.k)?;
        wave_context(self.k, self.alpha)?;
        positive("tolerance", self.tolerance)?;
        positive("tol", self.tol)?;
        self.potential = existing(base, &self.potential)?;
        match (&self.predicted, &self.sphere) {
            (Some(p), _) => self.predicted = Some(existing(base, p)?),
            (None, Some(s)) => {
                s.build()?;
            }
            (None, None) => return Err(CliError::Input("verify needs either predicted or sphere".into())),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnsembleSource {
    /// Designed potential and its predicted amplitude, as written by `design`.
    Files { potential: PathBuf, predicted: PathBuf },
    /// Constant `value` on the masked voxels of `grid`; the prediction is
    /// the solved amplitude of that potential.
    Uniform { grid: GridConfig, value: f64, sphere: SphereConfig },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub k: f64,
    pub alpha: [f64; 3],
    pub source: EnsembleSource,
    /// Particle radii, each run with every seed.
    pub radii: Vec<f64>,
    /// First seed; seeds `seed, seed+1, …` are used.
    #[serde(default)]
    pub seed: u64,
    pub n_seeds: usize,
    /// Largest accepted seed-averaged relative distance.
    #[serde(default = "default_distance")]
    pub tolerance: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Write one cloud file per radius and seed.
    #[serde(default)]
    pub write_clouds: bool,
}

fn default_distance() -> f64 {
    0.25
}

impl EnsembleConfig {
    pub fn validate(&mut self, base: &Path) -> CliResult<()> {
        positive("k", self.k)?;
        wave_context(self.k, self.alpha)?;
        positive("tolerance", self.tolerance)?;
        positive("tol", self.tol)?;
        if self.radii.is_empty() {
            return Err(CliError::Input("radii must not be empty".into()));
        }
        for &a in &self.radii {
            positive("radius", a)?;
            if self.k * a > 0.1 {
                return Err(CliError::Input(format!("ka = {} exceeds 0.1", self.k * a)));
            }
        }
        if self.n_seeds == 0 {
            return Err(CliError::Input("n_seeds must be at least 1".into()));
        }
        if self.seed.checked_add(self.n_seeds as u64).is_none() {
            return Err(CliError::Input("seed range overflows".into()));
        }
        match &mut self.source {
            EnsembleSource::Files { potential, predicted } => {
                *potential = existing(base, potential)?;
                *predicted = existing(base, predicted)?;
            }
            EnsembleSource::Uniform { grid, value, sphere } => {
                grid.build()?;
                sphere.build()?;
                if !(*value >= 0.0 && value.is_finite()) {
                    return Err(CliError::Input(format!("uniform value must be nonnegative, got {value}")));
                }
            }
        }
        Ok(())
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.n_seeds as u64).map(|i| self.seed + i).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub k: f64,
    pub grid: GridConfig,
    pub sphere: SphereConfig,
    /// Singular values below this fraction of the largest count as zero
    /// for the reported numerical rank.
    #[serde(default = "default_rank_tol")]
    pub rank_tolerance: f64,
}

fn default_rank_tol() -> f64 {
    1e-12
}

impl DiagnoseConfig {
    pub fn validate(&mut self) -> CliResult<()> {
        positive("k", self.k)?;
        positive("rank_tolerance", self.rank_tolerance)?;
        let g = self.grid.build()?;
        let s = self.sphere.build()?;
        let entries = g.len().saturating_mul(s.len());
        if entries > wavefocus::inverse::SVD_BUDGET {
            return Err(CliError::Input(format!(
                "far-field matrix has {entries} entries, above the budget of {}",
                wavefocus::inverse::SVD_BUDGET
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design_json(extra: &str) -> String {
        format!(
            r#"{{"k": 2.0, "alpha": [0, 0, 1], "grid": {{"min": [0, 0, 0], "max": [1, 1, 1], "shape": [3, 3, 3]}},
               "sphere": {{"n_polar": 4, "n_azimuthal": 8}}, "target": {{"type": "zero"}},
               "reg": {{"mode": "discrepancy"}} {extra}}}"#
        )
    }

    fn parse_design(extra: &str) -> CliResult<DesignConfig> {
        let mut c: DesignConfig = serde_json::from_str(&design_json(extra))?;
        c.validate(Path::new("."))?;
        Ok(c)
    }

    #[test]
    fn exactly_one_accuracy_goal() {
        assert!(parse_design(r#", "epsilon": 0.1"#).is_ok());
        assert!(matches!(parse_design(""), Err(CliError::Input(_))));
        assert!(matches!(parse_design(r#", "epsilon": 0.1, "relative_epsilon": 0.1"#), Err(CliError::Input(_))));
        assert!(matches!(parse_design(r#", "epsilon": -1"#), Err(CliError::Input(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(matches!(parse_design(r#", "epsilon": 0.1, "colour": 3"#), Err(CliError::Input(_))));
    }

    #[test]
    fn alpha_must_be_unit_up_to_rounding() {
        assert!(wave_context(1.0, [0.0, 0.6, 0.8 + 1e-9]).is_ok());
        assert!(matches!(wave_context(1.0, [0.0, 0.0, 1.1]), Err(CliError::Input(_))));
        assert!(matches!(wave_context(1.0, [0.0, 0.0, 0.0]), Err(CliError::Input(_))));
    }

    #[test]
    fn missing_input_file_is_an_input_error() {
        let json = r#"{"k": 1, "alpha": [0, 0, 1], "potential": "no/such/file.field", "sphere": {"n_polar": 2, "n_azimuthal": 4}}"#;
        let mut c: VerifyConfig = serde_json::from_str(json).unwrap();
        assert!(matches!(c.validate(Path::new(".")), Err(CliError::Input(_))));
    }

    #[test]
    fn ensemble_limits() {
        let json = |radii: &str, n_seeds: usize| {
            format!(
                r#"{{"k": 1, "alpha": [0, 0, 1], "radii": {radii}, "n_seeds": {n_seeds},
                   "source": {{"type": "uniform", "value": 0.1, "sphere": {{"n_polar": 2, "n_azimuthal": 4}},
                   "grid": {{"min": [0, 0, 0], "max": [1, 1, 1], "shape": [2, 2, 2]}}}}}}"#
            )
        };
        let check = |radii: &str, n: usize| {
            let mut c: EnsembleConfig = serde_json::from_str(&json(radii, n)).unwrap();
            c.validate(Path::new(".")).map(|_| c)
        };
        assert_eq!(check("[0.05]", 3).unwrap().seeds(), vec![0, 1, 2]);
        assert!(check("[0.2]", 1).is_err());
        assert!(check("[]", 1).is_err());
        assert!(check("[0.05]", 0).is_err());
    }

    #[test]
    fn svd_budget_is_checked_before_work() {
        let json = r#"{"k": 1, "grid": {"min": [0, 0, 0], "max": [1, 1, 1], "shape": [40, 40, 40]},
                       "sphere": {"n_polar": 20, "n_azimuthal": 40}}"#;
        let mut c: DiagnoseConfig = serde_json::from_str(json).unwrap();
        assert!(matches!(c.validate(), Err(CliError::Input(_))));
    }
}
