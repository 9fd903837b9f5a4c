//! Job configuration. Defaults come from [`JobConfig::default`], are
//! overridden by the JSON file named in `FRAMECURVE_CONFIG`, and then by
//! command-line flags.

use std::path::{Path, PathBuf};

use framecurve_core::alignment::{AlignmentConfig, DEFAULT_SLOPES};
use framecurve_core::Tolerances;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONFIG_ENV: &str = "FRAMECURVE_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AlignMode {
    None,
    Rotation,
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobConfig {
    pub n_samples: usize,
    pub tolerances: ToleranceConfig,
    pub align: AlignMode,
    pub alignment: AlignmentSettings,
    pub export: ExportConfig,
    pub steps: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            n_samples: 256,
            tolerances: ToleranceConfig::default(),
            align: AlignMode::None,
            alignment: AlignmentSettings::default(),
            export: ExportConfig::default(),
            steps: 11,
            seed: 0,
            output_dir: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub geom: f64,
    pub field: f64,
    pub stiefel: f64,
    pub closure: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        ToleranceConfig {
            geom: t.geom,
            field: t.field,
            stiefel: t.stiefel,
            closure: t.closure,
        }
    }
}

impl From<ToleranceConfig> for Tolerances {
    fn from(t: ToleranceConfig) -> Self {
        Tolerances {
            geom: t.geom,
            field: t.field,
            stiefel: t.stiefel,
            closure: t.closure,
        }
    }
}

/// Serializable mirror of [`AlignmentConfig`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignmentSettings {
    pub grid_size: usize,
    pub strip_width: f64,
    pub n_seeds: usize,
    pub slopes: Vec<[usize; 2]>,
    pub max_sweeps: usize,
    pub sweep_tol: f64,
    pub reparam_modes: usize,
    pub refine_iterations: usize,
    pub frame_iterations: usize,
    pub frame_tol: f64,
    pub search_winding: bool,
}

impl Default for AlignmentSettings {
    fn default() -> Self {
        let c = AlignmentConfig::default();
        AlignmentSettings {
            grid_size: c.grid_size,
            strip_width: c.strip_width,
            n_seeds: c.n_seeds,
            slopes: DEFAULT_SLOPES.iter().map(|&(a, b)| [a, b]).collect(),
            max_sweeps: c.max_sweeps,
            sweep_tol: c.sweep_tol,
            reparam_modes: c.reparam_modes,
            refine_iterations: c.refine_iterations,
            frame_iterations: c.frame_iterations,
            frame_tol: c.frame_tol,
            search_winding: c.search_winding,
        }
    }
}

impl From<&AlignmentSettings> for AlignmentConfig {
    fn from(s: &AlignmentSettings) -> Self {
        AlignmentConfig {
            grid_size: s.grid_size,
            strip_width: s.strip_width,
            n_seeds: s.n_seeds,
            slopes: s.slopes.iter().map(|p| (p[0], p[1])).collect(),
            max_sweeps: s.max_sweeps,
            sweep_tol: s.sweep_tol,
            reparam_modes: s.reparam_modes,
            refine_iterations: s.refine_iterations,
            frame_iterations: s.frame_iterations,
            frame_tol: s.frame_tol,
            search_winding: s.search_winding,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportConfig {
    pub csv: bool,
    pub obj: bool,
    pub tube_radius: f64,
    pub tube_segments: usize,
}

impl Default for ExportConfig {
    fn default() -> Self {
        ExportConfig {
            csv: true,
            obj: false,
            tube_radius: 0.02,
            tube_segments: 12,
        }
    }
}

impl JobConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
    }

    /// Defaults, or the file named by `FRAMECURVE_CONFIG` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::from_file(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_n_samples(self.n_samples)?;
        let t = &self.tolerances;
        if ![t.geom, t.field, t.stiefel, t.closure].iter().all(|x| *x > 0.0 && x.is_finite()) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        if !(self.export.tube_radius > 0.0) || self.export.tube_segments < 3 {
            return Err(Error::Config("tube radius must be positive with at least 3 segments".into()));
        }
        let a = &self.alignment;
        if a.grid_size < 2 || a.n_seeds == 0 || a.slopes.is_empty() || a.slopes.iter().any(|s| s[0] == 0 || s[1] == 0) {
            return Err(Error::Config("alignment needs grid_size ≥ 2, n_seeds ≥ 1 and positive slopes".into()));
        }
        if !(a.strip_width > 0.0) {
            return Err(Error::Config("alignment strip_width must be positive".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.into()
    }
}

pub fn validate_n_samples(n: usize) -> Result<()> {
    if n.is_power_of_two() && (32..=4096).contains(&n) {
        Ok(())
    } else {
        Err(Error::Config(format!("n-samples must be a power of two in [32, 4096], got {n}")))
    }
}
