//! Experiment descriptions, read from TOML.
//!
//! Every section and field is optional and falls back to the documented
//! default; unknown keys are rejected with their location.

use std::path::{Path, PathBuf};

use jtcran::charfn::AnalyticConfig;
use jtcran::coverage::SeGrid;
use jtcran::gamma::GammaModel;
use jtcran::montecarlo::{SimConfig, SimMode};
use jtcran::validation::{density_per_zone, SuiteSettings};
use jtcran::{NetworkParams, TruncationPolicy};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Environment variable overriding `mc.master_seed`.
pub const SEED_ENV: &str = "CRAN_JT_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Coverage against threshold for each antenna count.
    CoverageCurve,
    /// Mean spectral efficiency over an RRH density by user density grid.
    SeMap,
    /// Mean in-set over mean out-of-set interference over a density grid.
    InterferenceRatioMap,
    /// The acceptance checks.
    ValidationSuite,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::CoverageCurve => "coverage_curve",
            ExperimentKind::SeMap => "se_map",
            ExperimentKind::InterferenceRatioMap => "interference_ratio_map",
            ExperimentKind::ValidationSuite => "validation_suite",
        }
    }
}

/// Sweep axes. Each kind reads only the axes it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    /// `coverage_curve`: antennas per RRH.
    pub antennas: Vec<u32>,
    /// `coverage_curve`: SINR thresholds in dB.
    pub theta_db: Vec<f64>,
    /// Maps: RRH densities (m⁻²), one grid row each.
    pub lambda_r: Vec<f64>,
    /// Maps: user densities (m⁻²), one grid column each.
    pub lambda_u: Vec<f64>,
}

impl Default for Sweep {
    fn default() -> Self {
        let per_zone = [1.0, 3.0, 5.0].map(density_per_zone).to_vec();
        Sweep {
            antennas: vec![1, 2, 4],
            theta_db: (0..7).map(|k| -10.0 + 5.0 * f64::from(k)).collect(),
            lambda_r: per_zone.clone(),
            lambda_u: per_zone,
        }
    }
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSpec {
    /// Adds empirical rows next to the analytic ones.
    pub enabled: bool,
    pub realizations: usize,
    pub master_seed: u64,
    pub mode: SimMode,
    /// Window radius in m; absent means `r1 + 4 / sqrt(pi lambda_u)`.
    pub window: Option<f64>,
    /// Gamma parameters of the `gamma_approx` mode.
    pub gamma: GammaModel,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl Default for McSpec {
    fn default() -> Self {
        let sim = SimConfig::default();
        McSpec {
            enabled: true,
            realizations: sim.realizations,
            master_seed: sim.master_seed,
            mode: sim.mode,
            window: sim.window,
            gamma: sim.gamma,
            workers: 0,
        }
    }
}

impl McSpec {
    /// Simulator settings; threads come from the pool the run installs.
    pub fn sim(&self) -> SimConfig {
        SimConfig {
            mode: self.mode,
            realizations: self.realizations,
            master_seed: self.master_seed,
            window: self.window,
            gamma: self.gamma,
            workers: 0,
        }
    }
}

/// Sample sizes of `validation_suite`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidationSpec {
    pub ks_samples: usize,
    pub set_count_realizations: usize,
    pub coverage_realizations: usize,
    pub ratio_realizations: usize,
    /// Check ids to run; empty runs all of them.
    pub only: Vec<u32>,
}

impl Default for ValidationSpec {
    fn default() -> Self {
        ValidationSpec::from_settings(&SuiteSettings::default())
    }
}

impl ValidationSpec {
    pub fn from_settings(s: &SuiteSettings) -> Self {
        ValidationSpec {
            ks_samples: s.ks_samples,
            set_count_realizations: s.set_count_realizations,
            coverage_realizations: s.coverage_realizations,
            ratio_realizations: s.ratio_realizations,
            only: Vec::new(),
        }
    }
}

/// One experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// Directory receiving the CSV tables and the manifest.
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub params: NetworkParams,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default)]
    pub analytic: AnalyticConfig,
    #[serde(default)]
    pub truncation: TruncationPolicy,
    #[serde(default)]
    pub se_grid: SeGrid,
    #[serde(default)]
    pub validation: ValidationSpec,
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentSpec {
    /// Every field at its default.
    pub fn defaults(kind: ExperimentKind) -> Self {
        ExperimentSpec {
            kind,
            output: default_output(),
            params: NetworkParams::default(),
            sweep: Sweep::default(),
            mc: McSpec::default(),
            analytic: AnalyticConfig::default(),
            truncation: TruncationPolicy::default(),
            se_grid: SeGrid::default(),
            validation: ValidationSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec fields are all representable in TOML")
    }

    /// Checks everything that does not need the file system.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.params.validate().map_err(|e| CliError::Config(format!("params: {e}")))?;
        self.truncation
            .validate()
            .map_err(|e| CliError::Config(format!("truncation: {e}")))?;
        if self.se_grid.intervals < 2 || self.se_grid.intervals % 2 == 1 || !(self.se_grid.s_max > 0.0) {
            return bad("se_grid: intervals must be even and >= 2, s_max positive".into());
        }
        if self.analytic.radial_panels == 0 {
            return bad("analytic.radial_panels must be at least 1".into());
        }
        let needs_mc = self.kind == ExperimentKind::InterferenceRatioMap;
        if needs_mc && !self.mc.enabled {
            return bad("interference_ratio_map is simulated; mc.enabled must be true".into());
        }
        if (self.mc.enabled || needs_mc) && self.mc.realizations < 2 {
            return bad("mc.realizations must be at least 2".into());
        }
        match self.kind {
            ExperimentKind::CoverageCurve => {
                if self.sweep.antennas.is_empty() || self.sweep.theta_db.is_empty() {
                    return bad("sweep.antennas and sweep.theta_db must be non-empty".into());
                }
                if self.sweep.antennas.contains(&0) {
                    return bad("sweep.antennas: every entry must be at least 1".into());
                }
                if let Some(t) = self.sweep.theta_db.iter().find(|t| !t.is_finite()) {
                    return bad(format!("sweep.theta_db: {t} is not finite"));
                }
            }
            ExperimentKind::SeMap | ExperimentKind::InterferenceRatioMap => {
                for (name, axis) in [("lambda_r", &self.sweep.lambda_r), ("lambda_u", &self.sweep.lambda_u)] {
                    if axis.is_empty() {
                        return bad(format!("sweep.{name} must be non-empty"));
                    }
                    if let Some(v) = axis.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                        return bad(format!("sweep.{name}: {v} is not a positive density"));
                    }
                }
            }
            ExperimentKind::ValidationSuite => {
                if let Some(id) = self.validation.only.iter().find(|id| !(1..=9).contains(*id)) {
                    return bad(format!("validation.only: no check {id}"));
                }
            }
        }
        Ok(())
    }

    /// Applies a seed override such as the value of [`SEED_ENV`].
    pub fn with_seed_override(mut self, value: Option<&str>) -> Result<Self> {
        if let Some(v) = value {
            self.mc.master_seed = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?;
        }
        Ok(self)
    }

    pub fn suite_settings(&self) -> SuiteSettings {
        SuiteSettings {
            policy: self.truncation,
            master_seed: self.mc.master_seed,
            workers: 0,
            ks_samples: self.validation.ks_samples,
            set_count_realizations: self.validation.set_count_realizations,
            coverage_realizations: self.validation.coverage_realizations,
            ratio_realizations: self.validation.ratio_realizations,
        }
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentSpec::from_toml(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
