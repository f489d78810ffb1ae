//! Experiment configuration: defaults, an optional JSON or TOML file, and
//! command-line overrides, merged in that order and then validated.

use std::path::{Path, PathBuf};

use chaoskit_core::sequences::{custom_single_chaos, half_support_second_chaos, Side};
use chaoskit_core::stein::{DEFAULT_BINS, DEFAULT_T_GRID, DEFAULT_Z_GRID};
use chaoskit_core::ChaosExpansion;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::format;

pub const DEFAULT_N_SCHEDULE: [usize; 4] = [4, 16, 64, 256];
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PATH_STEPS: usize = 1000;
pub const DEFAULT_SPLIT3: [f64; 3] = [0.2, 0.3, 0.5];
const WEIGHT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Two half-support second-chaos sequences and their sum.
    Decouple,
    /// The first-chaos-sharing pair with normal marginals.
    Counterexample,
    /// Mixed Gamma diagnostic on independent and dependent couples.
    #[value(name = "class_a", alias = "class-a")]
    ClassA,
    /// Three disjoint blocks with weights `split3`.
    #[value(name = "three_way", alias = "three-way")]
    ThreeWay,
    /// Exact and Monte Carlo diagnostics for one configured family.
    Inspect,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Decouple => "decouple",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::ClassA => "class_a",
            ExperimentKind::ThreeWay => "three_way",
            ExperimentKind::Inspect => "inspect",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideName {
    Left,
    Right,
}

impl From<SideName> for Side {
    fn from(s: SideName) -> Side {
        match s {
            SideName::Left => Side::Left,
            SideName::Right => Side::Right,
        }
    }
}

/// A sequence family addressed by name, for the `inspect` experiment.
/// Half-support families take their size from the `n_schedule`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    HalfSupportSecondChaos {
        side: SideName,
        c: f64,
    },
    CustomSingleChaos {
        kernel_file: PathBuf,
        #[serde(default)]
        normalize_to: Option<f64>,
    },
    Expansion {
        expansion_file: PathBuf,
    },
}

impl FamilySpec {
    /// Whether the family depends on `n`.
    pub fn is_sequence(&self) -> bool {
        matches!(self, FamilySpec::HalfSupportSecondChaos { .. })
    }

    pub fn build(&self, n: usize) -> Result<ChaosExpansion> {
        match self {
            FamilySpec::HalfSupportSecondChaos { side, c } => {
                Ok(half_support_second_chaos(n, *c, (*side).into())?)
            }
            FamilySpec::CustomSingleChaos {
                kernel_file,
                normalize_to,
            } => Ok(custom_single_chaos(
                format::read_kernel(kernel_file)?,
                *normalize_to,
            )?),
            FamilySpec::Expansion { expansion_file } => format::read_expansion(expansion_file),
        }
    }
}

/// Fully resolved configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n_schedule: Vec<usize>,
    pub c1: f64,
    pub c2: f64,
    pub split3: [f64; 3],
    pub mc_samples: usize,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub z_grid: Vec<f64>,
    pub path_steps: usize,
    pub n_bins: usize,
    pub family: Option<FamilySpec>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Partial configuration as read from a file or collected from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub experiment: Option<ExperimentKind>,
    pub n_schedule: Option<Vec<usize>>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub split3: Option<[f64; 3]>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub t_grid: Option<Vec<f64>>,
    pub z_grid: Option<Vec<f64>>,
    pub path_steps: Option<usize>,
    pub n_bins: Option<usize>,
    pub family: Option<FamilySpec>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl ConfigOverrides {
    /// Parses TOML for a `.toml` path and JSON otherwise.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        if path.extension().is_some_and(|e| e == "toml") {
            Ok(toml::from_str(&text)?)
        } else {
            Ok(serde_json::from_str(&text)?)
        }
    }

    /// Fields set in `other` win.
    pub fn merged(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            experiment: other.experiment.or(self.experiment),
            n_schedule: other.n_schedule.or(self.n_schedule),
            c1: other.c1.or(self.c1),
            c2: other.c2.or(self.c2),
            split3: other.split3.or(self.split3),
            mc_samples: other.mc_samples.or(self.mc_samples),
            seed: other.seed.or(self.seed),
            t_grid: other.t_grid.or(self.t_grid),
            z_grid: other.z_grid.or(self.z_grid),
            path_steps: other.path_steps.or(self.path_steps),
            n_bins: other.n_bins.or(self.n_bins),
            family: other.family.or(self.family),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
        }
    }

    pub fn resolve(self) -> Result<ExperimentConfig> {
        let experiment = self
            .experiment
            .ok_or_else(|| HarnessError::Config("no experiment selected".into()))?;
        let mut config = ExperimentConfig::new(experiment);
        config.n_schedule = self.n_schedule.unwrap_or(config.n_schedule);
        config.c1 = self.c1.unwrap_or(config.c1);
        config.c2 = self.c2.unwrap_or(config.c2);
        config.split3 = self.split3.unwrap_or(config.split3);
        config.mc_samples = self.mc_samples.unwrap_or(config.mc_samples);
        config.seed = self.seed.unwrap_or(config.seed);
        config.t_grid = self.t_grid.unwrap_or(config.t_grid);
        config.z_grid = self.z_grid.unwrap_or(config.z_grid);
        config.path_steps = self.path_steps.unwrap_or(config.path_steps);
        config.n_bins = self.n_bins.unwrap_or(config.n_bins);
        config.family = self.family;
        config.out = self.out;
        config.format = self.format.unwrap_or_default();
        config.validate()?;
        Ok(config)
    }
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl ExperimentConfig {
    /// Defaults for `experiment`; not yet validated.
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            n_schedule: DEFAULT_N_SCHEDULE.to_vec(),
            c1: 0.5,
            c2: 0.5,
            split3: DEFAULT_SPLIT3,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_SEED,
            t_grid: DEFAULT_T_GRID.to_vec(),
            z_grid: DEFAULT_Z_GRID.to_vec(),
            path_steps: DEFAULT_PATH_STEPS,
            n_bins: DEFAULT_BINS,
            family: None,
            out: None,
            format: OutputFormat::Json,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_schedule.is_empty() {
            return Err(invalid("n_schedule is empty"));
        }
        if self.n_schedule[0] == 0 {
            return Err(invalid("n_schedule entries must be positive"));
        }
        if self.n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n_schedule must be strictly increasing"));
        }
        for (name, c) in [("c1", self.c1), ("c2", self.c2)] {
            if !(c.is_finite() && c > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {c}")));
            }
        }
        if (self.c1 + self.c2 - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(invalid(format!(
                "c1 + c2 must equal 1, got {}",
                self.c1 + self.c2
            )));
        }
        if self.split3.iter().any(|&c| !(c.is_finite() && c > 0.0)) {
            return Err(invalid("split3 weights must be positive"));
        }
        if (self.split3.iter().sum::<f64>() - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(invalid("split3 weights must sum to 1"));
        }
        if self.mc_samples < 2 {
            return Err(invalid("mc_samples must be at least 2"));
        }
        if self.n_bins < 2 || self.n_bins > self.mc_samples {
            return Err(invalid("n_bins must lie in [2, mc_samples]"));
        }
        if self.t_grid.is_empty() || self.z_grid.is_empty() {
            return Err(invalid("t_grid and z_grid must be non-empty"));
        }
        if self
            .t_grid
            .iter()
            .chain(&self.z_grid)
            .any(|v| !v.is_finite())
        {
            return Err(invalid("grid values must be finite"));
        }
        if self.path_steps < 100 || !self.path_steps.is_multiple_of(2) {
            return Err(invalid("path_steps must be even and at least 100"));
        }
        match (&self.experiment, &self.family) {
            (ExperimentKind::Inspect, None) => {
                return Err(invalid("inspect needs a family"));
            }
            (ExperimentKind::Inspect, Some(FamilySpec::HalfSupportSecondChaos { c, .. }))
                if !(c.is_finite() && *c > 0.0) =>
            {
                return Err(invalid("family c must be positive"));
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_overrides_win() {
        let file = ConfigOverrides {
            experiment: Some(ExperimentKind::Decouple),
            seed: Some(1),
            mc_samples: Some(100),
            ..Default::default()
        };
        let flags = ConfigOverrides {
            seed: Some(7),
            ..Default::default()
        };
        let c = file.merged(flags).resolve().unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.mc_samples, 100);
        assert_eq!(c.n_schedule, DEFAULT_N_SCHEDULE.to_vec());
    }
}
