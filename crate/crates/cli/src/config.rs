use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use comfort_core::mtl::{TrainConfig, DEFAULT_HIDDEN};
use comfort_core::pipeline::DetectionConfig;
use comfort_core::synth::PopulationConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub trips_dir: PathBuf,
    pub models_dir: PathBuf,
    pub reports_dir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths { trips_dir: "trips".into(), models_dir: "models".into(), reports_dir: "reports".into() }
    }
}

/// Everything a command may need. Defaults match the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Width of the shared layer.
    pub hidden: usize,
    /// Base samples for feature-importance indices.
    pub sobol_samples: usize,
    pub paths: Paths,
    pub detection: DetectionConfig,
    pub train: TrainConfig,
    pub population: PopulationConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            hidden: DEFAULT_HIDDEN,
            sobol_samples: 1024,
            paths: Paths::default(),
            detection: DetectionConfig::default(),
            train: TrainConfig::default(),
            population: PopulationConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads a TOML file; relative paths inside it are taken relative to
    /// the file's directory. Without a file the defaults are used, relative
    /// to the working directory.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: PipelineConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.paths.trips_dir, &mut cfg.paths.models_dir, &mut cfg.paths.reports_dir] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            bail!("hidden must be at least 1");
        }
        self.detection.validate()?;
        self.train.validate()?;
        Ok(())
    }
}
