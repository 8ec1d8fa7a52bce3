use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ModelSpec;
use crate::battery::{BatteryConfig, LoadMode, LoadProfile};
use crate::data::SplitSpec;
use crate::koopman::ModelKind;
use crate::{Error, Result};

pub const CONFIG_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    pub size: usize,
    pub stride: usize,
}

impl Default for WindowConfig {
    /// 100 points (200 s at 2 s steps), non-overlapping.
    fn default() -> Self {
        Self { size: 100, stride: 100 }
    }
}

/// Parameters of the `study` subcommands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StudyConfig {
    pub noise_sigmas: Vec<f64>,
    pub noise_models: Vec<ModelKind>,
    pub early_fraction: f64,
    /// Models compared by the early-lifetime and extrapolation studies.
    pub ablation_models: Vec<ModelKind>,
    pub extrapolation_train: (f64, f64),
    pub extrapolation_test: Vec<(f64, f64)>,
    /// Test trajectories simulated per extrapolation interval.
    pub extrapolation_test_count: usize,
    pub spectrum_intervals: Vec<(f64, f64)>,
    /// Control windows per interval.
    pub spectrum_samples: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            noise_sigmas: vec![0.01, 0.05, 0.1, 0.5, 1.0],
            noise_models: vec![ModelKind::Ae, ModelKind::Fnn, ModelKind::Dko],
            early_fraction: 0.3,
            ablation_models: vec![ModelKind::Kidm, ModelKind::Kidmae, ModelKind::Ae],
            extrapolation_train: (1.5, 2.5),
            extrapolation_test: vec![(1.0, 1.5), (2.5, 3.0)],
            extrapolation_test_count: 100,
            spectrum_intervals: vec![(1.0, 1.5), (1.5, 2.5), (2.5, 3.0)],
            spectrum_samples: 200,
        }
    }
}

/// One experiment, stored as a single JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub output_dir: PathBuf,
    /// Fleet directory read by `train`, `evaluate` and `study`; defaults to
    /// `<output_dir>/fleet`.
    pub data_dir: Option<PathBuf>,
    /// Seeds the fleet, its split and injected measurement noise.
    pub fleet_seed: u64,
    /// First model seed.
    pub seed: u64,
    /// Number of model seeds `evaluate` and the studies aggregate over.
    pub seeds: usize,
    pub battery: BatteryConfig,
    pub profile: LoadProfile,
    /// Defaults to 70/30 for constant load and 100/100 for varying load,
    /// one supervised trajectory.
    pub split: Option<SplitSpec>,
    /// Write hidden health columns into fleet CSVs.
    pub include_hidden: bool,
    /// Measurement noise on voltage and temperature applied when loading.
    pub noise_sigma: f64,
    pub window: WindowConfig,
    pub model: ModelSpec,
    pub smoothing_sigma: f64,
    pub study: StudyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            format_version: CONFIG_FORMAT_VERSION,
            output_dir: PathBuf::from("runs/default"),
            data_dir: None,
            fleet_seed: 0,
            seed: 0,
            seeds: 5,
            battery: BatteryConfig::default(),
            profile: LoadProfile::varying((1.5, 2.5)),
            split: None,
            include_hidden: false,
            noise_sigma: 0.0,
            window: WindowConfig::default(),
            model: ModelSpec::default(),
            smoothing_sigma: 5.0,
            study: StudyConfig::default(),
        }
    }
}

/// Default split of a load mode.
pub fn default_split(mode: LoadMode) -> SplitSpec {
    match mode {
        LoadMode::Constant => SplitSpec::new(70, 30, 1),
        LoadMode::Varying => SplitSpec::new(100, 100, 1),
    }
}

pub fn mode_name(mode: LoadMode) -> &'static str {
    match mode {
        LoadMode::Constant => "constant",
        LoadMode::Varying => "varying",
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(path, e))
    }

    pub fn split_spec(&self) -> SplitSpec {
        self.split.unwrap_or_else(|| default_split(self.profile.mode))
    }

    pub fn fleet_dir(&self) -> PathBuf {
        self.data_dir.clone().unwrap_or_else(|| self.output_dir.join("fleet"))
    }

    pub fn model_seeds(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|k| self.seed + k).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.format_version != CONFIG_FORMAT_VERSION {
            return bad(format!(
                "unsupported config format_version {} (expected {CONFIG_FORMAT_VERSION})",
                self.format_version
            ));
        }
        self.profile.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.split_spec().validate().map_err(|e| Error::Config(e.to_string()))?;
        self.model.train.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.seeds == 0 {
            return bad("seeds must be >= 1".into());
        }
        if self.window.size == 0 || self.window.stride == 0 || self.window.size % self.window.stride != 0 {
            return bad("window size and stride must be positive with size a multiple of stride".into());
        }
        if !(self.noise_sigma >= 0.0) || !(self.smoothing_sigma >= 0.0) {
            return bad("noise and smoothing sigmas must be >= 0".into());
        }
        if self.model.architecture.observable_dim == 0 {
            return bad("observable_dim must be >= 1".into());
        }
        if !(self.study.early_fraction > 0.0) {
            return bad("early_fraction must be > 0".into());
        }
        if self.study.noise_sigmas.iter().any(|s| !(*s >= 0.0)) {
            return bad("noise sigmas must be >= 0".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_protocols() {
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.split_spec(), SplitSpec::new(100, 100, 1));
        cfg.profile = LoadProfile::constant(1.0);
        assert_eq!(cfg.split_spec(), SplitSpec::new(70, 30, 1));
        assert_eq!(cfg.study.noise_sigmas.first(), Some(&0.01));
        assert_eq!(cfg.study.noise_sigmas.last(), Some(&1.0));
        assert_eq!(cfg.study.extrapolation_test, vec![(1.0, 1.5), (2.5, 3.0)]);
        assert_eq!(cfg.model_seeds(), vec![0, 1, 2, 3, 4]);
        cfg.validate().unwrap();
    }

    #[test]
    fn round_trip_and_partial_documents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        let cfg = ExperimentConfig::default();
        cfg.save(&p).unwrap();
        assert_eq!(ExperimentConfig::load(&p).unwrap(), cfg);

        fs::write(&p, r#"{"format_version": 1, "seeds": 1, "model": {"kind": "dko"}}"#).unwrap();
        let c = ExperimentConfig::load(&p).unwrap();
        assert_eq!(c.model.kind, ModelKind::Dko);
        assert_eq!(c.model.train.horizon, 10);

        fs::write(&p, r#"{"format_version": 7}"#).unwrap();
        assert!(matches!(ExperimentConfig::load(&p), Err(Error::Config(_))));
        fs::write(&p, r#"{"model": {"kind": "lstm"}}"#).unwrap();
        assert!(matches!(ExperimentConfig::load(&p), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::load(&dir.path().join("missing.json")), Err(Error::Config(_))));
    }
}
