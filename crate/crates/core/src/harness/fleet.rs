use std::fs;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::config::{mode_name, ExperimentConfig};
use super::DataSplit;
use crate::battery::{generate_fleet, read_manifest, FleetManifest, LoadProfile, Trajectory};
use crate::data::{read_recording_csv, split, Recording, Split, SplitSpec};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Split indices stored next to a fleet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub spec: SplitSpec,
    pub seed: u64,
    pub indices: Split,
}

/// Adds `N(0, sigma^2)` to voltage and temperature, drawing the two values
/// of each timestep in that order.
pub fn add_measurement_noise(rec: &mut Recording, sigma: f64, seed: u64) -> Result<()> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let mut v = rec
        .channel("voltage_v")
        .ok_or_else(|| Error::Config(format!("recording {} lacks voltage_v", rec.id)))?
        .to_vec();
    let mut t = rec
        .channel("temperature_k")
        .ok_or_else(|| Error::Config(format!("recording {} lacks temperature_k", rec.id)))?
        .to_vec();
    for (a, b) in v.iter_mut().zip(t.iter_mut()) {
        *a += normal.sample(&mut rng);
        *b += normal.sample(&mut rng);
    }
    *rec.channel_mut("voltage_v").expect("checked") = v;
    *rec.channel_mut("temperature_k").expect("checked") = t;
    Ok(())
}

/// Noise stream of one recording; keyed by id so that a recording gets the
/// same noise in every role it plays.
pub fn noise_seed(fleet_seed: u64, recording_id: &str) -> u64 {
    derive_seed(derive_seed(fleet_seed, "noise", 0), recording_id, 0)
}

impl DataSplit {
    /// Every recording with measurement noise of the given level.
    pub fn with_noise(&self, sigma: f64, fleet_seed: u64) -> Result<Self> {
        let noisy = |recs: &[Recording]| {
            recs.iter()
                .map(|r| {
                    let mut r = r.clone();
                    let seed = noise_seed(fleet_seed, &r.id);
                    add_measurement_noise(&mut r, sigma, seed)?;
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()
        };
        Ok(Self {
            train: noisy(&self.train)?,
            test: noisy(&self.test)?,
            supervision: noisy(&self.supervision)?,
        })
    }
}

pub fn split_seed(fleet_seed: u64) -> u64 {
    derive_seed(fleet_seed, "split", 0)
}

/// Recordings of a simulated fleet, named `<prefix>_<index>`.
pub fn recordings(prefix: &str, fleet: &[Trajectory], noise_sigma: f64, fleet_seed: u64) -> Result<Vec<Recording>> {
    fleet
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut r = Recording::from_trajectory(format!("{prefix}_{i:04}"), t)?;
            let seed = noise_seed(fleet_seed, &r.id);
            add_measurement_noise(&mut r, noise_sigma, seed)?;
            Ok(r)
        })
        .collect()
}

/// Assigns recordings to roles.
pub fn assign(recs: Vec<Recording>, indices: &Split) -> DataSplit {
    DataSplit {
        train: Split::select(&indices.train, &recs),
        test: Split::select(&indices.test, &recs),
        supervision: Split::select(&indices.supervision, &recs),
    }
}

/// Simulates `count` run-to-failure trajectories of `profile` in memory.
pub fn simulate_profile(cfg: &ExperimentConfig, profile: &LoadProfile, count: usize, tag: &str) -> Result<Vec<Trajectory>> {
    generate_fleet(profile, &cfg.battery, count, derive_seed(cfg.fleet_seed, tag, 0))
}

/// The configured fleet, split and assigned without touching disk, before
/// measurement noise.
pub fn in_memory_split(cfg: &ExperimentConfig) -> Result<DataSplit> {
    let spec = cfg.split_spec();
    let n = spec.train_count + spec.test_count;
    let fleet = simulate_profile(cfg, &cfg.profile, n, "fleet")?;
    let prefix = mode_name(cfg.profile.mode);
    let recs = recordings(prefix, &fleet, 0.0, cfg.fleet_seed)?;
    Ok(assign(recs, &split(n, &spec, split_seed(cfg.fleet_seed))?))
}

/// Reads the fleet written by `simulate`, before measurement noise.
pub fn load_split(cfg: &ExperimentConfig) -> Result<(FleetManifest, DataSplit)> {
    let dir = cfg.fleet_dir();
    let prefix = mode_name(cfg.profile.mode);
    let manifest_path = dir.join(format!("{prefix}_manifest.json"));
    if !manifest_path.exists() {
        return Err(Error::Config(format!(
            "no fleet manifest at {}; run `simulate` first or set data_dir",
            manifest_path.display()
        )));
    }
    let manifest = read_manifest(&manifest_path)?;
    let split_path = dir.join("split.json");
    let record: SplitRecord = match fs::read_to_string(&split_path) {
        Ok(text) => serde_json::from_str(&text)?,
        Err(_) => {
            let spec = cfg.split_spec();
            let seed = split_seed(cfg.fleet_seed);
            SplitRecord {
                spec,
                seed,
                indices: split(manifest.trajectories.len(), &spec, seed)?,
            }
        }
    };
    let recs = manifest
        .trajectories
        .iter()
        .map(|e| {
            let id = Path::new(&e.file)
                .file_stem()
                .map_or_else(|| e.file.clone(), |s| s.to_string_lossy().into_owned());
            read_recording_csv(&dir.join(&e.file), id, Some(e.eol_time_s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((manifest, assign(recs, &record.indices)))
}
