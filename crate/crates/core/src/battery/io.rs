use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BatteryConfig, HealthParams, LoadProfile, Trajectory};
use crate::data::label_rul;
use crate::{Error, Result};

pub const TRAJECTORY_HEADER: [&str; 10] = [
    "time_s",
    "voltage_v",
    "temperature_k",
    "current_a",
    "soc",
    "capacity_frac",
    "q_max",
    "r0_ohm",
    "d",
    "rul_norm",
];

/// Writes one row per timestep; hidden columns (`q_max`, `r0_ohm`, `d`,
/// `rul_norm`) only when `include_hidden`.
pub fn write_trajectory_csv(trajectory: &Trajectory, path: &Path, include_hidden: bool) -> Result<()> {
    let columns = if include_hidden { 10 } else { 6 };
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&TRAJECTORY_HEADER[..columns])?;
    let rul = label_rul(&trajectory.time, trajectory.eol_time)?;
    let t = trajectory;
    let mut row: Vec<String> = Vec::with_capacity(columns);
    for k in 0..t.len() {
        row.clear();
        row.extend([t.time[k], t.voltage[k], t.temperature[k], t.current[k], t.soc[k], t.capacity[k]].map(|v| v.to_string()));
        if include_hidden {
            row.extend([t.q_max[k], t.r0[k], t.d[k], rul[k]].map(|v| v.to_string()));
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FleetEntry {
    pub file: String,
    pub seed: u64,
    pub eol_time_s: f64,
    pub cycles: usize,
    pub length: usize,
    pub initial: HealthParams,
}

/// Index of a directory of trajectory CSVs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FleetManifest {
    pub format_version: u32,
    pub profile: LoadProfile,
    pub battery: BatteryConfig,
    pub base_seed: u64,
    pub include_hidden: bool,
    pub trajectories: Vec<FleetEntry>,
}

/// Writes `<prefix>_<index>.csv` per trajectory plus `<prefix>_manifest.json`.
pub fn write_fleet(
    dir: &Path,
    prefix: &str,
    trajectories: &[Trajectory],
    config: &BatteryConfig,
    base_seed: u64,
    include_hidden: bool,
) -> Result<FleetManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let profile = trajectories
        .first()
        .map(|t| t.profile.clone())
        .ok_or(Error::EmptyData("fleet"))?;
    let mut entries = Vec::with_capacity(trajectories.len());
    for (i, t) in trajectories.iter().enumerate() {
        let file = format!("{prefix}_{i:04}.csv");
        write_trajectory_csv(t, &dir.join(&file), include_hidden)?;
        entries.push(FleetEntry {
            file,
            seed: t.seed,
            eol_time_s: t.eol_time,
            cycles: t.cycles(),
            length: t.len(),
            initial: t.initial,
        });
    }
    let manifest = FleetManifest {
        format_version: 1,
        profile,
        battery: config.clone(),
        base_seed,
        include_hidden,
        trajectories: entries,
    };
    let path = dir.join(format!("{prefix}_manifest.json"));
    fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> Result<FleetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: FleetManifest = serde_json::from_str(&text)?;
    if manifest.format_version != 1 {
        return Err(Error::Config(format!(
            "unsupported fleet manifest format_version {}",
            manifest.format_version
        )));
    }
    Ok(manifest)
}
