//! Equivalent-circuit Li-ion surrogate with degrading health parameters.
//!
//! The cell is an open-circuit-voltage curve behind a series resistance,
//! with one polarisation lag (the surface state of charge chases the bulk
//! state of charge at a rate proportional to the diffusion parameter) and a
//! lumped thermal node. Three hidden parameters degrade with a
//! superlinear power of the current magnitude.

mod io;
mod model;
mod sim;

pub use io::{read_manifest, write_fleet, write_trajectory_csv, FleetEntry, FleetManifest, TRAJECTORY_HEADER};
pub use model::{degrade, ocv, step, terminal_voltage};
pub use sim::{generate_fleet, inject_noise, run_to_failure, sample_initial_conditions, Trajectory};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const Q_MAX_RANGE: (f64, f64) = (7500.0, 7600.0);
pub const R0_RANGE: (f64, f64) = (0.107_215, 0.127_215);
pub const NOMINAL_DIFFUSION: f64 = 1.0;

/// Hidden health parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HealthParams {
    /// Available charge carriers (ion-count units).
    pub q_max: f64,
    /// Series resistance, Ohm.
    pub r0: f64,
    /// Diffusion rate multiplier.
    pub d: f64,
}

impl HealthParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_max > 0.0 && self.r0 > 0.0 && self.d > 0.0) {
            return Err(Error::InvalidArgument(format!("health parameters must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    pub soc: f64,
    pub surface_soc: f64,
    /// Kelvin.
    pub temperature: f64,
    pub health: HealthParams,
    pub cycle_index: usize,
    /// Seconds.
    pub time: f64,
}

impl BatteryState {
    /// Rested cell at ambient temperature.
    pub fn at_rest(health: HealthParams, soc: f64, config: &BatteryConfig) -> Self {
        Self {
            soc,
            surface_soc: soc,
            temperature: config.ambient_temperature,
            health,
            cycle_index: 0,
            time: 0.0,
        }
    }
}

/// Physical and degradation constants of the surrogate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryConfig {
    /// Coulombs per unit of `q_max`.
    pub coulombs_per_ion: f64,
    /// Exponent on `|I|` in every degradation rate.
    pub degradation_exponent: f64,
    /// `q_max` loss per `A^gamma * s`.
    pub capacity_fade_rate: f64,
    /// Resistance growth, Ohm per `A^gamma * s`.
    pub resistance_growth_rate: f64,
    /// Relative diffusion loss per `A^gamma * s`.
    pub diffusion_fade_rate: f64,
    /// Surface state-of-charge relaxation rate at `d = 1`, 1/s.
    pub polarization_rate: f64,
    /// W/K.
    pub heat_transfer: f64,
    /// J/K.
    pub heat_capacity: f64,
    /// Kelvin.
    pub ambient_temperature: f64,
    pub eol_capacity_fraction: f64,
    pub max_cycles: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            coulombs_per_ion: 0.8,
            degradation_exponent: 2.0,
            capacity_fade_rate: 3.5e-3,
            resistance_growth_rate: 4.2e-7,
            diffusion_fade_rate: 1.2e-6,
            polarization_rate: 1.0 / 120.0,
            heat_transfer: 0.1,
            heat_capacity: 30.0,
            ambient_temperature: 292.1,
            eol_capacity_fraction: 0.8,
            max_cycles: 400,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadMode {
    /// One discharge current for the whole life.
    Constant,
    /// Piecewise-constant random discharge segments.
    Varying,
}

/// Cycling protocol. Currents are positive on discharge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub mode: LoadMode,
    pub discharge_current_range: (f64, f64),
    pub charge_current: f64,
    pub soc_low: f64,
    pub soc_high: f64,
    /// Zero-current steps between discharge and charge.
    pub rest_steps: usize,
    /// Segment lengths in timesteps (varying mode).
    pub segment_length_range: (usize, usize),
    /// Seconds.
    pub dt: f64,
}

impl LoadProfile {
    /// Alternating discharge at `current` and charge at `-current`, no rest.
    pub fn constant(current: f64) -> Self {
        Self {
            mode: LoadMode::Constant,
            discharge_current_range: (current, current),
            charge_current: -current,
            soc_low: 0.05,
            soc_high: 0.95,
            rest_steps: 0,
            segment_length_range: (100, 300),
            dt: 2.0,
        }
    }

    /// Random discharge segments from `range`, 30-step rest, -3 A charge.
    pub fn varying(range: (f64, f64)) -> Self {
        Self {
            mode: LoadMode::Varying,
            discharge_current_range: range,
            charge_current: -3.0,
            soc_low: 0.05,
            soc_high: 0.95,
            rest_steps: 30,
            segment_length_range: (100, 300),
            dt: 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.discharge_current_range;
        let (smin, smax) = self.segment_length_range;
        let problem = if !(lo <= hi) {
            Some("discharge current range low > high")
        } else if !(lo > 0.0) {
            Some("discharge current must be positive")
        } else if !(self.charge_current < 0.0) {
            Some("charge current must be negative")
        } else if !(0.0 <= self.soc_low && self.soc_low < self.soc_high && self.soc_high <= 1.0) {
            Some("need 0 <= soc_low < soc_high <= 1")
        } else if !(self.dt > 0.0) {
            Some("dt must be positive")
        } else if smin == 0 || smin > smax {
            Some("invalid segment length range")
        } else {
            None
        };
        match problem {
            Some(p) => Err(Error::InvalidArgument(p.to_string())),
            None => Ok(()),
        }
    }
}
