use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::model::{step, terminal_voltage};
use super::{BatteryConfig, BatteryState, HealthParams, LoadMode, LoadProfile, NOMINAL_DIFFUSION, Q_MAX_RANGE, R0_RANGE};
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::{Error, Result};

/// One simulated life, sampled every `dt`.
///
/// Row `k` holds the state at `time[k]` together with the current applied
/// during the following step; the record ends at the step that completes
/// the end-of-life discharge, and `eol_time` is the time right after it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub time: Vec<f64>,
    pub voltage: Vec<f64>,
    pub temperature: Vec<f64>,
    pub current: Vec<f64>,
    pub soc: Vec<f64>,
    /// Latest measured discharge capacity over the first one.
    pub capacity: Vec<f64>,
    pub q_max: Vec<f64>,
    pub r0: Vec<f64>,
    pub d: Vec<f64>,
    pub eol_time: f64,
    /// Measured capacity fraction of every discharge phase, EoL cycle last.
    pub cycle_capacities: Vec<f64>,
    pub initial: HealthParams,
    pub seed: u64,
    pub profile: LoadProfile,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn cycles(&self) -> usize {
        self.cycle_capacities.len()
    }

    fn with_capacity(n: usize, initial: HealthParams, seed: u64, profile: LoadProfile) -> Self {
        Self {
            time: Vec::with_capacity(n),
            voltage: Vec::with_capacity(n),
            temperature: Vec::with_capacity(n),
            current: Vec::with_capacity(n),
            soc: Vec::with_capacity(n),
            capacity: Vec::with_capacity(n),
            q_max: Vec::with_capacity(n),
            r0: Vec::with_capacity(n),
            d: Vec::with_capacity(n),
            eol_time: f64::NAN,
            cycle_capacities: Vec::new(),
            initial,
            seed,
            profile,
        }
    }

    fn record(&mut self, s: &BatteryState, current: f64, capacity: f64) {
        self.time.push(s.time);
        self.voltage.push(terminal_voltage(s, current));
        self.temperature.push(s.temperature);
        self.current.push(current);
        self.soc.push(s.soc);
        self.capacity.push(capacity);
        self.q_max.push(s.health.q_max);
        self.r0.push(s.health.r0);
        self.d.push(s.health.d);
    }
}

/// Draws `q_max ~ U(7500, 7600)`, `r0 ~ U(0.107215, 0.127215)`, nominal `d`.
pub fn sample_initial_conditions(seed: u64) -> HealthParams {
    let mut rng = rng_from_seed(seed);
    HealthParams {
        q_max: rng.random_range(Q_MAX_RANGE.0..=Q_MAX_RANGE.1),
        r0: rng.random_range(R0_RANGE.0..=R0_RANGE.1),
        d: NOMINAL_DIFFUSION,
    }
}

fn uniform(rng: &mut SimRng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Cycles the cell from `soc_high` until a discharge delivers at most
/// `eol_capacity_fraction` of the first discharge's charge.
pub fn run_to_failure(
    profile: &LoadProfile,
    initial: HealthParams,
    config: &BatteryConfig,
    seed: u64,
) -> Result<Trajectory> {
    profile.validate()?;
    initial.validate()?;
    let mut rng = rng_from_seed(seed);
    let dt = profile.dt;
    let constant_current = uniform(&mut rng, profile.discharge_current_range);
    let mut traj = Trajectory::with_capacity(1 << 16, initial, seed, profile.clone());
    let mut state = BatteryState::at_rest(initial, profile.soc_high, config);
    let mut reference: Option<f64> = None;
    let mut capacity = 1.0;

    for cycle in 0..config.max_cycles {
        state.cycle_index = cycle;

        let mut delivered = 0.0;
        let mut segment_left = 0usize;
        let mut segment_current = constant_current;
        while state.soc > profile.soc_low {
            if profile.mode == LoadMode::Varying {
                if segment_left == 0 {
                    segment_current = uniform(&mut rng, profile.discharge_current_range);
                    let (lo, hi) = profile.segment_length_range;
                    segment_left = rng.random_range(lo..=hi);
                }
                segment_left -= 1;
            }
            traj.record(&state, segment_current, capacity);
            let next = step(&state, segment_current, dt, config);
            // Count charge only down to soc_low so the measurement does not
            // depend on where the last step lands.
            let fraction = if next.soc < profile.soc_low {
                (state.soc - profile.soc_low) / (state.soc - next.soc)
            } else {
                1.0
            };
            delivered += fraction * segment_current * dt;
            state = next;
        }

        let reference = *reference.get_or_insert(delivered);
        capacity = delivered / reference;
        traj.cycle_capacities.push(capacity);
        if capacity <= config.eol_capacity_fraction {
            traj.eol_time = state.time;
            return Ok(traj);
        }

        for _ in 0..profile.rest_steps {
            traj.record(&state, 0.0, capacity);
            state = step(&state, 0.0, dt, config);
        }
        while state.soc < profile.soc_high {
            traj.record(&state, profile.charge_current, capacity);
            state = step(&state, profile.charge_current, dt, config);
        }
    }
    Err(Error::NonTerminating(config.max_cycles))
}

/// `count` trajectories with per-index seeds derived from `base_seed`.
pub fn generate_fleet(
    profile: &LoadProfile,
    config: &BatteryConfig,
    count: usize,
    base_seed: u64,
) -> Result<Vec<Trajectory>> {
    (0..count as u64)
        .map(|i| {
            let seed = derive_seed(base_seed, "trajectory", i);
            let initial = sample_initial_conditions(derive_seed(seed, "initial", 0));
            run_to_failure(profile, initial, config, seed)
        })
        .collect()
}

/// Adds i.i.d. `N(0, sigma^2)` to voltage and temperature only.
pub fn inject_noise(trajectory: &Trajectory, sigma: f64, seed: u64) -> Result<Trajectory> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let mut out = trajectory.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    for (v, t) in out.voltage.iter_mut().zip(out.temperature.iter_mut()) {
        *v += normal.sample(&mut rng);
        *t += normal.sample(&mut rng);
    }
    Ok(out)
}
