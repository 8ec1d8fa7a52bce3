use super::{BatteryConfig, BatteryState, HealthParams};

/// Open-circuit voltage, monotone increasing on `[0, 1]`.
pub fn ocv(s: f64) -> f64 {
    3.0 + 1.2 * s + 0.15 * (s + 0.01).ln() - 0.15 * (1.01 - s).ln()
}

/// `OCV(surface_soc) - I * r0`.
pub fn terminal_voltage(state: &BatteryState, current: f64) -> f64 {
    ocv(state.surface_soc) - current * state.health.r0
}

/// Applies `|I|^gamma`-driven fade for `dt` seconds.
pub fn degrade(health: &HealthParams, current: f64, dt: f64, config: &BatteryConfig) -> HealthParams {
    let stress = current.abs().powf(config.degradation_exponent) * dt;
    HealthParams {
        q_max: (health.q_max - config.capacity_fade_rate * stress).max(f64::MIN_POSITIVE),
        r0: health.r0 + config.resistance_growth_rate * stress,
        d: health.d * (1.0 - config.diffusion_fade_rate * stress).max(f64::MIN_POSITIVE),
    }
}

/// Explicit-Euler update of charge, polarisation, temperature and health.
pub fn step(state: &BatteryState, current: f64, dt: f64, config: &BatteryConfig) -> BatteryState {
    let h = &state.health;
    let soc = (state.soc - current * dt / (config.coulombs_per_ion * h.q_max)).clamp(0.0, 1.0);
    let relax = (config.polarization_rate * h.d * dt).min(1.0);
    let surface_soc = (state.surface_soc + relax * (state.soc - state.surface_soc)).clamp(0.0, 1.0);
    let heat = current * current * h.r0 - config.heat_transfer * (state.temperature - config.ambient_temperature);
    let temperature = (state.temperature + dt * heat / config.heat_capacity).max(config.ambient_temperature);
    BatteryState {
        soc,
        surface_soc,
        temperature,
        health: degrade(h, current, dt, config),
        cycle_index: state.cycle_index,
        time: state.time + dt,
    }
}
