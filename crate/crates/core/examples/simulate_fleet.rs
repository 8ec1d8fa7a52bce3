//! Simulates run-to-failure trajectories under the three discharge-current
//! ranges and writes one fleet to CSV.
//!
//! cargo run --example simulate_fleet -- [out_dir]

use std::path::PathBuf;

use koopman_rul::battery::{generate_fleet, write_fleet, BatteryConfig, LoadProfile};

fn main() -> koopman_rul::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("koopman-rul-fleet"), PathBuf::from);
    let config = BatteryConfig::default();

    for range in [(1.0, 1.5), (1.5, 2.5), (2.5, 3.0)] {
        let fleet = generate_fleet(&LoadProfile::varying(range), &config, 5, 7)?;
        let cycles: Vec<usize> = fleet.iter().map(|t| t.cycles()).collect();
        let hours: Vec<String> = fleet.iter().map(|t| format!("{:.1}", t.eol_time / 3600.0)).collect();
        println!("I ~ U{range:?} A: cycles to EoL {cycles:?}, hours {hours:?}");
    }

    let fleet = generate_fleet(&LoadProfile::constant(1.0), &config, 2, 7)?;
    let t = &fleet[0];
    println!(
        "constant 1 A: {} samples, q_max {:.0} -> {:.0}, r0 {:.4} -> {:.4} Ohm",
        t.len(),
        t.q_max[0],
        t.q_max.last().unwrap(),
        t.r0[0],
        t.r0.last().unwrap()
    );
    let manifest = write_fleet(&out, "constant", &fleet, &config, 7, true)?;
    println!("wrote {} trajectories with hidden columns to {}", manifest.trajectories.len(), out.display());
    Ok(())
}
