//! Eigenvalues of learned KIDM degradation operators for controls drawn
//! from three current intervals.

use koopman_rul::battery::LoadProfile;
use koopman_rul::data::SplitSpec;
use koopman_rul::harness::fleet::{in_memory_split, recordings, simulate_profile};
use koopman_rul::harness::{control_samples, train_model, ExperimentConfig, WindowedData};
use koopman_rul::koopman::{Architecture, Model, ModelKind, TrainConfig};
use koopman_rul::spectral::spectrum_sweep;

fn main() -> koopman_rul::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.split = Some(SplitSpec::new(10, 4, 1));
    cfg.model.architecture = Architecture { hidden: vec![32, 32], observable_dim: 5 };
    cfg.model.train = TrainConfig { epochs: 10, batch_size: 32, horizon: 20, learning_rate: 1e-3, ..TrainConfig::default() };

    let split = in_memory_split(&cfg)?;
    let data = WindowedData::prepare(&split, ModelKind::Kidm.battery_channels(), cfg.window.size, cfg.window.stride)?;
    let (model, _) = train_model(&cfg.model, &data, 0)?;
    let Model::Kidm(kidm) = &model else { unreachable!("kidm spec") };

    let mut samples = Vec::new();
    for (k, range) in [(1.0, 1.5), (1.5, 2.5), (2.5, 3.0)].into_iter().enumerate() {
        let fleet = simulate_profile(&cfg, &LoadProfile::varying(range), 2, &format!("sweep/{k}"))?;
        let recs = recordings(&format!("sweep{k}"), &fleet, 0.0, cfg.fleet_seed)?;
        samples.extend(control_samples(&recs, &data, range, 50, &format!("{range:?}"))?);
    }
    let sweep = spectrum_sweep(kidm, &samples)?;
    for s in &sweep.intervals {
        println!(
            "{:<11} n {:>3}  real part in [{:.4}, {:.4}]  mean dominant {:.4}  max radius {:.4}",
            s.interval, s.count, s.real_min, s.real_max, s.mean_dominant_real, s.max_spectral_radius
        );
    }
    println!("slower degradation at low current: {:?}", sweep.slower_degradation("(1.0, 1.5)", "(2.5, 3.0)"));
    Ok(())
}
