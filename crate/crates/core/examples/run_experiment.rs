//! The config-driven pipeline behind the binary: simulate, train, evaluate
//! and the noise study, all writing under one output directory.
//!
//! cargo run --release --example run_experiment -- [out_dir]

use std::path::PathBuf;

use koopman_rul::data::SplitSpec;
use koopman_rul::harness::{self, ExperimentConfig};
use koopman_rul::koopman::{Architecture, ModelKind, TrainConfig};

fn main() -> koopman_rul::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("koopman-rul-run"), PathBuf::from);
    let mut cfg = ExperimentConfig::default();
    cfg.output_dir = out.clone();
    cfg.seeds = 2;
    cfg.split = Some(SplitSpec::new(6, 4, 1));
    cfg.model.kind = ModelKind::Kidm;
    cfg.model.architecture = Architecture { hidden: vec![24], observable_dim: 4 };
    cfg.model.train = TrainConfig { epochs: 5, batch_size: 32, learning_rate: 1e-3, ..TrainConfig::default() };
    cfg.study.noise_sigmas = vec![0.01, 1.0];
    std::fs::create_dir_all(&out).map_err(|e| koopman_rul::Error::Config(e.to_string()))?;
    cfg.save(&out.join("config.json"))?;

    let sim = harness::simulate(&cfg)?;
    println!("fleet: {} trajectories at {}", sim.manifest.trajectories.len(), sim.manifest_path.display());
    let trained = harness::train(&cfg)?;
    println!("model: {}", trained.bundle_path.display());
    let summary = harness::evaluate(&cfg)?;
    println!("{}: MSE {:.5} +- {:.5} over seeds {:?}", summary.model, summary.mse.mean, summary.mse.std, summary.seeds);

    let noise = harness::study_noise(&cfg)?;
    for (sigma, s) in &noise.summary {
        println!("  sigma {sigma:<5} {:<7} MSE {:.5}", s.model, s.mse.mean);
    }
    println!("rerun any step with: koopman-rul --config {} evaluate", out.join("config.json").display());
    Ok(())
}
