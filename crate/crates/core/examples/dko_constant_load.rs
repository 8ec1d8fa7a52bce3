//! DKO+LR against AE+LR and an FNN regressor on noisy constant-load data.
//!
//! cargo run --release --example dko_constant_load -- [noise_sigma]

use koopman_rul::battery::LoadProfile;
use koopman_rul::data::SplitSpec;
use koopman_rul::harness::fleet::in_memory_split;
use koopman_rul::harness::{evaluate_model, train_model, ExperimentConfig, WindowedData};
use koopman_rul::koopman::{Architecture, ModelKind, TrainConfig};

fn main() -> koopman_rul::Result<()> {
    let sigma: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let mut cfg = ExperimentConfig::default();
    cfg.profile = LoadProfile::constant(1.0);
    cfg.split = Some(SplitSpec::new(6, 6, 1));
    cfg.model.architecture = Architecture { hidden: vec![32, 32], observable_dim: 5 };
    cfg.model.train = TrainConfig {
        epochs: 15,
        batch_size: 32,
        learning_rate: 1e-3,
        sequences_per_epoch: Some(3000),
        ..TrainConfig::default()
    };

    let split = in_memory_split(&cfg)?.with_noise(sigma, cfg.fleet_seed)?;
    for kind in [ModelKind::Dko, ModelKind::Ae, ModelKind::Fnn] {
        let data = WindowedData::prepare(&split, kind.battery_channels(), cfg.window.size, cfg.window.stride)?;
        let (model, report) = train_model(&cfg.model.with_kind(kind), &data, 0)?;
        let (metrics, _) = evaluate_model(&model, &data, cfg.model.ridge, cfg.smoothing_sigma)?;
        let last = report.history.last().expect("epochs > 0");
        println!(
            "{:<8} final loss {:.4}  test MSE {:.5}  MAE {:.4}",
            kind.report_label(),
            last.total,
            metrics.mse,
            metrics.mae
        );
    }
    Ok(())
}
