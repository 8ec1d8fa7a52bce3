//! KIDM+LR against its autoencoder ablations on varying-load batteries,
//! with the standard and early-lifetime estimator fits.

use koopman_rul::data::SplitSpec;
use koopman_rul::harness::fleet::in_memory_split;
use koopman_rul::harness::{evaluate_early, evaluate_model, train_model, ExperimentConfig, WindowedData};
use koopman_rul::koopman::{Architecture, ModelKind, TrainConfig};

fn main() -> koopman_rul::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.split = Some(SplitSpec::new(12, 12, 1));
    cfg.model.architecture = Architecture { hidden: vec![32, 32], observable_dim: 5 };
    cfg.model.train = TrainConfig { epochs: 15, batch_size: 32, horizon: 20, learning_rate: 1e-3, ..TrainConfig::default() };

    let split = in_memory_split(&cfg)?;
    println!("{:<10} {:>10} {:>12}", "model", "test MSE", "early MSE");
    for kind in [ModelKind::Kidm, ModelKind::Kidmae, ModelKind::Ae] {
        let data = WindowedData::prepare(&split, kind.battery_channels(), cfg.window.size, cfg.window.stride)?;
        let (model, _) = train_model(&cfg.model.with_kind(kind), &data, 0)?;
        let (full, curves) = evaluate_model(&model, &data, cfg.model.ridge, cfg.smoothing_sigma)?;
        let (early, _) = evaluate_early(&model, &data, 0.3, cfg.model.ridge, cfg.smoothing_sigma)?;
        println!("{:<10} {:>10.5} {:>12.5}", kind.report_label(), full.mse, early.mse);
        if kind == ModelKind::Kidm {
            let c = &curves[0];
            for k in (0..c.rul_true.len()).step_by(c.rul_true.len() / 6) {
                println!("    t {:>7.0} s  true {:.3}  predicted {:.3}", c.time_s[k], c.rul_true[k], c.rul_pred_smoothed[k]);
            }
        }
    }
    Ok(())
}
