use rand::seq::SliceRandom;

use super::{Architecture, EpochLoss, TrainConfig, TrainReport};
use crate::data::WindowSample;
use crate::nn::{Adam, Matrix, Mlp};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Feed-forward regressor from raw window features (`x` then `u`) to RUL.
#[derive(Clone, Debug, PartialEq)]
pub struct FnnModel {
    pub net: Mlp,
}

fn features(windows: &[&WindowSample]) -> Result<Matrix> {
    let first = windows.first().ok_or(Error::EmptyData("fnn batch"))?;
    let width = first.x.len() + first.u.len();
    let mut m = Matrix::zeros(windows.len(), width);
    for (r, w) in windows.iter().enumerate() {
        if w.x.len() + w.u.len() != width {
            return Err(Error::DimensionMismatch {
                context: "fnn features",
                expected: width,
                actual: w.x.len() + w.u.len(),
            });
        }
        let row = m.row_mut(r);
        row[..w.x.len()].copy_from_slice(&w.x);
        row[w.x.len()..].copy_from_slice(&w.u);
    }
    Ok(m)
}

impl FnnModel {
    pub fn new(arch: &Architecture, input_dim: usize, seed: u64) -> Result<Self> {
        let mut sizes = vec![input_dim];
        sizes.extend(&arch.hidden);
        sizes.push(1);
        Ok(Self {
            net: Mlp::new(&sizes, &mut rng_from_seed(derive_seed(seed, "fnn", 0)))?,
        })
    }

    /// Raw (unclamped) predictions.
    pub fn predict_windows(&self, windows: &[&WindowSample]) -> Result<Vec<f64>> {
        Ok(self.net.predict_batch(&features(windows)?)?.into_vec())
    }

    /// Mean-squared-error regression onto the windows' labels.
    pub fn train(&mut self, windows: &[&WindowSample], config: &TrainConfig) -> Result<TrainReport> {
        config.validate()?;
        if windows.is_empty() {
            return Err(Error::EmptyData("fnn training windows"));
        }
        let targets: Vec<f64> = windows
            .iter()
            .map(|w| w.rul.ok_or_else(|| Error::NoEndOfLife(w.source.recording.clone())))
            .collect::<Result<_>>()?;
        let mut adam = Adam::new(config.adam());
        let mut report = TrainReport::default();
        let mut order: Vec<usize> = (0..windows.len()).collect();
        for epoch in 0..config.epochs {
            order.shuffle(&mut rng_from_seed(derive_seed(config.seed, "fnn-epoch", epoch as u64)));
            let mut mse = 0.0;
            for chunk in order.chunks(config.batch_size) {
                let batch: Vec<&WindowSample> = chunk.iter().map(|&i| windows[i]).collect();
                let (out, tape) = self.net.forward_batch(&features(&batch)?)?;
                let scale = 1.0 / chunk.len() as f64;
                let mut g = out.clone();
                for (k, &i) in chunk.iter().enumerate() {
                    let r = out.as_slice()[k] - targets[i];
                    mse += r * r / windows.len() as f64;
                    g.as_mut_slice()[k] = 2.0 * scale * r;
                }
                if !mse.is_finite() {
                    return Err(Error::Divergence { epoch });
                }
                let (grads, _) = self.net.backward(&tape, &g)?;
                adam.step(&mut self.net.parameters_mut(), &grads.slices())
                    .map_err(|e| match e {
                        Error::NonFinite(_) => Error::Divergence { epoch },
                        other => other,
                    })?;
            }
            report.history.push(EpochLoss {
                epoch,
                rec: mse,
                lin: 0.0,
                pred: 0.0,
                total: mse,
            });
        }
        Ok(report)
    }
}
