use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{DkoGradients, DkoModel, KidmGradients, KidmModel, LossTerms, Objective};
use crate::data::{sequence_starts, WindowSample};
use crate::nn::{Adam, AdamConfig};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Rollout length `m`.
    pub horizon: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub seed: u64,
    /// Random subset of sequences visited per epoch; all when `None`.
    pub sequences_per_epoch: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            batch_size: 64,
            horizon: 10,
            learning_rate: 1e-4,
            weight_decay: 1e-7,
            seed: 0,
            sequences_per_epoch: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.batch_size == 0 {
            return Err(Error::InvalidArgument("horizon and batch size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) || !(self.weight_decay >= 0.0) {
            return Err(Error::InvalidArgument("learning rate must be > 0 and weight decay >= 0".into()));
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            ..AdamConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub rec: f64,
    pub lin: f64,
    pub pred: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub history: Vec<EpochLoss>,
}

impl TrainReport {
    /// `epoch,rec,lin,pred,total` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epoch,rec,lin,pred,total\n");
        for e in &self.history {
            s.push_str(&format!("{},{},{},{},{}\n", e.epoch, e.rec, e.lin, e.pred, e.total));
        }
        s
    }
}

/// Back-to-back windows of `m + 1` from per-recording window lists.
pub struct SequenceData<'a> {
    windows: &'a [Vec<WindowSample>],
    index: Vec<(usize, usize)>,
    step: usize,
    horizon: usize,
}

impl<'a> SequenceData<'a> {
    pub fn new(windows: &'a [Vec<WindowSample>], horizon: usize) -> Result<Self> {
        let mut index = Vec::new();
        let mut step = 1;
        for (r, ws) in windows.iter().enumerate() {
            let (starts, s) = sequence_starts(ws, horizon)?;
            step = s;
            index.extend(starts.into_iter().map(|i| (r, i)));
        }
        Ok(Self {
            windows,
            index,
            step,
            horizon,
        })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn sequence(&self, k: usize) -> Vec<&'a WindowSample> {
        let (r, i) = self.index[k];
        (0..=self.horizon).map(|j| &self.windows[r][i + j * self.step]).collect()
    }
}

/// A model trainable on window sequences.
pub trait SequenceModel {
    fn batch_loss_and_grad(&self, seqs: &[Vec<&WindowSample>], objective: Objective) -> Result<(LossTerms, Vec<Vec<f64>>)>;

    fn parameters(&mut self) -> Vec<&mut [f64]>;
}

fn flatten(slices: Vec<&[f64]>) -> Vec<Vec<f64>> {
    slices.into_iter().map(<[f64]>::to_vec).collect()
}

impl SequenceModel for DkoModel {
    fn batch_loss_and_grad(&self, seqs: &[Vec<&WindowSample>], objective: Objective) -> Result<(LossTerms, Vec<Vec<f64>>)> {
        let (terms, g) = self.batch_loss(seqs, objective, true)?;
        let g: DkoGradients = g.expect("requested");
        Ok((terms, flatten(g.slices())))
    }

    fn parameters(&mut self) -> Vec<&mut [f64]> {
        self.parameters_mut()
    }
}

impl SequenceModel for KidmModel {
    fn batch_loss_and_grad(&self, seqs: &[Vec<&WindowSample>], objective: Objective) -> Result<(LossTerms, Vec<Vec<f64>>)> {
        let (terms, g) = self.batch_loss(seqs, objective, true)?;
        let g: KidmGradients = g.expect("requested");
        Ok((terms, flatten(g.slices())))
    }

    fn parameters(&mut self) -> Vec<&mut [f64]> {
        self.parameters_mut()
    }
}

/// Minibatch Adam over shuffled sequences.
///
/// Reconstruction-only training visits single windows (`m = 0`); full
/// training visits sequences of `config.horizon + 1` windows. The loss
/// history holds the batch-size weighted mean of each epoch's terms.
pub fn train_sequence_model<M: SequenceModel>(
    model: &mut M,
    windows: &[Vec<WindowSample>],
    objective: Objective,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    let horizon = match objective {
        Objective::Full => config.horizon,
        Objective::ReconstructionOnly => 0,
    };
    let data = SequenceData::new(windows, horizon)?;
    if data.is_empty() {
        return Err(Error::EmptyData("no training sequences of the requested horizon"));
    }
    let mut adam = Adam::new(config.adam());
    let mut report = TrainReport::default();
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng_from_seed(derive_seed(config.seed, "epoch", epoch as u64)));
        let take = config.sequences_per_epoch.unwrap_or(order.len()).min(order.len());
        let mut acc = LossTerms::default();
        for chunk in order[..take].chunks(config.batch_size) {
            let seqs: Vec<Vec<&WindowSample>> = chunk.iter().map(|&k| data.sequence(k)).collect();
            let (terms, grads) = model.batch_loss_and_grad(&seqs, objective)?;
            if !terms.total.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            let w = chunk.len() as f64 / take as f64;
            acc.rec += w * terms.rec;
            acc.lin += w * terms.lin;
            acc.pred += w * terms.pred;
            acc.total += w * terms.total;
            let grad_refs: Vec<&[f64]> = grads.iter().map(Vec::as_slice).collect();
            adam.step(&mut model.parameters(), &grad_refs).map_err(|e| match e {
                Error::NonFinite(_) => Error::Divergence { epoch },
                other => other,
            })?;
        }
        report.history.push(EpochLoss {
            epoch,
            rec: acc.rec,
            lin: acc.lin,
            pred: acc.pred,
            total: acc.total,
        });
    }
    Ok(report)
}
