//! Learned latent-linear dynamics models.
//!
//! - [`DkoModel`]: encoder `phi`, decoder `psi` and one square operator `K`.
//! - [`KidmModel`]: encoder over `(x, u)`, a network producing a per-step
//!   operator from the control window, and a decoder over `(y, u)`.
//! - The autoencoder baselines are the same two models trained on the
//!   reconstruction term only; [`FnnModel`] regresses RUL directly.

mod batch;
mod bundle;
mod dko;
mod fnn;
mod kidm;
mod train;

pub use bundle::{Model, ModelBundle, ModelKind};
pub use dko::{DkoGradients, DkoModel};
pub use fnn::FnnModel;
pub use kidm::{KidmGradients, KidmModel};
pub use train::{train_sequence_model, EpochLoss, SequenceData, SequenceModel, TrainConfig, TrainReport};

use serde::{Deserialize, Serialize};

use crate::data::WindowSample;
use crate::nn::Matrix;
use crate::Result;

/// Hidden widths shared by every network of a model, and the latent size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub hidden: Vec<usize>,
    pub observable_dim: usize,
}

impl Default for Architecture {
    /// Five fully connected layers of width 100 per network, five observables.
    fn default() -> Self {
        Self {
            hidden: vec![100; 4],
            observable_dim: 5,
        }
    }
}

/// Reconstruction, linear-dynamics and prediction terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossTerms {
    pub rec: f64,
    pub lin: f64,
    pub pred: f64,
    pub total: f64,
}

impl LossTerms {
    fn new(rec: f64, lin: f64, pred: f64) -> Self {
        Self {
            rec,
            lin,
            pred,
            total: rec + lin + pred,
        }
    }
}

/// Which loss terms a training run optimises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    /// `rec + lin + pred`.
    Full,
    /// `rec` only (autoencoder ablations).
    ReconstructionOnly,
}

/// Maps windows to observables.
pub trait Observer {
    fn observable_dim(&self) -> usize;

    /// Observables of a batch of windows, one row each.
    fn encode_windows(&self, windows: &[&WindowSample]) -> Result<Matrix>;

    fn encode(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>>;
}
