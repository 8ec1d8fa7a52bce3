//! Koopman-style degradation modelling and remaining-useful-life (RUL)
//! estimation.
//!
//! The crate is organised bottom-up:
//!
//! - [`nn`]: dense matrices, SELU feed-forward networks with reverse-mode
//!   gradients, and the Adam optimiser.
//! - [`battery`]: an equivalent-circuit Li-ion surrogate with degrading
//!   hidden health parameters, run to failure under constant or randomised
//!   piecewise-constant loads.
//! - [`data`]: recordings, windowing, RUL labels, standardisation and
//!   train/test splits.
//! - [`koopman`]: the deep Koopman operator (DKO), the control-conditioned
//!   degradation model (KIDM) and their autoencoder / FNN baselines.
//! - [`rul`]: linear read-out from observables to RUL, metrics, smoothing
//!   and the early-lifetime protocol.
//! - [`spectral`]: dense real eigenvalues (Hessenberg + Francis QR) and
//!   spectrum sweeps over learned degradation operators.
//! - [`harness`]: JSON-configured experiments behind the `koopman-rul`
//!   binary.

pub mod battery;
pub mod data;
mod error;
pub mod harness;
pub mod koopman;
pub mod nn;
pub mod rng;
pub mod rul;
pub mod spectral;

pub use error::{Error, Result};
