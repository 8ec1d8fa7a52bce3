//! Experiment orchestration: simulate, train, evaluate and studies.
//!
//! Every command takes an [`ExperimentConfig`] and writes plot-ready CSV and
//! JSON under its output directory. The building blocks in [`pipeline`]
//! work on in-memory recordings for callers that skip the disk.

mod commands;
mod config;
pub mod fleet;
pub mod pipeline;

pub use commands::{
    evaluate, interval_label, simulate, study_early, study_extrapolate, study_noise, study_spectrum, train,
    SeedSummary, SimulateOutcome, SpectrumOutcome, Spread, StudyOutcome, StudyRow, TrainOutcome,
};
pub use config::{default_split, mode_name, ExperimentConfig, StudyConfig, WindowConfig, CONFIG_FORMAT_VERSION};
pub use pipeline::{
    bundle, control_samples, evaluate_early, evaluate_model, train_model, DataSplit, ModelSpec, WindowedData,
};
