use serde::{Deserialize, Serialize};

use crate::data::{windowize, ChannelSpec, Recording, Standardizer, WindowSample};
use crate::koopman::{
    train_sequence_model, Architecture, DkoModel, FnnModel, KidmModel, Model, ModelBundle, ModelKind, TrainConfig,
    TrainReport,
};
use crate::rul::{early_lifetime_protocol, evaluate, fit_on_windows, score, Curve, MetricReport, DEFAULT_RIDGE};
use crate::{Error, Result};

/// Recordings already divided into roles.
#[derive(Clone, Debug, Default)]
pub struct DataSplit {
    pub train: Vec<Recording>,
    pub test: Vec<Recording>,
    /// Labelled training recordings the RUL head may see.
    pub supervision: Vec<Recording>,
}

/// Normalised windows of every role for one channel layout.
#[derive(Clone, Debug)]
pub struct WindowedData {
    pub normalization: Standardizer,
    pub channels: ChannelSpec,
    pub window_size: usize,
    pub train: Vec<Vec<WindowSample>>,
    pub test: Vec<Vec<WindowSample>>,
    pub supervision: Vec<Vec<WindowSample>>,
}

fn windows_of(
    recs: &[Recording],
    norm: &Standardizer,
    channels: &ChannelSpec,
    window: usize,
    stride: usize,
) -> Result<Vec<Vec<WindowSample>>> {
    recs.iter().map(|r| windowize(&norm.apply(r)?, channels, window, stride)).collect()
}

impl WindowedData {
    /// Fits the standardiser on the training recordings, then windows all roles.
    pub fn prepare(split: &DataSplit, channels: ChannelSpec, window: usize, stride: usize) -> Result<Self> {
        let norm = Standardizer::fit(&split.train, &channels.all_channels())?;
        Self::with_normalization(split, channels, norm, window, stride)
    }

    pub fn with_normalization(
        split: &DataSplit,
        channels: ChannelSpec,
        normalization: Standardizer,
        window: usize,
        stride: usize,
    ) -> Result<Self> {
        Ok(Self {
            train: windows_of(&split.train, &normalization, &channels, window, stride)?,
            test: windows_of(&split.test, &normalization, &channels, window, stride)?,
            supervision: windows_of(&split.supervision, &normalization, &channels, window, stride)?,
            normalization,
            channels,
            window_size: window,
        })
    }

    fn dims(&self) -> Result<(usize, usize)> {
        let w = self
            .train
            .iter()
            .chain(&self.supervision)
            .flatten()
            .next()
            .ok_or(Error::EmptyData("no training windows"))?;
        Ok((w.x.len(), w.u.len()))
    }
}

/// Everything needed to build and train one model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub architecture: Architecture,
    pub train: TrainConfig,
    pub ridge: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            kind: ModelKind::Kidm,
            architecture: Architecture::default(),
            train: TrainConfig::default(),
            ridge: DEFAULT_RIDGE,
        }
    }
}

impl ModelSpec {
    pub fn with_kind(&self, kind: ModelKind) -> Self {
        Self { kind, ..self.clone() }
    }
}

/// Builds a fresh model from `seed` and trains it. Sequence models train on
/// every training recording without labels; the FNN trains on the labelled
/// supervision windows only.
pub fn train_model(spec: &ModelSpec, data: &WindowedData, seed: u64) -> Result<(Model, TrainReport)> {
    let (nx, nu) = data.dims()?;
    let cfg = TrainConfig {
        seed,
        ..spec.train.clone()
    };
    let arch = &spec.architecture;
    let objective = spec.kind.objective();
    Ok(match spec.kind {
        ModelKind::Dko | ModelKind::Ae => {
            let mut m = DkoModel::new(arch, nx + nu, cfg.horizon, seed)?;
            if nu > 0 {
                return Err(Error::Config(format!("{} takes no control channels", spec.kind)));
            }
            let r = train_sequence_model(&mut m, &data.train, objective, &cfg)?;
            (Model::Dko(m), r)
        }
        ModelKind::Kidm | ModelKind::Kidmae => {
            let mut m = KidmModel::new(arch, nx, nu, cfg.horizon, seed)?;
            let r = train_sequence_model(&mut m, &data.train, objective, &cfg)?;
            (Model::Kidm(m), r)
        }
        ModelKind::Fnn => {
            let mut m = FnnModel::new(arch, nx + nu, seed)?;
            let windows: Vec<&WindowSample> = data.supervision.iter().flatten().collect();
            let r = m.train(&windows, &cfg)?;
            (Model::Fnn(m), r)
        }
    })
}

pub fn bundle(spec: &ModelSpec, model: &Model, data: &WindowedData, seed: u64) -> ModelBundle {
    ModelBundle::new(
        spec.kind,
        model,
        data.normalization.clone(),
        data.channels.clone(),
        data.window_size,
        seed,
    )
}

fn fnn_curves(m: &FnnModel, test: &[Vec<WindowSample>], sigma: f64, keep: impl Fn(&WindowSample) -> bool) -> Result<Vec<Curve>> {
    let mut curves = Vec::new();
    for rec in test {
        let ws: Vec<&WindowSample> = rec.iter().filter(|w| keep(w)).collect();
        if ws.is_empty() {
            continue;
        }
        let raw = m.predict_windows(&ws)?;
        let truth = ws
            .iter()
            .map(|w| w.rul.ok_or_else(|| Error::NoEndOfLife(w.source.recording.clone())))
            .collect::<Result<_>>()?;
        let time = ws.iter().map(|w| w.source.end_time).collect();
        curves.push(Curve::new(ws[0].source.recording.clone(), time, truth, &raw, sigma)?);
    }
    Ok(curves)
}

/// RUL metrics on the test windows. Sequence models get a linear head fitted
/// on the supervision windows' observables.
pub fn evaluate_model(model: &Model, data: &WindowedData, ridge: f64, sigma: f64) -> Result<(MetricReport, Vec<Curve>)> {
    match model {
        Model::Fnn(m) => {
            let curves = fnn_curves(m, &data.test, sigma, |_| true)?;
            Ok((score(&curves, sigma)?, curves))
        }
        _ => {
            let obs = model.observer().expect("sequence model");
            let sup: Vec<&WindowSample> = data.supervision.iter().flatten().collect();
            let est = fit_on_windows(obs, &sup, ridge)?;
            evaluate(&est, obs, &data.test, sigma)
        }
    }
}

/// Early-lifetime variant of [`evaluate_model`]; the FNN is not defined here.
pub fn evaluate_early(model: &Model, data: &WindowedData, fraction: f64, ridge: f64, sigma: f64) -> Result<(MetricReport, Vec<Curve>)> {
    let obs = model
        .observer()
        .ok_or_else(|| Error::Config("the early-lifetime protocol needs an observable model".into()))?;
    early_lifetime_protocol(obs, &data.supervision, &data.test, fraction, ridge, sigma)
}

impl WindowedData {
    /// Same normalisation, training and supervision windows; new test recordings.
    pub fn with_test(&self, test: &[Recording], stride: usize) -> Result<Self> {
        Ok(Self {
            test: windows_of(test, &self.normalization, &self.channels, self.window_size, stride)?,
            ..self.clone()
        })
    }
}

/// Up to `count` control windows whose raw current stays inside `interval`,
/// taken in recording order and normalised like the model's inputs.
pub fn control_samples(
    recs: &[Recording],
    data: &WindowedData,
    interval: (f64, f64),
    count: usize,
    label: &str,
) -> Result<Vec<crate::spectral::ControlSample>> {
    let mut out = Vec::new();
    let raw_spec = data.channels.clone();
    for rec in recs {
        let raw = windowize(rec, &raw_spec, data.window_size, data.window_size)?;
        let scaled = windowize(&data.normalization.apply(rec)?, &raw_spec, data.window_size, data.window_size)?;
        for (r, s) in raw.iter().zip(scaled) {
            if out.len() == count {
                return Ok(out);
            }
            if !r.u.is_empty() && r.u.iter().all(|i| (interval.0..=interval.1).contains(i)) {
                out.push(crate::spectral::ControlSample {
                    interval: label.to_string(),
                    sample_id: format!("{}@{}", s.source.recording, s.source.start),
                    u: s.u,
                });
            }
        }
    }
    Ok(out)
}
