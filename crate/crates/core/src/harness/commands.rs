use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{mode_name, ExperimentConfig};
use super::fleet::{load_split, simulate_profile, split_seed, recordings, SplitRecord};
use super::{bundle, control_samples, evaluate_early, evaluate_model, train_model, DataSplit, ModelSpec, WindowedData};
use crate::battery::{write_fleet, FleetManifest, LoadMode};
use crate::data::split;
use crate::koopman::{Model, ModelBundle, ModelKind, TrainReport};
use crate::rul::{Curve, MetricReport};
use crate::spectral::{spectrum_sweep, write_spectra_csv, IntervalSummary};
use crate::{Error, Result};

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Mean and sample standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

/// Metrics of one model aggregated over seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub model: String,
    pub kind: ModelKind,
    pub seeds: Vec<u64>,
    pub supervision_count: usize,
    pub mse: Spread,
    pub mae: Spread,
    pub mape: Spread,
    pub runs: Vec<MetricReport>,
}

impl SeedSummary {
    pub fn new(kind: ModelKind, supervision_count: usize, runs: Vec<MetricReport>) -> Self {
        let pick = |f: fn(&MetricReport) -> f64| Spread::of(&runs.iter().map(f).collect::<Vec<_>>());
        Self {
            model: kind.report_label().to_string(),
            kind,
            seeds: runs.iter().filter_map(|r| r.seed).collect(),
            supervision_count,
            mse: pick(|r| r.mse),
            mae: pick(|r| r.mae),
            mape: pick(|r| r.mape),
            runs,
        }
    }
}

/// Output of `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutcome {
    pub manifest_path: PathBuf,
    pub manifest: FleetManifest,
    pub split: SplitRecord,
}

/// Simulates `train + test` run-to-failure trajectories of the configured
/// profile and writes CSVs, the manifest and the split.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SimulateOutcome> {
    cfg.validate()?;
    let spec = cfg.split_spec();
    let n = spec.train_count + spec.test_count;
    let fleet = simulate_profile(cfg, &cfg.profile, n, "fleet")?;
    let dir = cfg.fleet_dir();
    let prefix = mode_name(cfg.profile.mode);
    let base = crate::rng::derive_seed(cfg.fleet_seed, "fleet", 0);
    let manifest = write_fleet(&dir, prefix, &fleet, &cfg.battery, base, cfg.include_hidden)?;
    let seed = split_seed(cfg.fleet_seed);
    let record = SplitRecord {
        spec,
        seed,
        indices: split(n, &spec, seed)?,
    };
    write_json(&dir.join("split.json"), &record)?;
    Ok(SimulateOutcome {
        manifest_path: dir.join(format!("{prefix}_manifest.json")),
        manifest,
        split: record,
    })
}

fn model_path(cfg: &ExperimentConfig, kind: ModelKind, seed: u64) -> PathBuf {
    cfg.output_dir.join("models").join(format!("{kind}_seed{seed}.json"))
}

fn noisy_split(cfg: &ExperimentConfig) -> Result<DataSplit> {
    let (_, split) = load_split(cfg)?;
    split.with_noise(cfg.noise_sigma, cfg.fleet_seed)
}

fn prepare(cfg: &ExperimentConfig, split: &DataSplit, kind: ModelKind) -> Result<WindowedData> {
    WindowedData::prepare(split, kind.battery_channels(), cfg.window.size, cfg.window.stride)
}

/// Output of `train`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub bundle_path: PathBuf,
    pub loss_path: PathBuf,
    pub report: TrainReport,
}

fn train_and_save(cfg: &ExperimentConfig, spec: &ModelSpec, data: &WindowedData, seed: u64) -> Result<(Model, TrainOutcome)> {
    let (model, report) = train_model(spec, data, seed)?;
    let bundle_path = model_path(cfg, spec.kind, seed);
    create_dir(bundle_path.parent().expect("models dir"))?;
    bundle(spec, &model, data, seed).save(&bundle_path)?;
    let loss_path = bundle_path.with_file_name(format!("{}_seed{seed}_loss.csv", spec.kind));
    write_text(&loss_path, &report.to_csv())?;
    Ok((
        model,
        TrainOutcome {
            bundle_path,
            loss_path,
            report,
        },
    ))
}

/// Trains the configured model with `cfg.seed`.
pub fn train(cfg: &ExperimentConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let split = noisy_split(cfg)?;
    let data = prepare(cfg, &split, cfg.model.kind)?;
    Ok(train_and_save(cfg, &cfg.model, &data, cfg.seed)?.1)
}

/// The model of `kind` for `seed`: loaded from `models/` when `train` already
/// wrote it, trained and saved otherwise.
fn obtain(cfg: &ExperimentConfig, kind: ModelKind, split: &DataSplit, seed: u64) -> Result<(Model, WindowedData)> {
    let path = model_path(cfg, kind, seed);
    if path.exists() {
        let b = ModelBundle::load(&path)?;
        if b.kind != kind || b.seed != seed {
            return Err(Error::Config(format!("{} holds a different model", path.display())));
        }
        let data = WindowedData::with_normalization(split, b.channels.clone(), b.normalization.clone(), b.window_size, cfg.window.stride)?;
        return Ok((b.model()?, data));
    }
    let data = prepare(cfg, split, kind)?;
    let (model, _) = train_and_save(cfg, &cfg.model.with_kind(kind), &data, seed)?;
    Ok((model, data))
}

fn write_curves(dir: &Path, curves: &[Curve]) -> Result<()> {
    create_dir(dir)?;
    for c in curves {
        c.write_csv(&dir.join(format!("{}.csv", c.recording)))?;
    }
    Ok(())
}

fn tagged(mut report: MetricReport, kind: ModelKind, seed: u64) -> MetricReport {
    report.model = Some(kind.report_label().to_string());
    report.seed = Some(seed);
    report
}

/// Per-seed metric reports and prediction curves plus a mean/std summary.
pub fn evaluate(cfg: &ExperimentConfig) -> Result<SeedSummary> {
    cfg.validate()?;
    let split = noisy_split(cfg)?;
    let kind = cfg.model.kind;
    let mut runs = Vec::new();
    for seed in cfg.model_seeds() {
        let (model, data) = obtain(cfg, kind, &split, seed)?;
        let (report, curves) = evaluate_model(&model, &data, cfg.model.ridge, cfg.smoothing_sigma)?;
        let report = tagged(report, kind, seed);
        write_json(&cfg.output_dir.join("reports").join(format!("{kind}_seed{seed}.json")), &report)?;
        write_curves(&cfg.output_dir.join("predictions").join(format!("{kind}_seed{seed}")), &curves)?;
        runs.push(report);
    }
    let summary = SeedSummary::new(kind, split.supervision.len(), runs);
    write_json(&cfg.output_dir.join("reports").join(format!("{kind}_summary.json")), &summary)?;
    Ok(summary)
}

/// One row of a study table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    /// Noise level, interval or protocol the row belongs to.
    pub condition: String,
    pub report: MetricReport,
}

fn study_csv(rows: &[StudyRow], condition: &str) -> String {
    let mut s = format!("{condition},model,seed,mse,mae,mape,n\n");
    for r in rows {
        let m = &r.report;
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.condition,
            m.model.as_deref().unwrap_or(""),
            m.seed.map_or(String::new(), |v| v.to_string()),
            m.mse,
            m.mae,
            m.mape,
            m.n
        ));
    }
    s
}

/// `(condition, summary)` pairs for every condition and model in `rows`.
fn summarize(rows: &[StudyRow], kinds: &[ModelKind], supervision: usize) -> Vec<(String, SeedSummary)> {
    let mut conditions: Vec<&str> = Vec::new();
    for r in rows {
        if !conditions.contains(&r.condition.as_str()) {
            conditions.push(&r.condition);
        }
    }
    let mut out = Vec::new();
    for c in conditions {
        for &k in kinds {
            let runs: Vec<MetricReport> = rows
                .iter()
                .filter(|r| r.condition == c && r.report.model.as_deref() == Some(k.report_label()))
                .map(|r| r.report.clone())
                .collect();
            if !runs.is_empty() {
                out.push((c.to_string(), SeedSummary::new(k, supervision, runs)));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyOutcome {
    pub study: String,
    pub rows: Vec<StudyRow>,
    pub summary: Vec<(String, SeedSummary)>,
}

fn finish_study(cfg: &ExperimentConfig, name: &str, condition: &str, rows: Vec<StudyRow>, kinds: &[ModelKind], supervision: usize) -> Result<StudyOutcome> {
    let dir = cfg.output_dir.join("studies");
    write_text(&dir.join(format!("{name}.csv")), &study_csv(&rows, condition))?;
    let outcome = StudyOutcome {
        study: name.to_string(),
        summary: summarize(&rows, kinds, supervision),
        rows,
    };
    write_json(&dir.join(format!("{name}_summary.json")), &outcome.summary)?;
    Ok(outcome)
}

/// RUL error of each noise model at every noise level.
pub fn study_noise(cfg: &ExperimentConfig) -> Result<StudyOutcome> {
    cfg.validate()?;
    let (_, clean) = load_split(cfg)?;
    let mut rows = Vec::new();
    for &sigma in &cfg.study.noise_sigmas {
        let split = clean.with_noise(sigma, cfg.fleet_seed)?;
        for &kind in &cfg.study.noise_models {
            let data = prepare(cfg, &split, kind)?;
            for seed in cfg.model_seeds() {
                let (model, _) = train_model(&cfg.model.with_kind(kind), &data, seed)?;
                let (report, _) = evaluate_model(&model, &data, cfg.model.ridge, cfg.smoothing_sigma)?;
                rows.push(StudyRow {
                    condition: sigma.to_string(),
                    report: tagged(report, kind, seed),
                });
            }
        }
    }
    finish_study(cfg, "noise", "sigma", rows, &cfg.study.noise_models, clean.supervision.len())
}

fn observable_kinds(kinds: &[ModelKind]) -> Vec<ModelKind> {
    kinds.iter().copied().filter(|k| *k != ModelKind::Fnn).collect()
}

/// Linear heads fitted on the first `early_fraction` of the supervision life.
pub fn study_early(cfg: &ExperimentConfig) -> Result<StudyOutcome> {
    cfg.validate()?;
    let split = noisy_split(cfg)?;
    let kinds = observable_kinds(&cfg.study.ablation_models);
    let mut rows = Vec::new();
    for &kind in &kinds {
        for seed in cfg.model_seeds() {
            let (model, data) = obtain(cfg, kind, &split, seed)?;
            let (report, _) = evaluate_early(&model, &data, cfg.study.early_fraction, cfg.model.ridge, cfg.smoothing_sigma)?;
            rows.push(StudyRow {
                condition: format!("first {}", cfg.study.early_fraction),
                report: tagged(report, kind, seed),
            });
        }
    }
    finish_study(cfg, "early", "protocol", rows, &kinds, split.supervision.len())
}

pub fn interval_label(interval: (f64, f64)) -> String {
    format!("[{},{}]", interval.0, interval.1)
}

/// Trains on the configured fleet and tests on fleets simulated from other
/// discharge-current intervals.
pub fn study_extrapolate(cfg: &ExperimentConfig) -> Result<StudyOutcome> {
    cfg.validate()?;
    if cfg.profile.mode != LoadMode::Varying || cfg.profile.discharge_current_range != cfg.study.extrapolation_train {
        return Err(Error::Config(format!(
            "extrapolation trains on the varying-load fleet {}; the configured profile differs",
            interval_label(cfg.study.extrapolation_train)
        )));
    }
    let split = noisy_split(cfg)?;
    let kinds = cfg.study.ablation_models.clone();
    let mut tests = Vec::new();
    for (k, &interval) in cfg.study.extrapolation_test.iter().enumerate() {
        let mut profile = cfg.profile.clone();
        profile.discharge_current_range = interval;
        let fleet = simulate_profile(cfg, &profile, cfg.study.extrapolation_test_count, &format!("extrapolate/{k}"))?;
        let recs = recordings(&format!("extrapolate{k}"), &fleet, cfg.noise_sigma, cfg.fleet_seed)?;
        tests.push((interval_label(interval), recs));
    }
    let mut rows = Vec::new();
    for &kind in &kinds {
        for seed in cfg.model_seeds() {
            let (model, data) = obtain(cfg, kind, &split, seed)?;
            for (label, recs) in &tests {
                let shifted = data.with_test(recs, cfg.window.stride)?;
                let (report, _) = evaluate_model(&model, &shifted, cfg.model.ridge, cfg.smoothing_sigma)?;
                rows.push(StudyRow {
                    condition: label.clone(),
                    report: tagged(report, kind, seed),
                });
            }
        }
    }
    finish_study(cfg, "extrapolation", "interval", rows, &kinds, split.supervision.len())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOutcome {
    pub seed: u64,
    pub intervals: Vec<IntervalSummary>,
    /// Lowest-current interval keeps larger dominant eigenvalues than the
    /// highest-current one.
    pub low_current_degrades_slower: Option<bool>,
}

/// Eigenvalues of KIDM operators over control windows from each interval.
pub fn study_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumOutcome> {
    cfg.validate()?;
    let split = noisy_split(cfg)?;
    let (model, data) = obtain(cfg, ModelKind::Kidm, &split, cfg.seed)?;
    let Model::Kidm(kidm) = &model else {
        return Err(Error::Config("spectrum study needs a KIDM bundle".into()));
    };
    let mut samples = Vec::new();
    for (k, &interval) in cfg.study.spectrum_intervals.iter().enumerate() {
        let mut profile = cfg.profile.clone();
        profile.discharge_current_range = interval;
        let label = interval_label(interval);
        let mut found = Vec::new();
        // Simulate until enough pure-interval windows are available.
        for batch in 0..16 {
            let fleet = simulate_profile(cfg, &profile, 2, &format!("spectrum/{k}/{batch}"))?;
            let recs = recordings(&format!("spectrum{k}_{batch}"), &fleet, cfg.noise_sigma, cfg.fleet_seed)?;
            found.extend(control_samples(&recs, &data, interval, cfg.study.spectrum_samples - found.len(), &label)?);
            if found.len() >= cfg.study.spectrum_samples {
                break;
            }
        }
        samples.extend(found);
    }
    let sweep = spectrum_sweep(kidm, &samples)?;
    let dir = cfg.output_dir.join("studies");
    create_dir(&dir)?;
    write_spectra_csv(&sweep, &dir.join("spectrum.csv"))?;
    let labels: Vec<String> = cfg.study.spectrum_intervals.iter().map(|i| interval_label(*i)).collect();
    let outcome = SpectrumOutcome {
        seed: cfg.seed,
        low_current_degrades_slower: match (labels.first(), labels.last()) {
            (Some(lo), Some(hi)) if lo != hi => sweep.slower_degradation(lo, hi),
            _ => None,
        },
        intervals: sweep.intervals,
    };
    write_json(&dir.join("spectrum_summary.json"), &outcome)?;
    Ok(outcome)
}
