use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{gaussian_smooth, ols_fit, RulEstimator};
use crate::data::WindowSample;
use crate::koopman::Observer;
use crate::{Error, Result};

/// Targets at or below this magnitude are left out of MAPE.
pub const MAPE_FLOOR: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub model: Option<String>,
    pub mse: f64,
    pub mae: f64,
    /// Fraction, not percent.
    pub mape: f64,
    pub n: usize,
    pub excluded_mape: usize,
    pub smoothing_sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

/// True and predicted RUL along one recording.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub recording: String,
    pub time_s: Vec<f64>,
    pub rul_true: Vec<f64>,
    /// Clamped to `[0, 1]`.
    pub rul_pred: Vec<f64>,
    pub rul_pred_smoothed: Vec<f64>,
}

impl Curve {
    /// Clamps raw predictions and attaches their smoothed version.
    pub fn new(recording: impl Into<String>, time_s: Vec<f64>, rul_true: Vec<f64>, raw: &[f64], sigma: f64) -> Result<Self> {
        if time_s.len() != rul_true.len() || raw.len() != rul_true.len() {
            return Err(Error::ShapeMismatch("curve columns differ in length".into()));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("RUL predictions"));
        }
        let rul_pred: Vec<f64> = raw.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(Self {
            recording: recording.into(),
            time_s,
            rul_true,
            rul_pred_smoothed: gaussian_smooth(&rul_pred, sigma),
            rul_pred,
        })
    }

    /// `time_s,rul_true,rul_pred,rul_pred_smoothed`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
        w.write_record(["time_s", "rul_true", "rul_pred", "rul_pred_smoothed"])?;
        for i in 0..self.time_s.len() {
            w.write_record(
                [self.time_s[i], self.rul_true[i], self.rul_pred[i], self.rul_pred_smoothed[i]].map(|v| v.to_string()),
            )?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Metrics over every point of every curve, on unsmoothed predictions.
pub fn score(curves: &[Curve], smoothing_sigma: f64) -> Result<MetricReport> {
    let (mut se, mut ae, mut ape) = (0.0, 0.0, 0.0);
    let (mut n, mut excluded) = (0, 0);
    for c in curves {
        for (t, p) in c.rul_true.iter().zip(&c.rul_pred) {
            let err = p - t;
            se += err * err;
            ae += err.abs();
            n += 1;
            if t.abs() > MAPE_FLOOR {
                ape += err.abs() / t.abs();
            } else {
                excluded += 1;
            }
        }
    }
    if n == 0 {
        return Err(Error::EmptyData("no test windows to score"));
    }
    let kept = n - excluded;
    Ok(MetricReport {
        model: None,
        mse: se / n as f64,
        mae: ae / n as f64,
        mape: if kept > 0 { ape / kept as f64 } else { 0.0 },
        n,
        excluded_mape: excluded,
        smoothing_sigma,
        seed: None,
    })
}

fn labels(windows: &[&WindowSample]) -> Result<Vec<f64>> {
    windows
        .iter()
        .map(|w| w.rul.ok_or_else(|| Error::NoEndOfLife(w.source.recording.clone())))
        .collect()
}

/// Fits the linear head on the observables of labelled windows.
pub fn fit_on_windows(observer: &dyn Observer, windows: &[&WindowSample], ridge: f64) -> Result<RulEstimator> {
    if windows.is_empty() {
        return Err(Error::EmptyData("no windows to fit the RUL estimator"));
    }
    ols_fit(&observer.encode_windows(windows)?, &labels(windows)?, ridge)
}

/// One curve per recording; only windows passing `keep` are scored.
fn curves_for(
    estimator: &RulEstimator,
    observer: &dyn Observer,
    test: &[Vec<WindowSample>],
    sigma: f64,
    keep: impl Fn(&WindowSample) -> bool,
) -> Result<Vec<Curve>> {
    let mut curves = Vec::new();
    for rec in test {
        let ws: Vec<&WindowSample> = rec.iter().filter(|w| keep(w)).collect();
        if ws.is_empty() {
            continue;
        }
        let raw = estimator.predict_rows(&observer.encode_windows(&ws)?)?;
        let time = ws.iter().map(|w| w.source.end_time).collect();
        curves.push(Curve::new(ws[0].source.recording.clone(), time, labels(&ws)?, &raw, sigma)?);
    }
    Ok(curves)
}

/// Scores a fitted head on every window of the test recordings.
pub fn evaluate(
    estimator: &RulEstimator,
    observer: &dyn Observer,
    test: &[Vec<WindowSample>],
    sigma: f64,
) -> Result<(MetricReport, Vec<Curve>)> {
    let curves = curves_for(estimator, observer, test, sigma, |_| true)?;
    Ok((score(&curves, sigma)?, curves))
}

/// Fits only on the first `fraction` of the supervision lifetimes and scores
/// the remaining `1 - fraction` of every test recording.
///
/// A window belongs to the early part when its last timestep lies at or
/// before `fraction * t_EoL`, i.e. its label is at least `1 - fraction`.
/// `fraction >= 1` degenerates to the standard protocol.
pub fn early_lifetime_protocol(
    observer: &dyn Observer,
    supervision: &[Vec<WindowSample>],
    test: &[Vec<WindowSample>],
    fraction: f64,
    ridge: f64,
    sigma: f64,
) -> Result<(MetricReport, Vec<Curve>)> {
    if !(fraction > 0.0) {
        return Err(Error::InvalidArgument(format!("early fraction must be > 0, got {fraction}")));
    }
    let all: Vec<&WindowSample> = supervision.iter().flatten().collect();
    if fraction >= 1.0 {
        let est = fit_on_windows(observer, &all, ridge)?;
        return evaluate(&est, observer, test, sigma);
    }
    let boundary = 1.0 - fraction;
    let early: Vec<&WindowSample> = all.into_iter().filter(|w| w.rul.is_some_and(|r| r >= boundary)).collect();
    if early.len() <= observer.observable_dim() {
        return Err(Error::InvalidArgument(format!(
            "only {} windows fall in the first {:.0}% of the supervision lifetime",
            early.len(),
            100.0 * fraction
        )));
    }
    let est = fit_on_windows(observer, &early, ridge)?;
    let curves = curves_for(&est, observer, test, sigma, |w| w.rul.is_some_and(|r| r < boundary))?;
    Ok((score(&curves, sigma)?, curves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::WindowSource;
    use crate::nn::Matrix;

    fn curve(truth: &[f64], pred: &[f64]) -> Curve {
        let time = (0..truth.len()).map(|i| i as f64).collect();
        Curve::new("c", time, truth.to_vec(), pred, 0.0).unwrap()
    }

    #[test]
    fn perfect_predictions_score_zero() {
        let r = score(&[curve(&[1.0, 0.5, 0.2], &[1.0, 0.5, 0.2])], 0.0).unwrap();
        assert_eq!((r.mse, r.mae, r.mape, r.n), (0.0, 0.0, 0.0, 3));
    }

    #[test]
    fn constant_offset() {
        let r = score(&[curve(&[0.1, 0.4, 0.5, 0.8], &[0.2, 0.5, 0.6, 0.9])], 0.0).unwrap();
        assert!((r.mse - 0.01).abs() < 1e-15);
        assert!((r.mae - 0.1).abs() < 1e-15);
        assert!((r.mse - r.mae * r.mae).abs() < 1e-15);
    }

    #[test]
    fn mape_skips_near_zero_targets_and_clamps() {
        let c = curve(&[1.0, 0.5, 0.005, 0.0], &[1.3, 0.4, 0.1, -0.2]);
        assert_eq!(c.rul_pred, vec![1.0, 0.4, 0.1, 0.0]);
        let r = score(&[c], 0.0).unwrap();
        assert_eq!(r.excluded_mape, 2);
        assert!((r.mape - 0.1).abs() < 1e-12);
        assert!(r.mse >= 0.0 && r.mae >= 0.0);
    }

    #[test]
    fn empty_test_set_is_an_error() {
        assert!(matches!(score(&[], 0.0), Err(Error::EmptyData(_))));
    }

    #[test]
    fn report_json_fields() {
        let mut r = score(&[curve(&[0.5], &[0.5])], 5.0).unwrap();
        r.model = Some("KIDM+LR".into());
        r.seed = Some(3);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["model", "mse", "mae", "mape", "n", "excluded_mape", "smoothing_sigma", "seed"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    /// Observer exposing the first state entry and its square.
    struct Feature;

    impl Observer for Feature {
        fn observable_dim(&self) -> usize {
            2
        }
        fn encode_windows(&self, windows: &[&WindowSample]) -> Result<Matrix> {
            Matrix::from_rows(&windows.iter().map(|w| vec![w.x[0], w.x[0] * w.x[0]]).collect::<Vec<_>>())
        }
        fn encode(&self, x: &[f64], _u: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![x[0], x[0] * x[0]])
        }
    }

    fn recording(id: &str, n: usize, curvature: f64) -> Vec<WindowSample> {
        (0..n)
            .map(|i| {
                let rul = 1.0 - i as f64 / (n - 1) as f64;
                WindowSample {
                    x: vec![rul + curvature * rul * (1.0 - rul)],
                    u: vec![],
                    rul: Some(rul),
                    source: WindowSource {
                        recording: id.into(),
                        start: i,
                        len: 1,
                        end_time: i as f64,
                    },
                }
            })
            .collect()
    }

    #[test]
    fn early_protocol_fits_only_early_windows() {
        let sup = vec![recording("s", 101, 0.0)];
        let test = vec![recording("t", 51, 0.0)];
        let (r, curves) = early_lifetime_protocol(&Feature, &sup, &test, 0.3, 0.0, 0.0).unwrap();
        assert!(r.mse < 1e-20);
        assert!(curves[0].rul_true.iter().all(|&t| t < 0.7));
        assert_eq!(r.n, test[0].iter().filter(|w| w.rul.unwrap() < 0.7).count());
        let early: Vec<&WindowSample> = sup[0].iter().filter(|w| w.rul.unwrap() >= 0.7).collect();
        assert!(early.iter().all(|w| w.source.end_time <= 30.0 + 1e-9));
    }

    #[test]
    fn full_fraction_is_standard_evaluation() {
        let sup = vec![recording("s", 60, 0.5)];
        let test = vec![recording("t", 40, 0.3)];
        let (a, _) = early_lifetime_protocol(&Feature, &sup, &test, 1.0, 1e-8, 0.0).unwrap();
        let est = fit_on_windows(&Feature, &sup[0].iter().collect::<Vec<_>>(), 1e-8).unwrap();
        let (b, _) = evaluate(&est, &Feature, &test, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn curve_csv_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        curve(&[1.0, 0.0], &[0.9, 0.1]).write_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("time_s,rul_true,rul_pred,rul_pred_smoothed\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
