use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::koopman::KidmModel;
use crate::{Error, Result};

/// Imaginary parts at or below this count as real eigenvalues.
const REAL_TOL: f64 = 1e-9;

/// One control window fed to the operator network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSample {
    pub interval: String,
    pub sample_id: String,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSummary {
    pub interval: String,
    pub count: usize,
    /// Range of the real eigenvalues over every spectrum of the interval.
    pub real_min: f64,
    pub real_max: f64,
    pub mean_dominant_real: f64,
    pub max_spectral_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    /// `(interval, sample id, spectrum)` in input order.
    pub spectra: Vec<(String, String, Spectrum)>,
    /// In order of first appearance.
    pub intervals: Vec<IntervalSummary>,
}

impl Sweep {
    pub fn interval(&self, label: &str) -> Option<&IntervalSummary> {
        self.intervals.iter().find(|s| s.interval == label)
    }

    /// Whether operators for `low` keep larger dominant real eigenvalues than
    /// those for `high`, i.e. decay more slowly.
    pub fn slower_degradation(&self, low: &str, high: &str) -> Option<bool> {
        Some(self.interval(low)?.mean_dominant_real >= self.interval(high)?.mean_dominant_real)
    }
}

/// Largest real eigenvalue, or the real part of the largest-modulus
/// eigenvalue when the spectrum has no real ones.
fn dominant_real(s: &Spectrum) -> f64 {
    s.eigenvalues
        .iter()
        .filter(|l| l.im.abs() <= REAL_TOL)
        .map(|l| l.re)
        .reduce(f64::max)
        .unwrap_or_else(|| s.eigenvalues.first().map_or(0.0, |l| l.re))
}

/// Spectra of the degradation operators produced for each control sample.
pub fn spectrum_sweep(model: &KidmModel, samples: &[ControlSample]) -> Result<Sweep> {
    if samples.is_empty() {
        return Err(Error::EmptyData("no control samples to sweep"));
    }
    let mut spectra = Vec::with_capacity(samples.len());
    for s in samples {
        let k = model.operator(&s.u)?;
        spectra.push((s.interval.clone(), s.sample_id.clone(), Spectrum::of(&k, format!("{}/{}", s.interval, s.sample_id))?));
    }
    let mut labels: Vec<&str> = Vec::new();
    for (label, _, _) in &spectra {
        if !labels.contains(&label.as_str()) {
            labels.push(label);
        }
    }
    let intervals = labels
        .into_iter()
        .map(|label| {
            let group: Vec<&Spectrum> = spectra.iter().filter(|(l, _, _)| l == label).map(|(_, _, s)| s).collect();
            let reals: Vec<f64> = group
                .iter()
                .flat_map(|s| s.eigenvalues.iter().filter(|l| l.im.abs() <= REAL_TOL).map(|l| l.re))
                .collect();
            IntervalSummary {
                interval: label.to_string(),
                count: group.len(),
                real_min: reals.iter().copied().fold(f64::NAN, f64::min),
                real_max: reals.iter().copied().fold(f64::NAN, f64::max),
                mean_dominant_real: group.iter().map(|s| dominant_real(s)).sum::<f64>() / group.len() as f64,
                max_spectral_radius: group.iter().map(|s| s.radius()).fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(Sweep { spectra, intervals })
}

/// `interval_label,sample_id,re,im`, one row per eigenvalue.
pub fn write_spectra_csv(sweep: &Sweep, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    w.write_record(["interval_label", "sample_id", "re", "im"])?;
    for (label, id, s) in &sweep.spectra {
        for l in &s.eigenvalues {
            w.write_record([label.clone(), id.clone(), l.re.to_string(), l.im.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koopman::Architecture;

    fn sample(interval: &str, id: usize, u: f64) -> ControlSample {
        ControlSample {
            interval: interval.into(),
            sample_id: id.to_string(),
            u: vec![u; 3],
        }
    }

    #[test]
    fn constant_control_gives_identical_spectra() {
        let arch = Architecture {
            hidden: vec![8],
            observable_dim: 4,
        };
        let model = KidmModel::new(&arch, 6, 3, 1, 2).unwrap();
        let samples: Vec<ControlSample> = (0..5).map(|i| sample("a", i, 0.3)).collect();
        let sweep = spectrum_sweep(&model, &samples).unwrap();
        let first = &sweep.spectra[0].2.eigenvalues;
        assert!(sweep.spectra.iter().all(|(_, _, s)| &s.eigenvalues == first));
        for (_, _, s) in &sweep.spectra {
            assert_eq!(s.eigenvalues.len(), 4);
            for l in s.eigenvalues.iter().filter(|l| l.im != 0.0) {
                assert!(s.eigenvalues.iter().any(|m| (*m - l.conj()).norm() < 1e-9));
            }
        }
        assert_eq!(sweep.intervals.len(), 1);
        assert_eq!(sweep.intervals[0].count, 5);
    }

    #[test]
    fn summary_and_csv() {
        let arch = Architecture {
            hidden: vec![8],
            observable_dim: 3,
        };
        let model = KidmModel::new(&arch, 2, 3, 1, 4).unwrap();
        let samples = vec![sample("low", 0, -0.5), sample("high", 0, 1.5), sample("low", 1, -0.4)];
        let sweep = spectrum_sweep(&model, &samples).unwrap();
        assert_eq!(sweep.interval("low").unwrap().count, 2);
        assert!(sweep.slower_degradation("low", "high").is_some());
        assert!(sweep.slower_degradation("low", "missing").is_none());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        write_spectra_csv(&sweep, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("interval_label,sample_id,re,im\n"));
        assert_eq!(text.lines().count(), 1 + 3 * 3);
        assert!(matches!(spectrum_sweep(&model, &[]), Err(Error::EmptyData(_))));
    }
}
