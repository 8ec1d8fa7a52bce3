use serde::{Deserialize, Serialize};

use super::Recording;
use crate::{Error, Result};

/// Which recording channels form the state `x` and control `u` vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub state: Vec<String>,
    pub control: Vec<String>,
}

impl ChannelSpec {
    /// Voltage, temperature and current all in the state (uncontrolled models).
    pub fn battery_uncontrolled() -> Self {
        Self {
            state: vec!["voltage_v".into(), "temperature_k".into(), "current_a".into()],
            control: vec![],
        }
    }

    /// Voltage and temperature as state, current as control.
    pub fn battery_controlled() -> Self {
        Self {
            state: vec!["voltage_v".into(), "temperature_k".into()],
            control: vec!["current_a".into()],
        }
    }

    pub fn all_channels(&self) -> Vec<String> {
        self.state.iter().chain(&self.control).cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSource {
    pub recording: String,
    /// Index of the first timestep.
    pub start: usize,
    pub len: usize,
    /// Timestamp of the last timestep.
    pub end_time: f64,
}

/// A fixed-length slice of one recording.
///
/// `x` (and `u`) are channel-major: all samples of the first channel, then
/// the next, and so on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSample {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// Label at the window's last timestep, when the recording is labelled.
    pub rul: Option<f64>,
    pub source: WindowSource,
}

fn gather(rec: &Recording, names: &[String], start: usize, len: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(names.len() * len);
    for name in names {
        let values = rec
            .channel(name)
            .ok_or_else(|| Error::Config(format!("recording {} lacks channel {name}", rec.id)))?;
        out.extend_from_slice(&values[start..start + len]);
    }
    Ok(out)
}

/// Windows starting at `0, stride, 2*stride, ...` that fit entirely.
pub fn windowize(rec: &Recording, spec: &ChannelSpec, window_size: usize, stride: usize) -> Result<Vec<WindowSample>> {
    if window_size == 0 || stride == 0 {
        return Err(Error::InvalidArgument("window size and stride must be >= 1".into()));
    }
    let n = rec.len();
    if n < window_size {
        return Err(Error::TrajectoryTooShort { len: n, window: window_size });
    }
    let count = (n - window_size) / stride + 1;
    (0..count)
        .map(|k| {
            let start = k * stride;
            let last = start + window_size - 1;
            Ok(WindowSample {
                x: gather(rec, &spec.state, start, window_size)?,
                u: gather(rec, &spec.control, start, window_size)?,
                rul: rec.rul.as_ref().map(|r| r[last]),
                source: WindowSource {
                    recording: rec.id.clone(),
                    start,
                    len: window_size,
                    end_time: rec.time[last],
                },
            })
        })
        .collect()
}

/// Errors unless every window follows its predecessor back to back within
/// one recording.
pub fn check_consecutive(sequence: &[&WindowSample]) -> Result<()> {
    for (k, pair) in sequence.windows(2).enumerate() {
        let (a, b) = (&pair[0].source, &pair[1].source);
        if a.recording != b.recording || b.start != a.start + a.len {
            return Err(Error::NonConsecutive(k + 1));
        }
    }
    Ok(())
}

/// Indices `i` such that `windows[i], windows[i + step], ..., windows[i + horizon*step]`
/// are back-to-back windows, where `step = window_size / stride`.
pub fn sequence_starts(windows: &[WindowSample], horizon: usize) -> Result<(Vec<usize>, usize)> {
    let Some(first) = windows.first() else {
        return Ok((Vec::new(), 1));
    };
    let len = first.source.len;
    let stride = windows.get(1).map_or(len, |w| w.source.start - first.source.start);
    if stride == 0 || len % stride != 0 {
        return Err(Error::InvalidArgument(format!(
            "window length {len} is not a multiple of stride {stride}"
        )));
    }
    let step = len / stride;
    let span = horizon * step;
    let starts = (0..windows.len().saturating_sub(span)).collect();
    Ok((starts, step))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Channel;

    fn ramp(n: usize) -> Recording {
        let time: Vec<f64> = (0..n).map(|i| 2.0 * i as f64).collect();
        let eol = 2.0 * n as f64;
        Recording {
            id: "ramp".into(),
            channels: vec![
                Channel {
                    name: "a".into(),
                    values: (0..n).map(|i| i as f64).collect(),
                },
                Channel {
                    name: "b".into(),
                    values: (0..n).map(|i| -(i as f64)).collect(),
                },
            ],
            rul: Some(time.iter().map(|t| (eol - t) / eol).collect()),
            time,
        }
    }

    fn spec() -> ChannelSpec {
        ChannelSpec {
            state: vec!["a".into()],
            control: vec!["b".into()],
        }
    }

    #[test]
    fn exact_tiling_count() {
        let w = windowize(&ramp(1000), &spec(), 100, 100).unwrap();
        assert_eq!(w.len(), 10);
        assert_eq!(w[3].source.start, 300);
        assert_eq!(w[3].x[0], 300.0);
        assert_eq!(w[3].u[99], -399.0);
        assert_eq!(windowize(&ramp(1050), &spec(), 100, 30).unwrap().len(), (1050 - 100) / 30 + 1);
    }

    #[test]
    fn too_short_is_an_error() {
        assert!(matches!(
            windowize(&ramp(99), &spec(), 100, 100),
            Err(Error::TrajectoryTooShort { len: 99, window: 100 })
        ));
    }

    #[test]
    fn last_window_label_is_near_zero_and_labels_decrease() {
        let rec = ramp(1000);
        let w = windowize(&rec, &spec(), 100, 100).unwrap();
        let last = w.last().unwrap().rul.unwrap();
        assert!(last <= 100.0 / 1000.0);
        assert!(w.windows(2).all(|p| p[1].rul <= p[0].rul));
    }

    #[test]
    fn state_is_channel_major() {
        let s = ChannelSpec {
            state: vec!["a".into(), "b".into()],
            control: vec![],
        };
        let w = windowize(&ramp(10), &s, 3, 3).unwrap();
        assert_eq!(w[1].x, vec![3.0, 4.0, 5.0, -3.0, -4.0, -5.0]);
        assert!(w[1].u.is_empty());
    }

    #[test]
    fn consecutive_check() {
        let w = windowize(&ramp(1000), &spec(), 100, 100).unwrap();
        assert!(check_consecutive(&[&w[0], &w[1], &w[2]]).is_ok());
        assert!(matches!(check_consecutive(&[&w[0], &w[2]]), Err(Error::NonConsecutive(1))));
        let mut other = w[1].clone();
        other.source.recording = "x".into();
        assert!(check_consecutive(&[&w[0], &other]).is_err());
    }

    #[test]
    fn sequence_starts_respect_horizon_and_overlap() {
        let w = windowize(&ramp(1000), &spec(), 100, 100).unwrap();
        let (starts, step) = sequence_starts(&w, 3).unwrap();
        assert_eq!(step, 1);
        assert_eq!(starts, (0..7).collect::<Vec<_>>());
        let w = windowize(&ramp(1000), &spec(), 100, 50).unwrap();
        let (starts, step) = sequence_starts(&w, 2).unwrap();
        assert_eq!(step, 2);
        let s = *starts.last().unwrap();
        assert!(check_consecutive(&[&w[s], &w[s + 2], &w[s + 4]]).is_ok());
    }
}
