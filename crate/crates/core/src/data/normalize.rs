use serde::{Deserialize, Serialize};

use super::Recording;
use crate::{Error, Result};

/// Per-channel zero-mean / unit-variance transform fitted on training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub channels: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(recordings: &[Recording], channels: &[String]) -> Result<Self> {
        if recordings.is_empty() {
            return Err(Error::EmptyData("standardizer fit"));
        }
        let mut mean = Vec::with_capacity(channels.len());
        let mut std = Vec::with_capacity(channels.len());
        for name in channels {
            let (mut n, mut sum, mut sumsq) = (0usize, 0.0, 0.0);
            for r in recordings {
                let v = r
                    .channel(name)
                    .ok_or_else(|| Error::Config(format!("recording {} lacks channel {name}", r.id)))?;
                n += v.len();
                sum += v.iter().sum::<f64>();
                sumsq += v.iter().map(|x| x * x).sum::<f64>();
            }
            if n == 0 {
                return Err(Error::EmptyData("standardizer channel"));
            }
            let m = sum / n as f64;
            let var = (sumsq / n as f64 - m * m).max(0.0);
            let s = var.sqrt();
            mean.push(m);
            std.push(if s > 1e-12 { s } else { 1.0 });
        }
        Ok(Self {
            channels: channels.to_vec(),
            mean,
            std,
        })
    }

    pub fn apply(&self, recording: &Recording) -> Result<Recording> {
        let mut out = recording.clone();
        for (i, name) in self.channels.iter().enumerate() {
            let values = out
                .channel_mut(name)
                .ok_or_else(|| Error::Config(format!("recording {} lacks channel {name}", recording.id)))?;
            let (m, s) = (self.mean[i], self.std[i]);
            values.iter_mut().for_each(|v| *v = (*v - m) / s);
        }
        Ok(out)
    }

    /// Standardises a raw value of one channel.
    pub fn transform_value(&self, channel: &str, value: f64) -> Option<f64> {
        let i = self.channels.iter().position(|c| c == channel)?;
        Some((value - self.mean[i]) / self.std[i])
    }
}
