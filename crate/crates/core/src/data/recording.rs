use std::path::Path;

use crate::battery::Trajectory;
use crate::{Error, Result};

use super::label_rul;

#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub name: String,
    pub values: Vec<f64>,
}

/// A uniformly sampled multichannel time series, optionally labelled.
#[derive(Clone, Debug, PartialEq)]
pub struct Recording {
    pub id: String,
    pub time: Vec<f64>,
    pub channels: Vec<Channel>,
    pub rul: Option<Vec<f64>>,
}

impl Recording {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn channel_mut(&mut self, name: &str) -> Option<&mut Vec<f64>> {
        self.channels
            .iter_mut()
            .find(|c| c.name == name)
            .map(|c| &mut c.values)
    }

    /// Measured channels of a simulated trajectory, labelled from its EoL.
    pub fn from_trajectory(id: impl Into<String>, t: &Trajectory) -> Result<Self> {
        let ch = |name: &str, v: &[f64]| Channel {
            name: name.to_string(),
            values: v.to_vec(),
        };
        Ok(Self {
            id: id.into(),
            time: t.time.clone(),
            channels: vec![
                ch("voltage_v", &t.voltage),
                ch("temperature_k", &t.temperature),
                ch("current_a", &t.current),
            ],
            rul: Some(label_rul(&t.time, t.eol_time)?),
        })
    }

    /// End-of-life time implied by the labels, if any.
    pub fn eol_time(&self) -> Option<f64> {
        let rul = self.rul.as_ref()?;
        self.time
            .iter()
            .zip(rul)
            .find(|(_, r)| **r < 1.0)
            .map(|(t, r)| t / (1.0 - r))
    }
}

/// Reads a CSV with a `time_s` column and numeric feature columns.
///
/// A `rul_norm` column becomes the label; otherwise labels are derived from
/// `eol_time` when given. Both the battery trajectory schema and arbitrary
/// pre-featurised tables are accepted.
pub fn read_recording_csv(path: &Path, id: impl Into<String>, eol_time: Option<f64>) -> Result<Recording> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let time_col = headers
        .iter()
        .position(|h| h == "time_s")
        .ok_or_else(|| Error::Config(format!("{}: missing time_s column", path.display())))?;
    let rul_col = headers.iter().position(|h| h == "rul_norm");
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::Config(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                line + 2,
                record.len(),
                headers.len()
            )));
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Config(format!("{}: row {}: '{}' is not a number", path.display(), line + 2, field))
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite("csv field"));
            }
            columns[c].push(v);
        }
    }
    let time = std::mem::take(&mut columns[time_col]);
    let rul = match (rul_col, eol_time) {
        (Some(c), _) => Some(std::mem::take(&mut columns[c])),
        (None, Some(eol)) => Some(label_rul(&time, eol)?),
        (None, None) => None,
    };
    let channels = headers
        .into_iter()
        .zip(columns)
        .enumerate()
        .filter(|(i, _)| *i != time_col && Some(*i) != rul_col)
        .map(|(_, (name, values))| Channel { name, values })
        .collect();
    Ok(Recording {
        id: id.into(),
        time,
        channels,
        rul,
    })
}
