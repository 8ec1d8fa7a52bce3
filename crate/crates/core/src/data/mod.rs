//! Recordings, windows, labels and splits.

mod normalize;
mod recording;
mod split;
mod window;

pub use normalize::Standardizer;
pub use recording::{read_recording_csv, Channel, Recording};
pub use split::{split, Split, SplitSpec};
pub use window::{check_consecutive, sequence_starts, windowize, ChannelSpec, WindowSample, WindowSource};

use crate::{Error, Result};

/// Normalised remaining life `(t_eol - t) / t_eol` for every timestamp.
pub fn label_rul(time: &[f64], eol_time: f64) -> Result<Vec<f64>> {
    if !(eol_time.is_finite() && eol_time > 0.0) {
        return Err(Error::NoEndOfLife(format!("eol_time = {eol_time}")));
    }
    Ok(time
        .iter()
        .map(|&t| ((eol_time - t) / eol_time).clamp(0.0, 1.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_endpoints_and_midpoint() {
        let r = label_rul(&[0.0, 50.0, 100.0], 100.0).unwrap();
        assert_eq!(r, vec![1.0, 0.5, 0.0]);
    }

    #[test]
    fn missing_eol_is_an_error() {
        assert!(matches!(label_rul(&[0.0], f64::NAN), Err(Error::NoEndOfLife(_))));
        assert!(label_rul(&[0.0], 0.0).is_err());
    }
}
