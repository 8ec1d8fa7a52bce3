//! Eigenvalues of learned operators.

mod eigen;
mod sweep;

pub use eigen::{eigenvalues, hessenberg, spectral_radius, Spectrum, MAX_DIM};
pub use sweep::{spectrum_sweep, write_spectra_csv, ControlSample, IntervalSummary, Sweep};
