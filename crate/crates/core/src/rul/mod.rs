//! Linear RUL heads on frozen observables, metrics and smoothing.

mod evaluate;
mod ols;
mod smooth;

pub use evaluate::{early_lifetime_protocol, evaluate, fit_on_windows, score, Curve, MetricReport, MAPE_FLOOR};
pub use ols::{ols_fit, RulEstimator, DEFAULT_RIDGE};
pub use smooth::gaussian_smooth;
