//! Linear RUL read-out on hand-made observables: least squares on one
//! supervised life, smoothing, and metrics on others.

use koopman_rul::nn::Matrix;
use koopman_rul::rul::{gaussian_smooth, ols_fit, score, Curve, DEFAULT_RIDGE};
use koopman_rul::rng::rng_from_seed;
use rand_distr::{Distribution, Normal};

/// Two noisy observables that drift linearly with age.
fn observables(life: usize, rate: f64, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let mut rows = Vec::new();
    let mut rul = Vec::new();
    for k in 0..life {
        let age = k as f64 / life as f64;
        rows.push([1.0 - rate * age + noise.sample(&mut rng), 0.3 + 0.5 * rate * age + noise.sample(&mut rng)]);
        rul.push(1.0 - (k + 1) as f64 / life as f64);
    }
    (Matrix::from_rows(&rows).unwrap(), rul)
}

fn main() -> koopman_rul::Result<()> {
    let (y, rul) = observables(200, 0.4, 1);
    let estimator = ols_fit(&y, &rul, DEFAULT_RIDGE)?;
    println!("coefficients {:?}, intercept {:.3}", estimator.coefficients, estimator.intercept);

    let mut curves = Vec::new();
    for seed in 2..5 {
        let (y, truth) = observables(150 + 25 * seed as usize, 0.4, seed);
        let raw = estimator.predict_rows(&y)?;
        let time: Vec<f64> = (0..truth.len()).map(|k| 200.0 * k as f64).collect();
        curves.push(Curve::new(format!("cell{seed}"), time, truth, &raw, 5.0)?);
    }
    let report = score(&curves, 5.0)?;
    println!("MSE {:.5}  MAE {:.4}  MAPE {:.3} over {} windows", report.mse, report.mae, report.mape, report.n);

    let step: Vec<f64> = (0..40).map(|k| if k < 20 { 0.0 } else { 1.0 }).collect();
    let smooth = gaussian_smooth(&step, 3.0);
    println!("smoothed step around the edge: {:?}", smooth[16..24].iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>());
    Ok(())
}
