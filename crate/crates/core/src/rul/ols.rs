use serde::{Deserialize, Serialize};

use crate::nn::Matrix;
use crate::{Error, Result};

pub const DEFAULT_RIDGE: f64 = 1e-8;

/// `rul ~ coefficients . y + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulEstimator {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub ridge: f64,
}

impl RulEstimator {
    pub fn predict(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                context: "rul estimator input",
                expected: self.coefficients.len(),
                actual: y.len(),
            });
        }
        Ok(self.intercept + y.iter().zip(&self.coefficients).map(|(a, b)| a * b).sum::<f64>())
    }

    /// One prediction per row.
    pub fn predict_rows(&self, ys: &Matrix) -> Result<Vec<f64>> {
        (0..ys.rows()).map(|r| self.predict(ys.row(r))).collect()
    }
}

/// Ridge regression with an unpenalised intercept.
///
/// Solves `(Xc' Xc + ridge I) b = Xc' yc` on mean-centred data by Cholesky;
/// the intercept restores the means. With `ridge = 0` this is ordinary least
/// squares and a singular design is reported rather than regularised away.
pub fn ols_fit(observables: &Matrix, targets: &[f64], ridge: f64) -> Result<RulEstimator> {
    let (n, d) = (observables.rows(), observables.cols());
    if targets.len() != n {
        return Err(Error::DimensionMismatch {
            context: "regression targets",
            expected: n,
            actual: targets.len(),
        });
    }
    if n < d + 1 {
        return Err(Error::InvalidArgument(format!(
            "linear fit over {d} observables needs at least {} samples, got {n}",
            d + 1
        )));
    }
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(Error::InvalidArgument(format!("ridge must be finite and >= 0, got {ridge}")));
    }
    if targets.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::InvalidArgument("RUL targets must lie in [0, 1]".into()));
    }
    if !observables.is_finite() {
        return Err(Error::NonFinite("observables"));
    }

    let mut x_mean = vec![0.0; d];
    for r in 0..n {
        x_mean.iter_mut().zip(observables.row(r)).for_each(|(m, v)| *m += v / n as f64);
    }
    let y_mean = targets.iter().sum::<f64>() / n as f64;

    let mut gram = Matrix::zeros(d, d);
    let mut rhs = vec![0.0; d];
    let mut xc = vec![0.0; d];
    for (r, t) in targets.iter().enumerate() {
        xc.iter_mut()
            .zip(observables.row(r))
            .zip(&x_mean)
            .for_each(|((c, v), m)| *c = v - m);
        let yc = t - y_mean;
        for i in 0..d {
            rhs[i] += xc[i] * yc;
            for j in 0..=i {
                gram[(i, j)] += xc[i] * xc[j];
            }
        }
    }
    let scale = (0..d).map(|i| gram[(i, i)]).fold(0.0, f64::max);
    for i in 0..d {
        gram[(i, i)] += ridge;
    }

    let chol = cholesky(&gram, scale * 1e-12).ok_or(Error::RankDeficient)?;
    let coefficients = cholesky_solve(&chol, &rhs);
    let intercept = y_mean - coefficients.iter().zip(&x_mean).map(|(a, b)| a * b).sum::<f64>();
    if !intercept.is_finite() || coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("regression coefficients"));
    }
    Ok(RulEstimator {
        coefficients,
        intercept,
        ridge,
    })
}

/// Lower factor of a symmetric matrix given by its lower triangle; `None`
/// when a pivot falls to `tol` or below.
fn cholesky(a: &Matrix, tol: f64) -> Option<Matrix> {
    let d = a.rows();
    let mut l = Matrix::zeros(d, d);
    for j in 0..d {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > tol) {
            return None;
        }
        let pivot = diag.sqrt();
        l[(j, j)] = pivot;
        for i in j + 1..d {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / pivot;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let d = b.len();
    let mut z = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            z[i] -= l[(i, k)] * z[k];
        }
        z[i] /= l[(i, i)];
    }
    for i in (0..d).rev() {
        for k in i + 1..d {
            z[i] -= l[(k, i)] * z[k];
        }
        z[i] /= l[(i, i)];
    }
    z
}
