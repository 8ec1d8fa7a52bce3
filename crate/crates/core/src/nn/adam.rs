use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    /// Coupled (L2) decay: `wd * param` is added to the raw gradient.
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            weight_decay: 1e-7,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam optimiser state over a fixed list of parameter groups.
///
/// Moment buffers are allocated on the first step from the group lengths;
/// later steps must present the same shapes.
#[derive(Clone, Debug)]
pub struct Adam {
    pub config: AdamConfig,
    step_count: u64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(config: AdamConfig) -> Self {
        Self {
            config,
            step_count: 0,
            first_moment: Vec::new(),
            second_moment: Vec::new(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    fn check(&self, params: &[&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        if !(self.config.learning_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.config.learning_rate
            )));
        }
        if params.len() != grads.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} parameter groups but {} gradient groups",
                params.len(),
                grads.len()
            )));
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.len() != g.len() {
                return Err(Error::ShapeMismatch(format!(
                    "group {i}: {} parameters, {} gradients",
                    p.len(),
                    g.len()
                )));
            }
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("gradient"));
            }
        }
        if self.step_count > 0 {
            let same = self.first_moment.len() == params.len()
                && self.first_moment.iter().zip(params).all(|(m, p)| m.len() == p.len());
            if !same {
                return Err(Error::ShapeMismatch("parameter shapes changed between steps".into()));
            }
        }
        Ok(())
    }

    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]]) -> Result<()> {
        self.check(params, grads)?;
        if self.step_count == 0 {
            self.first_moment = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.second_moment = self.first_moment.clone();
        }
        self.step_count += 1;
        let AdamConfig {
            learning_rate,
            weight_decay,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        let t = self.step_count as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for (gi, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let m = &mut self.first_moment[gi];
            let v = &mut self.second_moment[gi];
            for k in 0..p.len() {
                let grad = g[k] + weight_decay * p[k];
                m[k] = beta1 * m[k] + (1.0 - beta1) * grad;
                v[k] = beta2 * v[k] + (1.0 - beta2) * grad * grad;
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                p[k] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(wd: f64) -> AdamConfig {
        AdamConfig {
            weight_decay: wd,
            ..AdamConfig::default()
        }
    }

    #[test]
    fn zero_gradient_without_decay_leaves_params() {
        let mut adam = Adam::new(cfg(0.0));
        let mut p = vec![1.0, -2.0];
        adam.step(&mut [p.as_mut_slice()], &[&[0.0, 0.0]]).unwrap();
        assert_eq!(p, vec![1.0, -2.0]);
        assert_eq!(adam.step_count(), 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate_times_sign() {
        // m_hat = g, v_hat = g^2 => step = lr * g / (|g| + eps)
        let mut adam = Adam::new(cfg(0.0));
        let mut p = vec![0.5, 0.5];
        let g = [3.0, -0.02];
        adam.step(&mut [p.as_mut_slice()], &[&g]).unwrap();
        let lr = 1e-4;
        assert_abs_diff_eq!(p[0], 0.5 - lr * 3.0 / (3.0 + 1e-8), epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.5 + lr * 0.02 / (0.02 + 1e-8), epsilon = 1e-15);
        assert_abs_diff_eq!(p[0], 0.5 - lr, epsilon = 1e-11);
    }

    #[test]
    fn weight_decay_pulls_toward_zero() {
        let mut adam = Adam::new(cfg(1e-7));
        let mut p = vec![1.0];
        adam.step(&mut [p.as_mut_slice()], &[&[0.0]]).unwrap();
        // g = 1e-7 => update = lr * g / (g + eps) = 1e-4 * 1e-7 / 1.1e-7
        assert!(p[0] < 1.0);
        assert_abs_diff_eq!(p[0], 1.0 - 1e-4 * 1e-7 / (1e-7 + 1e-8), epsilon = 1e-14);
    }

    #[test]
    fn rejects_shape_mismatch_and_nan() {
        let mut adam = Adam::new(cfg(0.0));
        let mut p = vec![1.0, 2.0];
        assert!(adam.step(&mut [p.as_mut_slice()], &[&[0.0]]).is_err());
        assert!(adam.step(&mut [p.as_mut_slice()], &[&[0.0, f64::NAN]]).is_err());
        assert_eq!(adam.step_count(), 0);
        adam.step(&mut [p.as_mut_slice()], &[&[0.1, 0.1]]).unwrap();
        let mut q = vec![1.0];
        assert!(adam.step(&mut [q.as_mut_slice()], &[&[0.1]]).is_err());
    }

    #[test]
    fn nonpositive_learning_rate_rejected() {
        let mut adam = Adam::new(AdamConfig {
            learning_rate: 0.0,
            ..AdamConfig::default()
        });
        let mut p = vec![1.0];
        assert!(adam.step(&mut [p.as_mut_slice()], &[&[0.1]]).is_err());
    }
}
