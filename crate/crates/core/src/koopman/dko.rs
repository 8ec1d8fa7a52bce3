use super::batch::{add_rows, rows, squared_error, stack, validate_sequences};
use super::{Architecture, LossTerms, Objective, Observer};
use crate::data::WindowSample;
use crate::nn::{Gradients, Matrix, Mlp};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Deep Koopman operator: `y = phi(x)`, `y_{t+1} ~ K y_t`, `x ~ psi(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DkoModel {
    pub encoder: Mlp,
    pub decoder: Mlp,
    pub koopman: Matrix,
    /// Training horizon `m`.
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DkoGradients {
    pub encoder: Gradients,
    pub decoder: Gradients,
    pub koopman: Matrix,
}

impl DkoModel {
    /// Fresh networks seeded from `seed`; `K` starts at the identity.
    pub fn new(arch: &Architecture, state_dim: usize, horizon: usize, seed: u64) -> Result<Self> {
        let d = arch.observable_dim;
        let mut enc_sizes = vec![state_dim];
        enc_sizes.extend(&arch.hidden);
        enc_sizes.push(d);
        let mut dec_sizes = vec![d];
        dec_sizes.extend(&arch.hidden);
        dec_sizes.push(state_dim);
        let encoder = Mlp::new(&enc_sizes, &mut rng_from_seed(derive_seed(seed, "encoder", 0)))?;
        let decoder = Mlp::new(&dec_sizes, &mut rng_from_seed(derive_seed(seed, "decoder", 0)))?;
        Self::from_parts(encoder, decoder, Matrix::identity(d), horizon)
    }

    pub fn from_parts(encoder: Mlp, decoder: Mlp, koopman: Matrix, horizon: usize) -> Result<Self> {
        let d = encoder.output_dim();
        if !koopman.is_square() || koopman.rows() != d {
            return Err(Error::ShapeMismatch(format!(
                "koopman matrix {}x{} for {d} observables",
                koopman.rows(),
                koopman.cols()
            )));
        }
        if decoder.input_dim() != d || decoder.output_dim() != encoder.input_dim() {
            return Err(Error::ShapeMismatch("decoder does not invert encoder dimensions".into()));
        }
        Ok(Self {
            encoder,
            decoder,
            koopman,
            horizon,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.encoder.input_dim()
    }

    /// Loss terms of one sequence of `m + 1` consecutive windows.
    pub fn losses(&self, sequence: &[&WindowSample]) -> Result<LossTerms> {
        Ok(self.batch_loss(&[sequence.to_vec()], Objective::Full, false)?.0)
    }

    /// Mean loss over a batch of sequences and, optionally, its gradient.
    ///
    /// `rec` averages over every window of every sequence; `lin` and `pred`
    /// average over the `m` rollout steps `K^j phi(x_t)`.
    pub fn batch_loss(
        &self,
        seqs: &[Vec<&WindowSample>],
        objective: Objective,
        want_grad: bool,
    ) -> Result<(LossTerms, Option<DkoGradients>)> {
        let m = validate_sequences(seqs)?;
        let b = seqs.len();
        let d = self.koopman.rows();
        let x_all = stack(seqs, 0..m + 1, true, false)?;
        let (y_all, enc_tape) = self.encoder.forward_batch(&x_all)?;
        let (x_rec, rec_tape) = self.decoder.forward_batch(&y_all)?;
        let (rec, g_rec) = squared_error(&x_rec, &x_all, 1.0 / ((m + 1) * b) as f64);

        let mut g_y = Matrix::zeros(y_all.rows(), d);
        let mut grads = None;
        if want_grad {
            let (dec, g_in) = self.decoder.backward(&rec_tape, &g_rec)?;
            g_y.add_assign(&g_in)?;
            grads = Some(DkoGradients {
                encoder: Gradients::zeros_like(&self.encoder),
                decoder: dec,
                koopman: Matrix::zeros(d, d),
            });
        }

        let (mut lin, mut pred) = (0.0, 0.0);
        if objective == Objective::Full && m > 0 {
            let scale = 1.0 / (m * b) as f64;
            // z_j = K z_{j-1}, one row per sequence
            let mut zs = vec![rows(&y_all, 0, b)];
            for j in 1..=m {
                let mut z = Matrix::zeros(b, d);
                crate::nn::gemm_into(&zs[j - 1], false, &self.koopman, true, &mut z);
                zs.push(z);
            }
            let mut z_stack = Matrix::zeros(m * b, d);
            for j in 1..=m {
                add_rows(&mut z_stack, (j - 1) * b, &zs[j], 1.0);
            }
            let y_future = rows(&y_all, b, m * b);
            let (l, g_lin) = squared_error(&z_stack, &y_future, scale);
            lin = l;
            let (x_pred, pred_tape) = self.decoder.forward_batch(&z_stack)?;
            let x_future = rows(&x_all, b, m * b);
            let (p, g_pred) = squared_error(&x_pred, &x_future, scale);
            pred = p;

            if let Some(g) = grads.as_mut() {
                let (dec, mut g_z) = self.decoder.backward(&pred_tape, &g_pred)?;
                g.decoder.add_assign(&dec)?;
                g_z.add_assign(&g_lin)?;
                add_rows(&mut g_y, b, &g_lin, -1.0);
                let mut carry = Matrix::zeros(b, d);
                for j in (1..=m).rev() {
                    let mut g_j = rows(&g_z, (j - 1) * b, b);
                    g_j.add_assign(&carry)?;
                    let mut dk = Matrix::zeros(d, d);
                    crate::nn::gemm_into(&g_j, true, &zs[j - 1], false, &mut dk);
                    g.koopman.add_assign(&dk)?;
                    carry = Matrix::zeros(b, d);
                    crate::nn::gemm_into(&g_j, false, &self.koopman, false, &mut carry);
                }
                add_rows(&mut g_y, 0, &carry, 1.0);
            }
        }

        if let Some(g) = grads.as_mut() {
            let (enc, _) = self.encoder.backward(&enc_tape, &g_y)?;
            g.encoder = enc;
        }
        let terms = match objective {
            Objective::Full => LossTerms::new(rec, lin, pred),
            Objective::ReconstructionOnly => LossTerms::new(rec, 0.0, 0.0),
        };
        Ok((terms, grads))
    }

    pub fn parameters_mut(&mut self) -> Vec<&mut [f64]> {
        let mut p = self.encoder.parameters_mut();
        p.extend(self.decoder.parameters_mut());
        p.push(self.koopman.as_mut_slice());
        p
    }
}

impl DkoGradients {
    pub fn slices(&self) -> Vec<&[f64]> {
        let mut s = self.encoder.slices();
        s.extend(self.decoder.slices());
        s.push(self.koopman.as_slice());
        s
    }
}

impl Observer for DkoModel {
    fn observable_dim(&self) -> usize {
        self.koopman.rows()
    }

    fn encode_windows(&self, windows: &[&WindowSample]) -> Result<Matrix> {
        let seqs: Vec<Vec<&WindowSample>> = windows.iter().map(|w| vec![*w]).collect();
        self.encoder.predict_batch(&stack(&seqs, 0..1, true, false)?)
    }

    fn encode(&self, x: &[f64], _u: &[f64]) -> Result<Vec<f64>> {
        self.encoder.predict(x)
    }
}
