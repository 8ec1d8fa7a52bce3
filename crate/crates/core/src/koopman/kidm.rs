use super::batch::{add_rows, hcat, left_cols, rows, squared_error, stack, validate_sequences};
use super::{Architecture, LossTerms, Objective, Observer};
use crate::data::WindowSample;
use crate::nn::{Gradients, Matrix, Mlp};
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Scale applied to the operator network's initial output weights, so that
/// freshly initialised operators start close to the identity.
const OPERATOR_INIT_SCALE: f64 = 0.05;

/// Control-conditioned degradation model.
///
/// `y_t = phi(x_t, u_t)`, `K_t = reshape(g(u_t))`, `x_t ~ psi(y_t, u_t)`;
/// observables advance as `y_{t+j} ~ K_{t+j} ... K_{t+1} y_t`.
#[derive(Clone, Debug, PartialEq)]
pub struct KidmModel {
    pub encoder: Mlp,
    pub operator_net: Mlp,
    pub decoder: Mlp,
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KidmGradients {
    pub encoder: Gradients,
    pub operator_net: Gradients,
    pub decoder: Gradients,
}

impl KidmGradients {
    pub fn slices(&self) -> Vec<&[f64]> {
        let mut s = self.encoder.slices();
        s.extend(self.operator_net.slices());
        s.extend(self.decoder.slices());
        s
    }
}

impl KidmModel {
    pub fn new(arch: &Architecture, state_dim: usize, control_dim: usize, horizon: usize, seed: u64) -> Result<Self> {
        if control_dim == 0 {
            return Err(Error::InvalidArgument("KIDM needs a non-empty control vector".into()));
        }
        let d = arch.observable_dim;
        let sizes = |input: usize, output: usize| {
            let mut s = vec![input];
            s.extend(&arch.hidden);
            s.push(output);
            s
        };
        let encoder = Mlp::new(
            &sizes(state_dim + control_dim, d),
            &mut rng_from_seed(derive_seed(seed, "encoder", 0)),
        )?;
        let mut operator_net = Mlp::new(
            &sizes(control_dim, d * d),
            &mut rng_from_seed(derive_seed(seed, "operator", 0)),
        )?;
        {
            let last = operator_net.layers_mut().last_mut().expect("non-empty");
            last.weight.scale(OPERATOR_INIT_SCALE);
            let eye = Matrix::identity(d);
            last.bias.copy_from_slice(eye.as_slice());
        }
        let decoder = Mlp::new(
            &sizes(d + control_dim, state_dim),
            &mut rng_from_seed(derive_seed(seed, "decoder", 0)),
        )?;
        Self::from_parts(encoder, operator_net, decoder, horizon)
    }

    pub fn from_parts(encoder: Mlp, operator_net: Mlp, decoder: Mlp, horizon: usize) -> Result<Self> {
        let d = encoder.output_dim();
        let nu = operator_net.input_dim();
        let nx = decoder.output_dim();
        if operator_net.output_dim() != d * d {
            return Err(Error::ShapeMismatch(format!(
                "operator net emits {} values for {d} observables",
                operator_net.output_dim()
            )));
        }
        if encoder.input_dim() != nx + nu || decoder.input_dim() != d + nu {
            return Err(Error::ShapeMismatch("encoder/decoder widths disagree with state and control".into()));
        }
        Ok(Self {
            encoder,
            operator_net,
            decoder,
            horizon,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.decoder.output_dim()
    }

    pub fn control_dim(&self) -> usize {
        self.operator_net.input_dim()
    }

    /// Degradation operator for one control window (row-major reshape).
    pub fn operator(&self, u: &[f64]) -> Result<Matrix> {
        let d = self.encoder.output_dim();
        Matrix::from_vec(d, d, self.operator_net.predict(u)?)
    }

    /// Observables `R_0 = y0`, `R_j = K(u_j) R_{j-1}` for the given controls.
    pub fn rollout(&self, y0: &[f64], controls: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
        let mut out = vec![y0.to_vec()];
        for u in controls {
            let k = self.operator(u)?;
            let next = k.matvec(out.last().expect("non-empty"))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn losses(&self, sequence: &[&WindowSample]) -> Result<LossTerms> {
        Ok(self.batch_loss(&[sequence.to_vec()], Objective::Full, false)?.0)
    }

    /// Batch loss. `rec` uses the first window of each sequence; `lin` and
    /// `pred` average over the `m` operator rollout steps.
    pub fn batch_loss(
        &self,
        seqs: &[Vec<&WindowSample>],
        objective: Objective,
        want_grad: bool,
    ) -> Result<(LossTerms, Option<KidmGradients>)> {
        let full = objective == Objective::Full;
        let m = validate_sequences(seqs)?;
        let b = seqs.len();
        let d = self.encoder.output_dim();
        let encoded_steps = if full { m + 1 } else { 1 };

        let xu = stack(seqs, 0..encoded_steps, true, true)?;
        let (y_all, enc_tape) = self.encoder.forward_batch(&xu)?;
        let x0 = stack(seqs, 0..1, true, false)?;
        let u0 = stack(seqs, 0..1, false, true)?;
        let y0 = rows(&y_all, 0, b);
        let (x_rec, rec_tape) = self.decoder.forward_batch(&hcat(&y0, &u0))?;
        let (rec, g_rec) = squared_error(&x_rec, &x0, 1.0 / b as f64);

        let mut g_y = Matrix::zeros(y_all.rows(), d);
        let mut grads = None;
        if want_grad {
            let (dec, g_in) = self.decoder.backward(&rec_tape, &g_rec)?;
            add_rows(&mut g_y, 0, &left_cols(&g_in, d), 1.0);
            grads = Some(KidmGradients {
                encoder: Gradients::zeros_like(&self.encoder),
                operator_net: Gradients::zeros_like(&self.operator_net),
                decoder: dec,
            });
        }

        let (mut lin, mut pred) = (0.0, 0.0);
        if full && m > 0 {
            let scale = 1.0 / (m * b) as f64;
            let u_f = stack(seqs, 1..m + 1, false, true)?;
            let (ops, op_tape) = self.operator_net.forward_batch(&u_f)?;
            // zs[j] row bi = K_{j, bi} zs[j-1] row bi
            let mut zs = vec![y0.clone()];
            for j in 1..=m {
                let mut z = Matrix::zeros(b, d);
                for bi in 0..b {
                    let k = ops.row((j - 1) * b + bi);
                    let prev = zs[j - 1].row(bi);
                    for (r, out) in z.row_mut(bi).iter_mut().enumerate() {
                        *out = k[r * d..(r + 1) * d].iter().zip(prev).map(|(a, c)| a * c).sum();
                    }
                }
                zs.push(z);
            }
            let mut z_stack = Matrix::zeros(m * b, d);
            for j in 1..=m {
                add_rows(&mut z_stack, (j - 1) * b, &zs[j], 1.0);
            }
            let y_future = rows(&y_all, b, m * b);
            let (l, g_lin) = squared_error(&z_stack, &y_future, scale);
            lin = l;
            let (x_pred, pred_tape) = self.decoder.forward_batch(&hcat(&z_stack, &u_f))?;
            let x_future = stack(seqs, 1..m + 1, true, false)?;
            let (p, g_pred) = squared_error(&x_pred, &x_future, scale);
            pred = p;

            if let Some(g) = grads.as_mut() {
                let (dec, g_in) = self.decoder.backward(&pred_tape, &g_pred)?;
                g.decoder.add_assign(&dec)?;
                let mut g_z = left_cols(&g_in, d);
                g_z.add_assign(&g_lin)?;
                add_rows(&mut g_y, b, &g_lin, -1.0);
                let mut g_ops = Matrix::zeros(m * b, d * d);
                let mut carry = Matrix::zeros(b, d);
                for j in (1..=m).rev() {
                    let mut next_carry = Matrix::zeros(b, d);
                    for bi in 0..b {
                        let row = (j - 1) * b + bi;
                        let g_j: Vec<f64> = g_z.row(row).iter().zip(carry.row(bi)).map(|(a, c)| a + c).collect();
                        let prev = zs[j - 1].row(bi);
                        let k = ops.row(row);
                        let dk = g_ops.row_mut(row);
                        for r in 0..d {
                            for c in 0..d {
                                dk[r * d + c] = g_j[r] * prev[c];
                            }
                        }
                        let nc = next_carry.row_mut(bi);
                        for r in 0..d {
                            for c in 0..d {
                                nc[c] += k[r * d + c] * g_j[r];
                            }
                        }
                    }
                    carry = next_carry;
                }
                add_rows(&mut g_y, 0, &carry, 1.0);
                let (op_grads, _) = self.operator_net.backward(&op_tape, &g_ops)?;
                g.operator_net = op_grads;
            }
        }

        if let Some(g) = grads.as_mut() {
            let (enc, _) = self.encoder.backward(&enc_tape, &g_y)?;
            g.encoder = enc;
        }
        let terms = if full {
            LossTerms::new(rec, lin, pred)
        } else {
            LossTerms::new(rec, 0.0, 0.0)
        };
        Ok((terms, grads))
    }

    pub fn parameters_mut(&mut self) -> Vec<&mut [f64]> {
        let mut p = self.encoder.parameters_mut();
        p.extend(self.operator_net.parameters_mut());
        p.extend(self.decoder.parameters_mut());
        p
    }
}

impl Observer for KidmModel {
    fn observable_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    fn encode_windows(&self, windows: &[&WindowSample]) -> Result<Matrix> {
        let seqs: Vec<Vec<&WindowSample>> = windows.iter().map(|w| vec![*w]).collect();
        self.encoder.predict_batch(&stack(&seqs, 0..1, true, true)?)
    }

    fn encode(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let mut xu = x.to_vec();
        xu.extend_from_slice(u);
        self.encoder.predict(&xu)
    }
}
