use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::matrix::{gemm, Matrix};
use crate::{Error, Result};

pub const SELU_ALPHA: f64 = 1.673_263_242_354_377_2;
pub const SELU_LAMBDA: f64 = 1.050_700_987_355_480_5;

pub fn selu(x: f64) -> f64 {
    if x > 0.0 {
        SELU_LAMBDA * x
    } else {
        SELU_LAMBDA * SELU_ALPHA * x.exp_m1()
    }
}

pub fn selu_derivative(x: f64) -> f64 {
    if x > 0.0 {
        SELU_LAMBDA
    } else {
        SELU_LAMBDA * SELU_ALPHA * x.exp()
    }
}

static NEXT_PARAM_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_PARAM_ID.fetch_add(1, Ordering::Relaxed)
}

/// One affine layer; `weight` is `out × in`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl Layer {
    fn zeros_like(&self) -> Self {
        Self {
            weight: Matrix::zeros(self.weight.rows(), self.weight.cols()),
            bias: vec![0.0; self.bias.len()],
        }
    }
}

/// Feed-forward network: SELU after every hidden layer, identity output.
#[derive(Clone, Debug)]
pub struct Mlp {
    layers: Vec<Layer>,
    // Changes whenever parameters may have been mutated; tapes record it.
    param_id: u64,
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers
    }
}

/// Intermediates cached by a forward pass.
#[derive(Clone, Debug)]
pub struct Tape {
    param_id: u64,
    inputs: Vec<Matrix>,
    pre_activations: Vec<Matrix>,
}

impl Tape {
    pub fn batch_size(&self) -> usize {
        self.inputs[0].rows()
    }
}

/// Parameter-shaped gradient buffers.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(model: &Mlp) -> Self {
        Self {
            layers: model.layers.iter().map(Layer::zeros_like).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) -> Result<()> {
        if self.layers.len() != other.layers.len() {
            return Err(Error::ShapeMismatch("gradient layer count".into()));
        }
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weight.add_assign(&b.weight)?;
            if a.bias.len() != b.bias.len() {
                return Err(Error::ShapeMismatch("gradient bias length".into()));
            }
            a.bias.iter_mut().zip(&b.bias).for_each(|(x, y)| *x += y);
        }
        Ok(())
    }

    /// Flat views in the same order as [`Mlp::parameters_mut`].
    pub fn slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weight.as_slice(), l.bias.as_slice()])
            .collect()
    }
}

impl Mlp {
    /// LeCun-normal weights (std `1/sqrt(fan_in)`), zero biases.
    ///
    /// `sizes` lists every layer width including input and output.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "mlp sizes must have at least two positive entries, got {sizes:?}"
            )));
        }
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let std = 1.0 / (fan_in as f64).sqrt();
                let data = (0..fan_in * fan_out)
                    .map(|_| std * Distribution::<f64>::sample(&StandardNormal, rng))
                    .collect::<Vec<f64>>();
                Layer {
                    weight: Matrix::from_vec(fan_out, fan_in, data).expect("sized above"),
                    bias: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(Self {
            layers,
            param_id: fresh_id(),
        })
    }

    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("mlp needs at least one layer".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.weight.rows() {
                return Err(Error::DimensionMismatch {
                    context: "layer bias",
                    expected: l.weight.rows(),
                    actual: l.bias.len(),
                });
            }
            if l.bias.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("layer bias"));
            }
            if i > 0 && layers[i - 1].weight.rows() != l.weight.cols() {
                return Err(Error::DimensionMismatch {
                    context: "layer chaining",
                    expected: layers[i - 1].weight.rows(),
                    actual: l.weight.cols(),
                });
            }
        }
        Ok(Self {
            layers,
            param_id: fresh_id(),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").weight.rows()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Mutable access to the layers; invalidates outstanding tapes.
    pub fn layers_mut(&mut self) -> &mut [Layer] {
        self.param_id = fresh_id();
        &mut self.layers
    }

    /// Flat mutable parameter views (weight, bias per layer); invalidates tapes.
    pub fn parameters_mut(&mut self) -> Vec<&mut [f64]> {
        self.param_id = fresh_id();
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weight.as_mut_slice(), l.bias.as_mut_slice()])
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.as_slice().len() + l.bias.len())
            .sum()
    }

    fn check_input(&self, cols: usize) -> Result<()> {
        if cols != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "mlp input",
                expected: self.input_dim(),
                actual: cols,
            });
        }
        Ok(())
    }

    fn affine(layer: &Layer, input: &Matrix) -> Matrix {
        let mut z = Matrix::zeros(input.rows(), layer.weight.rows());
        for r in 0..z.rows() {
            z.row_mut(r).copy_from_slice(&layer.bias);
        }
        gemm(1.0, input, false, &layer.weight, true, 1.0, &mut z);
        z
    }

    fn activate(z: &Matrix) -> Matrix {
        let mut a = z.clone();
        a.as_mut_slice().iter_mut().for_each(|v| *v = selu(*v));
        a
    }

    /// Forward pass over a batch (one sample per row), keeping a tape.
    pub fn forward_batch(&self, input: &Matrix) -> Result<(Matrix, Tape)> {
        self.check_input(input.cols())?;
        let n = self.layers.len();
        let mut inputs = Vec::with_capacity(n);
        let mut pre_activations = Vec::with_capacity(n);
        let mut current = input.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            let z = Self::affine(layer, &current);
            let next = if i + 1 < n { Self::activate(&z) } else { z.clone() };
            inputs.push(current);
            pre_activations.push(z);
            current = next;
        }
        let tape = Tape {
            param_id: self.param_id,
            inputs,
            pre_activations,
        };
        Ok((current, tape))
    }

    /// Forward pass over a batch without recording intermediates.
    pub fn predict_batch(&self, input: &Matrix) -> Result<Matrix> {
        self.check_input(input.cols())?;
        let n = self.layers.len();
        let mut current = input.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            let z = Self::affine(layer, &current);
            current = if i + 1 < n { Self::activate(&z) } else { z };
        }
        Ok(current)
    }

    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, Tape)> {
        let m = Matrix::from_vec(1, input.len(), input.to_vec())?;
        let (out, tape) = self.forward_batch(&m)?;
        Ok((out.into_vec(), tape))
    }

    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        let m = Matrix::from_vec(1, input.len(), input.to_vec())?;
        Ok(self.predict_batch(&m)?.into_vec())
    }

    /// Reverse-mode pass. `output_gradient` holds dL/d(output) per batch row.
    ///
    /// Returns parameter gradients summed over the batch and dL/d(input).
    pub fn backward(&self, tape: &Tape, output_gradient: &Matrix) -> Result<(Gradients, Matrix)> {
        if tape.param_id != self.param_id {
            return Err(Error::StaleTape("parameters changed since the forward pass"));
        }
        if tape.inputs.len() != self.layers.len() {
            return Err(Error::StaleTape("layer count differs"));
        }
        if output_gradient.rows() != tape.batch_size() || output_gradient.cols() != self.output_dim() {
            return Err(Error::ShapeMismatch(format!(
                "output gradient {}x{} for batch {} and output dim {}",
                output_gradient.rows(),
                output_gradient.cols(),
                tape.batch_size(),
                self.output_dim()
            )));
        }
        let n = self.layers.len();
        let mut grads = Vec::with_capacity(n);
        let mut g = output_gradient.clone();
        for i in (0..n).rev() {
            let layer = &self.layers[i];
            if i + 1 < n {
                let z = &tape.pre_activations[i];
                g.as_mut_slice()
                    .iter_mut()
                    .zip(z.as_slice())
                    .for_each(|(gv, zv)| *gv *= selu_derivative(*zv));
            }
            let input = &tape.inputs[i];
            let mut dw = Matrix::zeros(layer.weight.rows(), layer.weight.cols());
            gemm(1.0, &g, true, input, false, 0.0, &mut dw);
            let mut db = vec![0.0; layer.bias.len()];
            for r in 0..g.rows() {
                db.iter_mut().zip(g.row(r)).for_each(|(a, b)| *a += b);
            }
            let mut g_in = Matrix::zeros(g.rows(), layer.weight.cols());
            gemm(1.0, &g, false, &layer.weight, false, 0.0, &mut g_in);
            grads.push(Layer { weight: dw, bias: db });
            g = g_in;
        }
        grads.reverse();
        Ok((Gradients { layers: grads }, g))
    }

    pub fn to_document(&self) -> MlpDocument {
        MlpDocument {
            format_version: 1,
            layers: self
                .layers
                .iter()
                .map(|l| LayerDocument {
                    rows: l.weight.rows(),
                    cols: l.weight.cols(),
                    weights: l.weight.as_slice().to_vec(),
                    bias: l.bias.clone(),
                })
                .collect(),
            activation: "selu".to_string(),
        }
    }

    pub fn from_document(doc: &MlpDocument) -> Result<Self> {
        if doc.format_version != 1 {
            return Err(Error::Config(format!(
                "unsupported mlp format_version {}",
                doc.format_version
            )));
        }
        if doc.activation != "selu" {
            return Err(Error::Config(format!("unsupported activation '{}'", doc.activation)));
        }
        let layers = doc
            .layers
            .iter()
            .map(|l| {
                Ok(Layer {
                    weight: Matrix::from_vec(l.rows, l.cols, l.weights.clone())?,
                    bias: l.bias.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_layers(layers)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_document(&serde_json::from_str(s)?)
    }
}

/// Persisted form of an [`Mlp`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpDocument {
    pub format_version: u32,
    pub layers: Vec<LayerDocument>,
    pub activation: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerDocument {
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}
