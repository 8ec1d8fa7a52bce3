//! Dense math and feed-forward networks.

mod adam;
mod matrix;
mod mlp;

pub use adam::{Adam, AdamConfig};
pub use matrix::{gemm_into, Matrix};
pub use mlp::{selu, selu_derivative, Gradients, Layer, Mlp, MlpDocument, Tape, SELU_ALPHA, SELU_LAMBDA};
