use crate::data::WindowSample;
use crate::nn::Matrix;
use crate::{Error, Result};

/// Rows `(j - steps.start) * B + b` hold window `j` of sequence `b`,
/// optionally followed by its control vector.
pub(crate) fn stack(
    seqs: &[Vec<&WindowSample>],
    steps: std::ops::Range<usize>,
    state: bool,
    control: bool,
) -> Result<Matrix> {
    let first = seqs.first().and_then(|s| s.first()).ok_or(Error::EmptyData("batch"))?;
    let nx = if state { first.x.len() } else { 0 };
    let nu = if control { first.u.len() } else { 0 };
    let b = seqs.len();
    let mut m = Matrix::zeros(b * steps.len(), nx + nu);
    for (jj, j) in steps.enumerate() {
        for (bi, seq) in seqs.iter().enumerate() {
            let w = seq.get(j).ok_or(Error::EmptyData("sequence step"))?;
            if (state && w.x.len() != nx) || (control && w.u.len() != nu) {
                return Err(Error::DimensionMismatch {
                    context: "window width",
                    expected: nx + nu,
                    actual: w.x.len() * state as usize + w.u.len() * control as usize,
                });
            }
            let row = m.row_mut(jj * b + bi);
            if state {
                row[..nx].copy_from_slice(&w.x);
            }
            if control {
                row[nx..].copy_from_slice(&w.u);
            }
        }
    }
    Ok(m)
}

/// Copies `rows` starting at `from` into a new matrix.
pub(crate) fn rows(m: &Matrix, from: usize, count: usize) -> Matrix {
    let cols = m.cols();
    Matrix::from_vec(count, cols, m.as_slice()[from * cols..(from + count) * cols].to_vec())
        .expect("row range within matrix")
}

/// Horizontal concatenation of equally tall matrices.
pub(crate) fn hcat(a: &Matrix, b: &Matrix) -> Matrix {
    debug_assert_eq!(a.rows(), b.rows());
    let mut out = Matrix::zeros(a.rows(), a.cols() + b.cols());
    for r in 0..a.rows() {
        let row = out.row_mut(r);
        row[..a.cols()].copy_from_slice(a.row(r));
        row[a.cols()..].copy_from_slice(b.row(r));
    }
    out
}

/// First `cols` columns.
pub(crate) fn left_cols(m: &Matrix, cols: usize) -> Matrix {
    let mut out = Matrix::zeros(m.rows(), cols);
    for r in 0..m.rows() {
        out.row_mut(r).copy_from_slice(&m.row(r)[..cols]);
    }
    out
}

/// `scale * sum((pred - target)^2)` and its gradient with respect to `pred`.
pub(crate) fn squared_error(pred: &Matrix, target: &Matrix, scale: f64) -> (f64, Matrix) {
    debug_assert_eq!((pred.rows(), pred.cols()), (target.rows(), target.cols()));
    let mut grad = pred.clone();
    let mut loss = 0.0;
    for (g, t) in grad.as_mut_slice().iter_mut().zip(target.as_slice()) {
        let r = *g - t;
        loss += r * r;
        *g = 2.0 * scale * r;
    }
    (scale * loss, grad)
}

/// Checks every sequence and returns the common horizon.
pub(crate) fn validate_sequences(seqs: &[Vec<&WindowSample>]) -> Result<usize> {
    let len = seqs.first().map(Vec::len).ok_or(Error::EmptyData("batch"))?;
    if len == 0 {
        return Err(Error::EmptyData("sequence"));
    }
    for s in seqs {
        if s.len() != len {
            return Err(Error::ShapeMismatch("sequences of different lengths in one batch".into()));
        }
        crate::data::check_consecutive(s)?;
    }
    Ok(len - 1)
}

/// `dst[from_row + r] += sign * src[r]` for every row of `src`.
pub(crate) fn add_rows(dst: &mut Matrix, from_row: usize, src: &Matrix, sign: f64) {
    let cols = dst.cols();
    debug_assert_eq!(cols, src.cols());
    let dst = &mut dst.as_mut_slice()[from_row * cols..(from_row + src.rows()) * cols];
    dst.iter_mut().zip(src.as_slice()).for_each(|(a, b)| *a += sign * b);
}
