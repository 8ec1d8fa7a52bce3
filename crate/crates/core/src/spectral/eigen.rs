use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::nn::Matrix;
use crate::{Error, Result};

/// Largest operator side accepted by [`eigenvalues`].
pub const MAX_DIM: usize = 32;

/// Eigenvalues of one operator, tagged with where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
    pub source: String,
}

impl Spectrum {
    pub fn of(matrix: &Matrix, source: impl Into<String>) -> Result<Self> {
        Ok(Self {
            eigenvalues: eigenvalues(matrix)?,
            source: source.into(),
        })
    }

    pub fn radius(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }
}

/// Orthogonal similarity to upper Hessenberg form by Householder reflections.
pub fn hessenberg(matrix: &Matrix) -> Matrix {
    let n = matrix.rows();
    let mut a = matrix.clone();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[(k + 1, k)] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vnorm);
        // A <- (I - 2vv') A (I - 2vv')
        for j in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(i, vi)| vi * a[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                a[(k + 1 + i, j)] -= 2.0 * vi * dot;
            }
        }
        for i in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(j, vj)| vj * a[(i, k + 1 + j)]).sum();
            for (j, vj) in v.iter().enumerate() {
                a[(i, k + 1 + j)] -= 2.0 * vj * dot;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
    a
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// All eigenvalues of a real square matrix.
///
/// Hessenberg reduction followed by Francis double-shift QR sweeps with
/// deflation on negligible subdiagonals. Complex eigenvalues come out in
/// exact conjugate pairs. Sorted by decreasing modulus, then real part,
/// then imaginary part.
pub fn eigenvalues(matrix: &Matrix) -> Result<Vec<Complex64>> {
    if !matrix.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let n = matrix.rows();
    if n > MAX_DIM {
        return Err(Error::InvalidArgument(format!("operator side {n} exceeds {MAX_DIM}")));
    }
    if !matrix.is_finite() {
        return Err(Error::NonFinite("operator entries"));
    }
    let mut a = hessenberg(matrix);
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let cap = 500 * n.max(1);

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut total_iterations = 0;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut its = 0;
    while nn >= 0 {
        let nu = nn as usize;
        // Find a negligible subdiagonal element.
        let mut l = nu;
        while l > 0 {
            let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
            if s == 0.0 {
                s = anorm;
            }
            if a[(l, l - 1)].abs() + s == s {
                a[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }
        let mut x = a[(nu, nu)];
        if l == nu {
            wr[nu] = x + t;
            wi[nu] = 0.0;
            nn -= 1;
            its = 0;
            continue;
        }
        let mut y = a[(nu - 1, nu - 1)];
        let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
        if l == nu - 1 {
            let p = 0.5 * (y - x);
            let q = p * p + w;
            let mut z = q.abs().sqrt();
            x += t;
            if q >= 0.0 {
                z = p + sign(z, p);
                wr[nu - 1] = x + z;
                wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                wi[nu - 1] = 0.0;
                wi[nu] = 0.0;
            } else {
                wr[nu - 1] = x + p;
                wr[nu] = x + p;
                wi[nu - 1] = z;
                wi[nu] = -z;
            }
            nn -= 2;
            its = 0;
            continue;
        }

        if total_iterations >= cap {
            return Err(Error::NonConvergence(cap));
        }
        if its > 0 && its % 10 == 0 {
            // Exceptional shift.
            t += x;
            for i in 0..=nu {
                a[(i, i)] -= x;
            }
            let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        its += 1;
        total_iterations += 1;

        // Look for two consecutive small subdiagonal elements.
        let (mut p, mut q, mut r, mut z);
        let mut m = nu - 2;
        loop {
            z = a[(m, m)];
            r = x - z;
            let s = y - z;
            p = (r * s - w) / a[(m + 1, m)] + a[(m, m + 1)];
            q = a[(m + 1, m + 1)] - z - r - s;
            r = a[(m + 2, m + 1)];
            let scale = p.abs() + q.abs() + r.abs();
            p /= scale;
            q /= scale;
            r /= scale;
            if m == l {
                break;
            }
            let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
            let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
            if u + v == v {
                break;
            }
            m -= 1;
        }
        for i in m..nu - 1 {
            a[(i + 2, i)] = 0.0;
            if i != m {
                a[(i + 2, i - 1)] = 0.0;
            }
        }

        // Double-shift QR step on rows l..=nn and columns m..=nn.
        for k in m..nu {
            if k != m {
                p = a[(k, k - 1)];
                q = a[(k + 1, k - 1)];
                r = if k + 1 != nu { a[(k + 2, k - 1)] } else { 0.0 };
                x = p.abs() + q.abs() + r.abs();
                if x != 0.0 {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            let s = sign((p * p + q * q + r * r).sqrt(), p);
            if s == 0.0 {
                continue;
            }
            if k == m {
                if l != m {
                    a[(k, k - 1)] = -a[(k, k - 1)];
                }
            } else {
                a[(k, k - 1)] = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for j in k..=nu {
                let mut pj = a[(k, j)] + q * a[(k + 1, j)];
                if k + 1 != nu {
                    pj += r * a[(k + 2, j)];
                    a[(k + 2, j)] -= pj * z;
                }
                a[(k + 1, j)] -= pj * y;
                a[(k, j)] -= pj * x;
            }
            let mmin = nu.min(k + 3);
            for i in l..=mmin {
                let mut pi = x * a[(i, k)] + y * a[(i, k + 1)];
                if k + 1 != nu {
                    pi += z * a[(i, k + 2)];
                    a[(i, k + 2)] -= pi * r;
                }
                a[(i, k + 1)] -= pi * q;
                a[(i, k)] -= pi;
            }
        }
    }

    let mut out: Vec<Complex64> = wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect();
    if out.iter().any(|l| !l.re.is_finite() || !l.im.is_finite()) {
        return Err(Error::NonConvergence(cap));
    }
    out.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
    Ok(out)
}

/// `max |lambda|`.
pub fn spectral_radius(matrix: &Matrix) -> Result<f64> {
    Ok(eigenvalues(matrix)?.iter().map(|l| l.norm()).fold(0.0, f64::max))
}
