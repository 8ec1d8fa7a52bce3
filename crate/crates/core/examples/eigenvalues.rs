//! Dense real eigenvalues: Hessenberg reduction then shifted QR.

use koopman_rul::nn::Matrix;
use koopman_rul::spectral::{eigenvalues, hessenberg, spectral_radius, Spectrum};

fn main() -> koopman_rul::Result<()> {
    // Companion matrix of (x - 1)(x - 2)(x^2 + 1).
    let companion = Matrix::from_rows(&[
        [0.0, 0.0, 0.0, -2.0],
        [1.0, 0.0, 0.0, 3.0],
        [0.0, 1.0, 0.0, -3.0],
        [0.0, 0.0, 1.0, 3.0],
    ])?;
    for z in eigenvalues(&companion)? {
        println!("{:+.6} {:+.6}i", z.re, z.im);
    }

    let a = Matrix::from_rows(&[[4.0, 1.0, 2.0], [0.5, 3.0, 1.0], [2.0, 1.0, 5.0]])?;
    let h = hessenberg(&a);
    println!("Hessenberg form:");
    for i in 0..3 {
        println!("  {:?}", h.row(i).iter().map(|v| format!("{v:+.4}")).collect::<Vec<_>>());
    }
    println!("spectral radius {:.6}", spectral_radius(&a)?);

    let spectrum = Spectrum::of(&Matrix::diag(&[0.99, 0.95, 0.5]), "decay")?;
    println!("{}: radius {:.2}", spectrum.source, spectrum.radius());
    Ok(())
}
