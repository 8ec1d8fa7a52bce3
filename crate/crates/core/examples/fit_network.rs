//! SELU network and Adam from scratch: regress `sin(3x)` on [-1, 1].

use koopman_rul::nn::{Adam, AdamConfig, Matrix, Mlp};
use koopman_rul::rng::rng_from_seed;

fn main() -> koopman_rul::Result<()> {
    let mut net = Mlp::new(&[1, 32, 32, 1], &mut rng_from_seed(3))?;
    let xs: Vec<f64> = (0..128).map(|k| -1.0 + 2.0 * k as f64 / 127.0).collect();
    let input = Matrix::from_vec(xs.len(), 1, xs.clone())?;
    let target: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin()).collect();
    let mut adam = Adam::new(AdamConfig { learning_rate: 1e-3, ..AdamConfig::default() });

    for step in 0..=2000 {
        let (out, tape) = net.forward_batch(&input)?;
        let mut grad = out.clone();
        let mut loss = 0.0;
        for (g, t) in grad.as_mut_slice().iter_mut().zip(&target) {
            let e = *g - t;
            loss += e * e / xs.len() as f64;
            *g = 2.0 * e / xs.len() as f64;
        }
        let (grads, _) = net.backward(&tape, &grad)?;
        let owned: Vec<Vec<f64>> = grads.slices().into_iter().map(<[f64]>::to_vec).collect();
        let refs: Vec<&[f64]> = owned.iter().map(Vec::as_slice).collect();
        adam.step(&mut net.parameters_mut(), &refs)?;
        if step % 400 == 0 {
            println!("step {step:>4}: mse {loss:.2e}");
        }
    }
    println!("f(0.5) = {:.4}, sin(1.5) = {:.4}", net.predict(&[0.5])?[0], 1.5f64.sin());
    Ok(())
}
