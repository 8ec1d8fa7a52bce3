//! A deep Koopman operator recovers the eigenvalues of a linear system
//! `x' = diag(0.9, 0.5) x` from trajectories alone.

use koopman_rul::data::{windowize, Channel, ChannelSpec, Recording, WindowSample};
use koopman_rul::koopman::{train_sequence_model, Architecture, DkoModel, Objective, TrainConfig};
use koopman_rul::rng::rng_from_seed;
use koopman_rul::spectral::eigenvalues;
use rand::Rng;

fn main() -> koopman_rul::Result<()> {
    let mut rng = rng_from_seed(1);
    let spec = ChannelSpec { state: vec!["a".into(), "b".into()], control: vec![] };
    let mut windows: Vec<Vec<WindowSample>> = Vec::new();
    for r in 0..64 {
        let mut x: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let (mut a, mut b) = (vec![], vec![]);
        for _ in 0..30 {
            a.push(x[0]);
            b.push(x[1]);
            x = [0.9 * x[0], 0.5 * x[1]];
        }
        let rec = Recording {
            id: format!("r{r}"),
            time: (0..30).map(f64::from).collect(),
            channels: vec![Channel { name: "a".into(), values: a }, Channel { name: "b".into(), values: b }],
            rul: None,
        };
        // One sample per window: the observable is a function of the state.
        windows.push(windowize(&rec, &spec, 1, 1)?);
    }

    let arch = Architecture { hidden: vec![16, 16], observable_dim: 2 };
    let config = TrainConfig { epochs: 150, batch_size: 32, horizon: 5, learning_rate: 1e-3, ..TrainConfig::default() };
    let mut model = DkoModel::new(&arch, 2, config.horizon, 0)?;
    let report = train_sequence_model(&mut model, &windows, Objective::Full, &config)?;
    for e in report.history.iter().step_by(30) {
        println!("epoch {:>3}: rec {:.2e} lin {:.2e} pred {:.2e}", e.epoch, e.rec, e.lin, e.pred);
    }
    for z in eigenvalues(&model.koopman)? {
        println!("eigenvalue {:.4} {:+.4}i", z.re, z.im);
    }
    Ok(())
}
