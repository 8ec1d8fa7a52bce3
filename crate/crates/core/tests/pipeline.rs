use koopman_rul::data::{windowize, Channel, ChannelSpec, Recording, SplitSpec};
use koopman_rul::harness::fleet::{in_memory_split, load_split};
use koopman_rul::harness::{self, ExperimentConfig};
use koopman_rul::koopman::{Architecture, ModelBundle, ModelKind, TrainConfig};
use proptest::prelude::*;

fn tiny(dir: &std::path::Path, kind: ModelKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.output_dir = dir.to_path_buf();
    cfg.fleet_seed = 5;
    cfg.seeds = 1;
    cfg.split = Some(SplitSpec::new(3, 2, 1));
    cfg.model.kind = kind;
    cfg.model.architecture = Architecture { hidden: vec![8], observable_dim: 3 };
    cfg.model.train = TrainConfig { epochs: 2, batch_size: 16, horizon: 3, learning_rate: 1e-3, sequences_per_epoch: Some(100), ..TrainConfig::default() };
    cfg
}

#[test]
fn fleet_read_back_from_csv_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path(), ModelKind::Kidm);
    harness::simulate(&cfg).unwrap();
    let (manifest, disk) = load_split(&cfg).unwrap();
    let memory = in_memory_split(&cfg).unwrap();
    assert_eq!(manifest.trajectories.len(), 5);
    for (a, b) in disk.train.iter().chain(&disk.test).zip(memory.train.iter().chain(&memory.test)) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.time, b.time);
        assert_eq!(a.rul, b.rul);
        for name in ["voltage_v", "temperature_k", "current_a"] {
            assert_eq!(a.channel(name), b.channel(name), "{name} of {}", a.id);
        }
    }
}

#[test]
fn saved_bundle_reproduces_observables() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [ModelKind::Dko, ModelKind::Kidm] {
        let cfg = tiny(dir.path(), kind);
        if kind == ModelKind::Dko {
            harness::simulate(&cfg).unwrap();
        }
        let out = harness::train(&cfg).unwrap();
        let bundle = ModelBundle::load(&out.bundle_path).unwrap();
        assert_eq!(bundle.kind, kind);
        let model = bundle.model().unwrap();
        let observer = model.observer().unwrap();
        let (_, split) = load_split(&cfg).unwrap();
        let rec = bundle.normalization.apply(&split.test[0]).unwrap();
        let windows = windowize(&rec, &bundle.channels, bundle.window_size, bundle.window_size).unwrap();
        let refs: Vec<_> = windows.iter().take(5).collect();
        let y = observer.encode_windows(&refs).unwrap();
        let again = ModelBundle::load(&out.bundle_path).unwrap().model().unwrap();
        assert_eq!(y, again.observer().unwrap().encode_windows(&refs).unwrap());
        let history = std::fs::read_to_string(&out.loss_path).unwrap();
        assert_eq!(history.lines().count(), 1 + cfg.model.train.epochs);
    }
}

#[test]
fn evaluate_reports_every_seed_and_the_spread() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = tiny(dir.path(), ModelKind::Ae);
    cfg.seeds = 3;
    harness::simulate(&cfg).unwrap();
    let summary = harness::evaluate(&cfg).unwrap();
    assert_eq!(summary.seeds, vec![0, 1, 2]);
    assert_eq!(summary.supervision_count, 1);
    let mses: Vec<f64> = summary.runs.iter().map(|r| r.mse).collect();
    let mean = mses.iter().sum::<f64>() / 3.0;
    assert!((summary.mse.mean - mean).abs() < 1e-15);
    let var = mses.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / 2.0;
    assert!((summary.mse.std - var.sqrt()).abs() < 1e-15);
    for s in 0..3 {
        assert!(dir.path().join(format!("reports/ae_seed{s}.json")).exists());
    }

    cfg.seeds = 1;
    assert_eq!(harness::evaluate(&cfg).unwrap().mse.std, 0.0);
}

#[test]
fn missing_fleet_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = harness::train(&tiny(dir.path(), ModelKind::Kidm)).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");
}

fn recording(n: usize) -> Recording {
    Recording {
        id: "r".into(),
        time: (0..n).map(|k| 2.0 * k as f64).collect(),
        channels: vec![
            Channel { name: "a".into(), values: (0..n).map(|k| k as f64).collect() },
            Channel { name: "b".into(), values: (0..n).map(|k| -(k as f64)).collect() },
        ],
        rul: Some((0..n).map(|k| 1.0 - k as f64 / n as f64).collect()),
    }
}

proptest! {
    #[test]
    fn windows_tile_the_recording(n in 1usize..400, window in 1usize..50, stride in 1usize..60) {
        prop_assume!(window <= n);
        let spec = ChannelSpec { state: vec!["a".into()], control: vec!["b".into()] };
        let rec = recording(n);
        let ws = windowize(&rec, &spec, window, stride).unwrap();
        prop_assert_eq!(ws.len(), (n - window) / stride + 1);
        for (k, w) in ws.iter().enumerate() {
            let start = k * stride;
            prop_assert_eq!(w.source.start, start);
            prop_assert_eq!(w.x[0], start as f64);
            prop_assert_eq!(w.x[window - 1], (start + window - 1) as f64);
            prop_assert_eq!(w.u[0], -(start as f64));
            prop_assert_eq!(w.rul, Some(rec.rul.as_ref().unwrap()[start + window - 1]));
            prop_assert_eq!(w.source.end_time, rec.time[start + window - 1]);
        }
    }
}
