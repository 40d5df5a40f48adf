mod common;

use common::{random_beta, random_dataset, rng};
use coxlogit::io::{self, CsvSchema, SavedModel};
use coxlogit::simulate::{self, SimConfig, SyntheticTruth};
use coxlogit::solver;
use coxlogit::{FitResult, Mode, Standardizer, SurvivalDataset};
use ndarray::Array1;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Values spanning many magnitudes, including subnormal-adjacent ones.
fn awkward(rng: &mut ChaCha8Rng) -> f64 {
    let mantissa: f64 = rng.random_range(-1.0..1.0);
    mantissa * 10f64.powi(rng.random_range(-300..300))
}

fn random_model(rng: &mut ChaCha8Rng, p: usize) -> SavedModel {
    let mut beta = random_beta(rng, p, 1.0);
    for b in beta.iter_mut() {
        if rng.random_bool(0.6) {
            *b = 0.0;
        } else if rng.random_bool(0.2) {
            *b = awkward(rng);
        }
    }
    SavedModel {
        fit: FitResult {
            beta,
            lambda: rng.random::<f64>() / 3.0,
            alpha: rng.random_range(0.01..=1.0),
            mode: Mode::ALL[rng.random_range(0..3)],
            objective: rng.random::<f64>() * 7.0,
            n_iterations: rng.random_range(1..200),
            converged: rng.random_bool(0.9),
            objective_trace: (0..rng.random_range(0..6)).map(|_| rng.random::<f64>()).collect(),
        },
        standardizer: Standardizer {
            means: (0..p).map(|_| awkward(rng)).collect(),
            sds: (0..p).map(|_| rng.random_range(1e-3..1e3)).collect(),
        },
        feature_names: (0..p).map(|j| format!("gene_{j}_{}", rng.random::<u16>())).collect(),
    }
}

#[test]
fn datasets_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng(400);
    for case in 0..50 {
        let base = random_dataset(&mut rng, 3 + case % 20, 1 + case % 7, case % 2 == 0, 0.3);
        let mut x = base.covariates().to_owned();
        x.mapv_inplace(|v| if rng.random_bool(0.2) { awkward(&mut rng) } else { v });
        let times = base.times().iter().map(|t| t * rng.random_range(1e-6..1e6)).collect();
        let names = (0..base.n_features()).map(|j| format!("f{j}")).collect();
        let ds = SurvivalDataset::new(x, times, base.status().to_vec(), base.labels().to_vec(), names).unwrap();
        let path = dir.path().join(format!("d{case}.csv"));
        io::write_dataset(&ds, None, &path).unwrap();
        let back = io::read_dataset(&path, &CsvSchema::default()).unwrap();
        assert_eq!(back, ds);
    }
}

#[test]
fn models_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng(401);
    for case in 0..50 {
        let model = random_model(&mut rng, 1 + case % 12);
        let path = dir.path().join(format!("m{case}.json"));
        io::write_model(&model, &path).unwrap();
        let back = io::read_model(&path).unwrap();
        assert_eq!(back, model);
        for (a, b) in back.fit.beta.iter().zip(&model.fit.beta) {
            if *b != 0.0 {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}

#[test]
fn truth_round_trips_with_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng(402);
    for case in 0..50 {
        let k = rng.random_range(1..=4);
        let config = SimConfig {
            n: rng.random_range(10..40),
            p: 3 * k + rng.random_range(1..5),
            k,
            seed: rng.random(),
            weibull_shape: rng.random_range(0.5..4.0),
            censor_target: rng.random_range(0.05..0.9),
            ..Default::default()
        };
        let (ds, truth) = simulate::generate(&config).unwrap();
        let path = dir.path().join(format!("s{case}.csv"));
        io::write_dataset(&ds, Some((&truth, &config)), &path).unwrap();
        let (back_truth, back_config): (SyntheticTruth, SimConfig) = io::read_truth(&io::sidecar_path(&path)).unwrap();
        assert_eq!(back_truth, truth);
        assert_eq!(back_config, config);
        assert_eq!(io::read_dataset(&path, &CsvSchema::default()).unwrap(), ds);
    }
}

#[test]
fn reloaded_model_predicts_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng(403);
    for case in 0..20 {
        let p = 1 + case % 6;
        let model = random_model(&mut rng, p);
        let path = dir.path().join(format!("m{case}.json"));
        io::write_model(&model, &path).unwrap();
        let back = io::read_model(&path).unwrap();
        for _ in 0..10 {
            let x = random_beta(&mut rng, p, 3.0);
            let a = solver::predict_risk(&model.fit, x.view(), &model.standardizer).unwrap();
            let b = solver::predict_risk(&back.fit, x.view(), &back.standardizer).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn zero_model_predicts_half() {
    let p = 4;
    let fit = FitResult {
        beta: Array1::zeros(p),
        lambda: 1.0,
        alpha: 1.0,
        mode: Mode::Coxlogit,
        objective: 0.0,
        n_iterations: 0,
        converged: true,
        objective_trace: vec![],
    };
    let x = Array1::from(vec![1.0, -2.0, 3.0, 0.5]);
    let s = Standardizer::identity(p);
    assert_eq!(solver::predict_probability(&fit, x.view(), &s).unwrap(), 0.5);
    assert_eq!(solver::predict_label(&fit, x.view(), &s).unwrap(), 1);
}
