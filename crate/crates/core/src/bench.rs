//! Resampling benchmark on synthetic data.
//!
//! Each run generates a dataset, splits it into training and validation
//! parts, follows the regularization path of every [`Mode`] to the target
//! feature count on the training part, and scores the selected models on the
//! validation part. Runs are independent and execute in parallel; results are
//! reported in run order, so a fixed seed always yields the same tables.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array1;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::data::{FitResult, Mode, RiskSetIndex, Standardizer, SurvivalDataset};
use crate::error::{Error, Result};
use crate::metrics::{self, FeatureRecovery};
use crate::simulate::{self, SimConfig, SyntheticTruth};
use crate::solver::{self, PathConfig, SolverConfig};

const SPLIT_STREAM: u64 = 3;
/// Largest tolerated fraction of failed runs.
const MAX_FAILURE_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub runs: usize,
    pub train_frac: f64,
    /// Base generator settings; each run replaces the seed.
    pub sim: SimConfig,
    pub path: PathConfig,
    pub solver: SolverConfig,
    /// Worker threads; `None` uses every available core.
    pub workers: Option<usize>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            runs: 100,
            train_frac: 0.2,
            sim: SimConfig::default(),
            path: PathConfig::default(),
            solver: SolverConfig::default(),
            workers: None,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be positive".into()));
        }
        if !(self.train_frac > 0.0 && self.train_frac < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train_frac must lie in (0, 1), got {}",
                self.train_frac
            )));
        }
        self.sim.validate()?;
        self.solver.validate()?;
        self.path.validate(self.sim.p)?;
        let n_train = train_size(self.sim.n, self.train_frac);
        if n_train < 2 || self.sim.n - n_train < 2 {
            return Err(Error::InvalidConfig(format!(
                "a {} / {} split leaves fewer than 2 samples on one side",
                n_train,
                self.sim.n - n_train
            )));
        }
        Ok(())
    }

    /// Generator seed of run `run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.sim.seed.wrapping_add(run as u64)
    }
}

fn train_size(n: usize, frac: f64) -> usize {
    (n as f64 * frac).round() as usize
}

/// Seeded permutation split without replacement: `(train, validation)`.
pub fn split_indices(n: usize, train_frac: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(SPLIT_STREAM);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let validation = order.split_off(train_size(n, train_frac));
    (order, validation)
}

/// Out-of-sample scores of one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub c_index: f64,
    pub harmonic: f64,
}

/// Risk scores `β·standardize(x)` for every row of `ds`.
pub fn risk_scores(fit: &FitResult, standardizer: &Standardizer, ds: &SurvivalDataset) -> Result<Array1<f64>> {
    if ds.n_features() != fit.beta.len() {
        return Err(Error::DimensionMismatch {
            what: "dataset features",
            expected: fit.beta.len(),
            found: ds.n_features(),
        });
    }
    Ok(standardizer.transform(ds.covariates())?.dot(&fit.beta))
}

pub fn evaluate(fit: &FitResult, standardizer: &Standardizer, ds: &SurvivalDataset) -> Result<Evaluation> {
    let risks = risk_scores(fit, standardizer, ds)?;
    evaluate_risks(risks.as_slice().expect("contiguous"), ds)
}

pub fn evaluate_risks(risks: &[f64], ds: &SurvivalDataset) -> Result<Evaluation> {
    let predicted: Vec<i8> = risks.iter().map(|&r| solver::label_from_risk(r)).collect();
    let accuracy = metrics::accuracy(&predicted, ds.labels())?;
    let c_index = metrics::concordance_index(risks, ds.times(), ds.status())?;
    Ok(Evaluation {
        accuracy,
        c_index,
        harmonic: metrics::harmonic_performance(accuracy, c_index),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub mode: Mode,
    pub recovery: FeatureRecovery,
    pub n_selected: usize,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub run: usize,
    pub seed: u64,
    /// One entry per mode, in [`Mode::ALL`] order.
    pub methods: Vec<MethodOutcome>,
    pub censoring_fraction: f64,
}

/// Fits a standardized copy of `train` along the path and returns the
/// selected fit and the training standardizer.
pub fn fit_to_target(
    train: &SurvivalDataset,
    mode: Mode,
    path: &PathConfig,
    solver_config: &SolverConfig,
) -> Result<(FitResult, Standardizer)> {
    let (train_std, standardizer) = train.standardize()?;
    let idx = RiskSetIndex::build(&train_std);
    let result = solver::regularization_path(&train_std, &idx, path, solver_config, mode)?;
    Ok((result.selected_fit().clone(), standardizer))
}

pub fn run_once(config: &BenchmarkConfig, run: usize) -> Result<RunOutcome> {
    let seed = config.run_seed(run);
    let sim = SimConfig {
        seed,
        ..config.sim.clone()
    };
    let (ds, truth) = simulate::generate(&sim)?;
    let (train_idx, val_idx) = split_indices(ds.n_samples(), config.train_frac, seed);
    let train = ds.subset(&train_idx)?;
    let validation = ds.subset(&val_idx)?;
    let methods = Mode::ALL
        .iter()
        .map(|&mode| score_method(&train, &validation, &truth, mode, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunOutcome {
        run,
        seed,
        methods,
        censoring_fraction: ds.censoring_fraction(),
    })
}

fn score_method(
    train: &SurvivalDataset,
    validation: &SurvivalDataset,
    truth: &SyntheticTruth,
    mode: Mode,
    config: &BenchmarkConfig,
) -> Result<MethodOutcome> {
    let (fit, standardizer) = fit_to_target(train, mode, &config.path, &config.solver)?;
    let selected = fit.nonzero_indices();
    Ok(MethodOutcome {
        mode,
        recovery: metrics::feature_recovery(&selected, truth)?,
        n_selected: selected.len(),
        evaluation: evaluate(&fit, &standardizer, validation)?,
    })
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

impl MeanSe {
    pub fn of(values: &[f64]) -> Self {
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let se = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
            (var / m).sqrt()
        } else {
            0.0
        };
        Self { mean, se }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub mode: Mode,
    /// Selected features from the joint group.
    pub joint_features: MeanSe,
    pub selected: MeanSe,
    pub accuracy: MeanSe,
    pub c_index: MeanSe,
    pub harmonic: MeanSe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub runs: Vec<RunOutcome>,
    pub failures: Vec<(usize, String)>,
    /// In [`Mode::ALL`] order.
    pub summaries: Vec<MethodSummary>,
    pub target_features: usize,
    pub k: usize,
}

impl BenchmarkReport {
    pub fn summary(&self, mode: Mode) -> &MethodSummary {
        self.summaries
            .iter()
            .find(|s| s.mode == mode)
            .expect("every mode is summarized")
    }

    pub fn mean_censoring(&self) -> f64 {
        MeanSe::of(&self.runs.iter().map(|r| r.censoring_fraction).collect::<Vec<_>>()).mean
    }

    /// Aligned text table, one row per method.
    pub fn format_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>16} {:>16} {:>16} {:>16}",
            "method", "features", "accuracy", "c_index", "performance"
        );
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "{:<10} {:>8.2}/{:<2} ±{:.2} {:>9.3} ±{:.3} {:>9.3} ±{:.3} {:>9.3} ±{:.3}",
                s.mode.as_str(),
                s.joint_features.mean,
                self.k,
                s.joint_features.se,
                s.accuracy.mean,
                s.accuracy.se,
                s.c_index.mean,
                s.c_index.se,
                s.harmonic.mean,
                s.harmonic.se,
            );
        }
        out
    }

    /// `method.metric=value` lines with stable keys.
    pub fn key_values(&self) -> Vec<(String, f64)> {
        let mut out = vec![
            ("runs_completed".to_string(), self.runs.len() as f64),
            ("runs_failed".to_string(), self.failures.len() as f64),
            ("censoring_fraction".to_string(), self.mean_censoring()),
        ];
        for s in &self.summaries {
            let m = s.mode.as_str();
            for (name, v) in [
                ("joint_features", s.joint_features),
                ("selected", s.selected),
                ("accuracy", s.accuracy),
                ("c_index", s.c_index),
                ("performance", s.harmonic),
            ] {
                out.push((format!("{m}.{name}"), v.mean));
                out.push((format!("{m}.{name}_se"), v.se));
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record([
            "method",
            "features",
            "features_se",
            "accuracy",
            "accuracy_se",
            "c_index",
            "c_index_se",
            "performance",
            "performance_se",
            "runs",
        ])?;
        for s in &self.summaries {
            let mut record = vec![s.mode.as_str().to_string()];
            for v in [s.joint_features, s.accuracy, s.c_index, s.harmonic] {
                record.push(v.mean.to_string());
                record.push(v.se.to_string());
            }
            record.push(self.runs.len().to_string());
            writer.write_record(&record)?;
        }
        writer.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn summarize(runs: &[RunOutcome]) -> Vec<MethodSummary> {
    Mode::ALL
        .iter()
        .enumerate()
        .map(|(m, &mode)| {
            let column = |f: &dyn Fn(&MethodOutcome) -> f64| {
                MeanSe::of(&runs.iter().map(|r| f(&r.methods[m])).collect::<Vec<_>>())
            };
            MethodSummary {
                mode,
                joint_features: column(&|o| o.recovery.joint as f64),
                selected: column(&|o| o.n_selected as f64),
                accuracy: column(&|o| o.evaluation.accuracy),
                c_index: column(&|o| o.evaluation.c_index),
                harmonic: column(&|o| o.evaluation.harmonic),
            }
        })
        .collect()
}

/// Runs the whole benchmark. Failed runs are dropped and listed in
/// [`BenchmarkReport::failures`]; more than 10% failures aborts.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = config.workers {
        builder = builder.num_threads(workers);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<RunOutcome>> = pool.install(|| {
        (0..config.runs)
            .into_par_iter()
            .map(|run| run_once(config, run))
            .collect()
    });

    let mut runs = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (run, result) in results.into_iter().enumerate() {
        match result {
            Ok(outcome) => runs.push(outcome),
            Err(e) => failures.push((run, e.to_string())),
        }
    }
    if failures.len() as f64 > MAX_FAILURE_FRACTION * config.runs as f64 || runs.is_empty() {
        return Err(Error::BenchmarkAborted {
            failed: failures.len(),
            runs: config.runs,
        });
    }
    Ok(BenchmarkReport {
        summaries: summarize(&runs),
        runs,
        failures,
        target_features: config.path.target_features,
        k: config.sim.k,
    })
}
