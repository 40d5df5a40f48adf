use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ndarray::Axis;

use coxlogit::bench::{self, BenchmarkConfig};
use coxlogit::io::{self, CsvSchema, PathTableRow, Prediction, SavedModel};
use coxlogit::metrics;
use coxlogit::simulate::{self, SimConfig};
use coxlogit::solver::{self, PathConfig, SolverConfig};
use coxlogit::{Error, Mode, PathResult, RiskSetIndex, SurvivalDataset};

#[derive(Parser)]
#[command(name = "coxlogit", version, about = "Joint sparse Cox / logistic regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and its ground-truth sidecar
    Simulate(SimulateArgs),
    /// Follow the regularization path to a target number of features
    Path(PathArgs),
    /// Score a saved model on a labelled survival dataset
    Evaluate(EvaluateArgs),
    /// Repeated generate / split / fit / validate experiment
    Benchmark(BenchmarkArgs),
    /// Write per-sample risk, probability and label
    Predict(PredictArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Expected censored fraction
    #[arg(long, default_value_t = 0.3)]
    censor_target: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PathArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "coxlogit", value_parser = parse_mode)]
    mode: Mode,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 10)]
    target_features: usize,
    #[arg(long, default_value_t = 100)]
    n_lambdas: usize,
    #[arg(long, default_value_t = 1e-3)]
    lambda_min_ratio: f64,
    /// Keep the first grid fit at or above the target instead of bisecting
    #[arg(long)]
    no_refine: bool,
    #[arg(long)]
    out_model: PathBuf,
    #[arg(long)]
    out_path: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Ground-truth sidecar written by `simulate`
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0.2)]
    train_frac: f64,
    #[arg(long, default_value_t = 10)]
    target_features: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.3)]
    censor_target: f64,
    #[arg(long, default_value_t = 2.0)]
    weibull_shape: f64,
    #[arg(long, default_value_t = 2.0)]
    censor_shape: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out_table: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate_cmd(args),
        Command::Path(args) => path_cmd(args),
        Command::Evaluate(args) => evaluate_cmd(args),
        Command::Benchmark(args) => benchmark_cmd(args),
        Command::Predict(args) => predict_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn simulate_cmd(args: SimulateArgs) -> Result<()> {
    let config = SimConfig {
        n: args.n,
        p: args.p,
        k: args.k,
        seed: args.seed,
        censor_target: args.censor_target,
        ..Default::default()
    };
    let (ds, truth) = simulate::generate(&config)?;
    io::write_dataset(&ds, Some((&truth, &config)), &args.out)?;
    println!(
        "wrote {} and {}",
        args.out.display(),
        io::sidecar_path(&args.out).display()
    );
    println!("n={}", ds.n_samples());
    println!("p={}", ds.n_features());
    println!("k={}", config.k);
    println!("seed={}", config.seed);
    println!("censoring_fraction={}", ds.censoring_fraction());
    println!("label_balance={}", simulate::label_balance(ds.labels()));
    Ok(())
}

fn read_data(path: &Path) -> Result<SurvivalDataset> {
    io::read_dataset(path, &CsvSchema::default()).with_context(|| format!("reading {}", path.display()))
}

fn path_table(result: &PathResult, ds: &SurvivalDataset) -> Vec<PathTableRow> {
    result
        .fits
        .iter()
        .map(|fit| {
            let risks = ds.covariates().dot(&fit.beta);
            let risks = risks.as_slice().expect("contiguous");
            let labels: Vec<i8> = risks.iter().map(|&r| solver::label_from_risk(r)).collect();
            let accuracy = metrics::accuracy(&labels, ds.labels()).unwrap_or(f64::NAN);
            let c_index = metrics::concordance_index(risks, ds.times(), ds.status()).ok();
            PathTableRow {
                lambda: fit.lambda,
                n_nonzero: fit.n_nonzero(),
                objective: fit.objective,
                accuracy,
                c_index,
                harmonic: c_index.map(|c| metrics::harmonic_performance(accuracy, c)),
            }
        })
        .collect()
}

fn path_cmd(args: PathArgs) -> Result<()> {
    let raw = read_data(&args.data)?;
    let (ds, standardizer) = raw.standardize()?;
    let idx = RiskSetIndex::build(&ds);
    let path_config = PathConfig {
        n_lambdas: args.n_lambdas,
        lambda_min_ratio: args.lambda_min_ratio,
        target_features: args.target_features,
        refine: !args.no_refine,
    };
    let solver_config = SolverConfig {
        alpha: args.alpha,
        ..Default::default()
    };
    let result = match solver::regularization_path(&ds, &idx, &path_config, &solver_config, args.mode) {
        Ok(result) => result,
        Err(Error::TargetUnreachable {
            target,
            max_achieved,
            partial,
        }) => {
            if let Some(out) = &args.out_path {
                io::write_path_table(&path_table(&partial, &ds), out)?;
                eprintln!("partial path written to {}", out.display());
            }
            bail!("path reached at most {max_achieved} features, target was {target}");
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(out) = &args.out_path {
        io::write_path_table(&path_table(&result, &ds), out)?;
    }
    let fit = result.selected_fit().clone();
    let selected: Vec<&str> = fit
        .nonzero_indices()
        .into_iter()
        .map(|j| ds.feature_names()[j].as_str())
        .collect();
    let model = SavedModel {
        fit,
        standardizer,
        feature_names: ds.feature_names().to_vec(),
    };
    io::write_model(&model, &args.out_model)?;
    println!("mode={}", args.mode);
    println!("lambda={}", model.fit.lambda);
    println!("nonzero={}", selected.len());
    println!("converged={}", model.fit.converged);
    println!("path_length={}", result.fits.len());
    println!("features={}", selected.join(","));
    Ok(())
}

/// Dataset columns reordered to the model's feature names.
fn align(ds: &SurvivalDataset, model: &SavedModel) -> Result<SurvivalDataset> {
    if ds.n_features() != model.feature_names.len() {
        bail!(
            "model has {} features but the data has {}",
            model.feature_names.len(),
            ds.n_features()
        );
    }
    let columns = model
        .feature_names
        .iter()
        .map(|name| {
            ds.feature_names()
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))
        })
        .collect::<coxlogit::Result<Vec<_>>>()?;
    Ok(SurvivalDataset::new(
        ds.covariates().select(Axis(1), &columns),
        ds.times().to_vec(),
        ds.status().to_vec(),
        ds.labels().to_vec(),
        model.feature_names.clone(),
    )?)
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<()> {
    let model = io::read_model(&args.model)?;
    let ds = align(&read_data(&args.data)?, &model)?;
    let e = bench::evaluate(&model.fit, &model.standardizer, &ds)?;
    println!("Accuracy: {:.4}", e.accuracy);
    println!("C-index: {:.4}", e.c_index);
    println!("Predictive performance: {:.4}", e.harmonic);
    let mut kv = vec![
        ("accuracy", e.accuracy.to_string()),
        ("c_index", e.c_index.to_string()),
        ("performance", e.harmonic.to_string()),
        ("nonzero", model.fit.n_nonzero().to_string()),
    ];
    if let Some(truth_path) = &args.truth {
        let (truth, _) = io::read_truth(truth_path)?;
        let r = metrics::feature_recovery(&model.fit.nonzero_indices(), &truth)?;
        println!(
            "Selected features: {} joint, {} survival-only, {} label-only, {} noise",
            r.joint, r.survival_only, r.label_only, r.noise
        );
        kv.extend([
            ("recovery.joint", r.joint.to_string()),
            ("recovery.survival_only", r.survival_only.to_string()),
            ("recovery.label_only", r.label_only.to_string()),
            ("recovery.noise", r.noise.to_string()),
        ]);
    }
    for (k, v) in kv {
        println!("{k}={v}");
    }
    Ok(())
}

fn benchmark_cmd(args: BenchmarkArgs) -> Result<()> {
    let config = BenchmarkConfig {
        runs: args.runs,
        train_frac: args.train_frac,
        sim: SimConfig {
            n: args.n,
            p: args.p,
            k: args.k,
            seed: args.seed,
            censor_target: args.censor_target,
            weibull_shape: args.weibull_shape,
            censor_shape: args.censor_shape,
            ..Default::default()
        },
        path: PathConfig {
            target_features: args.target_features,
            ..Default::default()
        },
        solver: SolverConfig {
            alpha: args.alpha,
            ..Default::default()
        },
        workers: args.workers,
    };
    let report = bench::run_benchmark(&config)?;
    for (run, reason) in &report.failures {
        eprintln!("warning: run {run} failed and was excluded: {reason}");
    }
    print!("{}", report.format_table());
    for (k, v) in report.key_values() {
        println!("{k}={v}");
    }
    if let Some(out) = &args.out_table {
        report.write_csv(out)?;
    }
    Ok(())
}

fn predict_cmd(args: PredictArgs) -> Result<()> {
    let model = io::read_model(&args.model)?;
    let x = io::read_features(&args.data, &model.feature_names)
        .with_context(|| format!("reading {}", args.data.display()))?;
    let predictions = x
        .rows()
        .into_iter()
        .map(|row| {
            let risk = solver::predict_risk(&model.fit, row, &model.standardizer)?;
            Ok(Prediction {
                risk,
                probability: coxlogit::likelihood::logistic_probability(risk),
                label: solver::label_from_risk(risk),
            })
        })
        .collect::<coxlogit::Result<Vec<_>>>()?;
    io::write_predictions(&predictions, &args.out)?;
    println!("predictions={}", predictions.len());
    Ok(())
}
