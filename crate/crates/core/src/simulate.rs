//! Synthetic survival data with a shared set of informative features.
//!
//! Features are split into four groups of indices: `joint` (drives both
//! survival and labels), `survival_only`, `label_only` and `noise`. Event
//! times follow a Weibull proportional-hazards model
//! `h_i(t) = b·k·t^(k-1)·exp(x_i·β_surv)`, censoring times an independent
//! Weibull, and labels are `sign(x_i·β_label)`.
//!
//! Randomness comes from ChaCha20 seeded with `SimConfig::seed`, with one
//! stream per concern: stream 0 draws covariates, stream 1 coefficients and
//! stream 2 event and censoring times.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{default_feature_names, Standardizer, SurvivalDataset};
use crate::error::{Error, Result};

const STREAM_COVARIATES: u64 = 0;
const STREAM_COEFFICIENTS: u64 = 1;
const STREAM_TIMES: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub p: usize,
    /// Informative features per group.
    pub k: usize,
    pub seed: u64,
    pub weibull_shape: f64,
    pub baseline_scale: f64,
    pub censor_shape: f64,
    /// Fixed censoring scale; `None` calibrates it to `censor_target`.
    pub censor_scale: Option<f64>,
    /// Expected censored fraction used when calibrating the scale.
    pub censor_target: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            p: 100,
            k: 10,
            seed: 0,
            weibull_shape: 2.0,
            baseline_scale: 1.0,
            censor_shape: 2.0,
            censor_scale: None,
            censor_target: 0.3,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if self.k < 1 {
            return fail("k must be at least 1".into());
        }
        if 3 * self.k > self.p {
            return fail(format!("3k = {} exceeds p = {}", 3 * self.k, self.p));
        }
        for (name, v) in [
            ("weibull_shape", self.weibull_shape),
            ("baseline_scale", self.baseline_scale),
            ("censor_shape", self.censor_shape),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(scale) = self.censor_scale {
            if !(scale > 0.0 && scale.is_finite()) {
                return fail(format!("censor_scale must be positive, got {scale}"));
            }
        } else if !(self.censor_target > 0.0 && self.censor_target < 1.0) {
            return fail(format!("censor_target must lie in (0, 1), got {}", self.censor_target));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMasks {
    pub joint: Vec<usize>,
    pub survival_only: Vec<usize>,
    pub label_only: Vec<usize>,
    pub noise: Vec<usize>,
}

impl GroupMasks {
    /// Consecutive blocks `[0,k)`, `[k,2k)`, `[2k,3k)` and the remainder.
    pub fn contiguous(p: usize, k: usize) -> Self {
        Self {
            joint: (0..k).collect(),
            survival_only: (k..2 * k).collect(),
            label_only: (2 * k..3 * k).collect(),
            noise: (3 * k..p).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    /// Nonzero on the joint and survival-only groups.
    pub beta_survival: Vec<f64>,
    /// Nonzero on the joint and label-only groups.
    pub beta_label: Vec<f64>,
    pub group_masks: GroupMasks,
}

impl SyntheticTruth {
    pub fn n_features(&self) -> usize {
        self.beta_survival.len()
    }

    /// Draws one coefficient per informative feature uniformly from
    /// `[-1, -0.5] ∪ [0.5, 1]`. The survival vector is its restriction to the
    /// joint and survival-only groups, the label vector its restriction to the
    /// joint and label-only groups, so joint features weigh the same in both.
    pub fn draw(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = config.rng(STREAM_COEFFICIENTS);
        let masks = GroupMasks::contiguous(config.p, config.k);
        let mut beta_survival = vec![0.0; config.p];
        let mut beta_label = vec![0.0; config.p];
        for &j in &masks.joint {
            let b = informative_coefficient(&mut rng);
            beta_survival[j] = b;
            beta_label[j] = b;
        }
        for &j in &masks.survival_only {
            beta_survival[j] = informative_coefficient(&mut rng);
        }
        for &j in &masks.label_only {
            beta_label[j] = informative_coefficient(&mut rng);
        }
        Ok(Self {
            beta_survival,
            beta_label,
            group_masks: masks,
        })
    }
}

fn informative_coefficient<R: Rng>(rng: &mut R) -> f64 {
    let magnitude = rng.random_range(0.5..=1.0);
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Draws a dataset and its ground truth from `config`. Deterministic in the seed.
pub fn generate(config: &SimConfig) -> Result<(SurvivalDataset, SyntheticTruth)> {
    let truth = SyntheticTruth::draw(config)?;
    let ds = generate_with_truth(config, &truth)?;
    Ok((ds, truth))
}

/// Like [`generate`] but with caller-supplied coefficients. Covariates and the
/// uniform draws behind the times are the same as for [`generate`] with the
/// same seed.
pub fn generate_with_truth(config: &SimConfig, truth: &SyntheticTruth) -> Result<SurvivalDataset> {
    config.validate()?;
    if truth.n_features() != config.p || truth.beta_label.len() != config.p {
        return Err(Error::DimensionMismatch {
            what: "ground-truth coefficients",
            expected: config.p,
            found: truth.n_features(),
        });
    }
    let x = draw_covariates(config)?;
    let survival_risk = x.dot(&Array1::from(truth.beta_survival.clone()));
    let label_score = x.dot(&Array1::from(truth.beta_label.clone()));

    let mut rng = config.rng(STREAM_TIMES);
    let shape = config.weibull_shape;
    let event_times: Vec<f64> = survival_risk
        .iter()
        .map(|&r| {
            let u: f64 = rng.sample(Open01);
            (-u.ln() / (config.baseline_scale * r.exp())).powf(1.0 / shape)
        })
        .collect();
    let censor_scale = match config.censor_scale {
        Some(scale) => scale,
        None => calibrate_censor_scale(&event_times, config.censor_shape, config.censor_target),
    };
    let censor_times: Vec<f64> = (0..config.n)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            censor_scale * (-u.ln()).powf(1.0 / config.censor_shape)
        })
        .collect();

    let times = event_times.iter().zip(&censor_times).map(|(t, c)| t.min(*c)).collect();
    let status = event_times.iter().zip(&censor_times).map(|(t, c)| t <= c).collect();
    let labels = label_score.iter().map(|&s| sign_label(s)).collect();
    SurvivalDataset::new(x, times, status, labels, default_feature_names(config.p))
}

fn draw_covariates(config: &SimConfig) -> Result<Array2<f64>> {
    let mut rng = config.rng(STREAM_COVARIATES);
    let x = Array2::from_shape_simple_fn((config.n, config.p), || rng.sample::<f64, _>(StandardNormal));
    Standardizer::fit(&x)?.transform(&x)
}

/// `sign(s)` with `sign(0) = +1`.
pub fn sign_label(score: f64) -> i8 {
    if score >= 0.0 {
        1
    } else {
        -1
    }
}

/// Expected censored fraction when event times `t_i` race an independent
/// Weibull(`shape`, `scale`) censoring time: mean of `1 - exp(-(t_i/scale)^shape)`.
pub fn expected_censoring(event_times: &[f64], shape: f64, scale: f64) -> f64 {
    let total: f64 = event_times.iter().map(|t| -(-(t / scale).powf(shape)).exp_m1()).sum();
    total / event_times.len() as f64
}

/// Censoring scale whose expected censored fraction at the drawn event times
/// equals `target`, by bisection on the log scale.
pub fn calibrate_censor_scale(event_times: &[f64], shape: f64, target: f64) -> f64 {
    let max_t = event_times.iter().copied().fold(f64::MIN_POSITIVE, f64::max);
    let min_t = event_times.iter().copied().fold(f64::INFINITY, f64::min);
    // the fraction decreases in the scale
    let mut lo = (min_t * 1e-6).ln();
    let mut hi = (max_t * 1e6).ln();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if expected_censoring(event_times, shape, mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Fraction of `+1` labels.
pub fn label_balance(labels: &[i8]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    labels.iter().filter(|&&y| y == 1).count() as f64 / labels.len() as f64
}
