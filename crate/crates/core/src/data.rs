//! Survival datasets, feature standardization and risk-set indexing.
//!
//! A [`SurvivalDataset`] holds one row per sample: covariates `x_i`, observed
//! time `t_i`, event flag `δ_i` (false = censored) and subgroup label
//! `y_i ∈ {-1, +1}`. Everything here is immutable once built and can be
//! shared read-only between concurrent fits.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalDataset {
    covariates: Array2<f64>,
    times: Vec<f64>,
    status: Vec<bool>,
    labels: Vec<i8>,
    feature_names: Vec<String>,
}

impl SurvivalDataset {
    /// Builds a dataset after checking shapes and per-sample value domains.
    ///
    /// Standardization is a separate step, see [`SurvivalDataset::standardize`].
    pub fn new(
        covariates: Array2<f64>,
        times: Vec<f64>,
        status: Vec<bool>,
        labels: Vec<i8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let (n, p) = covariates.dim();
        if n < 2 {
            return Err(Error::TooFewSamples(n));
        }
        if p == 0 {
            return Err(Error::NoFeatures);
        }
        for (what, len) in [
            ("times", times.len()),
            ("status", status.len()),
            ("labels", labels.len()),
        ] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    found: len,
                });
            }
        }
        if feature_names.len() != p {
            return Err(Error::DimensionMismatch {
                what: "feature names",
                expected: p,
                found: feature_names.len(),
            });
        }
        if let Some((index, &value)) = times.iter().enumerate().find(|(_, t)| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::NonPositiveTime { index, value });
        }
        if let Some((index, &value)) = labels.iter().enumerate().find(|(_, y)| y.abs() != 1) {
            return Err(Error::InvalidLabel {
                index,
                value: value.into(),
            });
        }
        if let Some(((row, column), _)) = covariates.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteCovariate { row, column });
        }
        Ok(Self {
            covariates,
            times,
            status,
            labels,
            feature_names,
        })
    }

    /// Same as [`SurvivalDataset::new`] with generated names `x0, x1, ...`.
    pub fn with_default_names(
        covariates: Array2<f64>,
        times: Vec<f64>,
        status: Vec<bool>,
        labels: Vec<i8>,
    ) -> Result<Self> {
        let names = default_feature_names(covariates.ncols());
        Self::new(covariates, times, status, labels, names)
    }

    pub fn n_samples(&self) -> usize {
        self.covariates.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.covariates.ncols()
    }

    pub fn covariates(&self) -> &Array2<f64> {
        &self.covariates
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn status(&self) -> &[bool] {
        &self.status
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_events(&self) -> usize {
        self.status.iter().filter(|&&d| d).count()
    }

    pub fn censoring_fraction(&self) -> f64 {
        1.0 - self.n_events() as f64 / self.n_samples() as f64
    }

    /// Rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let covariates = self.covariates.select(Axis(0), indices);
        Self::new(
            covariates,
            indices.iter().map(|&i| self.times[i]).collect(),
            indices.iter().map(|&i| self.status[i]).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.feature_names.clone(),
        )
    }

    pub fn with_labels(&self, labels: Vec<i8>) -> Result<Self> {
        Self::new(
            self.covariates.clone(),
            self.times.clone(),
            self.status.clone(),
            labels,
            self.feature_names.clone(),
        )
    }

    pub fn with_status(&self, status: Vec<bool>) -> Result<Self> {
        Self::new(
            self.covariates.clone(),
            self.times.clone(),
            status,
            self.labels.clone(),
            self.feature_names.clone(),
        )
    }

    pub fn with_times(&self, times: Vec<f64>) -> Result<Self> {
        Self::new(
            self.covariates.clone(),
            times,
            self.status.clone(),
            self.labels.clone(),
            self.feature_names.clone(),
        )
    }

    /// Centers every column and scales it to unit sample standard deviation.
    ///
    /// Returns the standardized dataset together with the per-column
    /// parameters, which are needed to transform prediction inputs.
    pub fn standardize(&self) -> Result<(Self, Standardizer)> {
        let standardizer = Standardizer::fit(&self.covariates)?;
        let covariates = standardizer.transform(&self.covariates)?;
        let ds = Self {
            covariates,
            ..self.clone()
        };
        Ok((ds, standardizer))
    }
}

pub(crate) fn default_feature_names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{j}")).collect()
}

/// Per-column affine map `x -> (x - mean) / sd` learned on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardizer {
    /// Column means and sample (n - 1) standard deviations.
    pub fn fit(x: &Array2<f64>) -> Result<Self> {
        let n = x.nrows();
        if n < 2 {
            return Err(Error::TooFewSamples(n));
        }
        let mut means = Vec::with_capacity(x.ncols());
        let mut sds = Vec::with_capacity(x.ncols());
        for (index, column) in x.axis_iter(Axis(1)).enumerate() {
            let mean = column.sum() / n as f64;
            let ss: f64 = column.iter().map(|v| (v - mean) * (v - mean)).sum();
            let sd = (ss / (n - 1) as f64).sqrt();
            if !(sd > f64::EPSILON * mean.abs()) || !sd.is_finite() {
                return Err(Error::ConstantColumn { index });
            }
            means.push(mean);
            sds.push(sd);
        }
        Ok(Self { means, sds })
    }

    /// The identity map on `p` columns.
    pub fn identity(p: usize) -> Self {
        Self {
            means: vec![0.0; p],
            sds: vec![1.0; p],
        }
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.check_width(x.ncols())?;
        let mut out = x.clone();
        for (j, mut column) in out.axis_iter_mut(Axis(1)).enumerate() {
            let (mean, sd) = (self.means[j], self.sds[j]);
            column.mapv_inplace(|v| (v - mean) / sd);
        }
        Ok(out)
    }

    pub fn transform_row(&self, row: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_width(row.len())?;
        Ok(Array1::from_iter(
            row.iter()
                .zip(self.means.iter().zip(&self.sds))
                .map(|(v, (mean, sd))| (v - mean) / sd),
        ))
    }

    fn check_width(&self, found: usize) -> Result<()> {
        if found != self.n_features() {
            return Err(Error::DimensionMismatch {
                what: "standardizer width",
                expected: self.n_features(),
                found,
            });
        }
        Ok(())
    }
}

/// Samples sorted by decreasing time, grouped into blocks of tied times.
///
/// The risk set `R(t_i) = {j | t_j >= t_i}` of any sample is the prefix of
/// `order` that ends with the tie block containing that sample. Tied samples
/// share one risk set (Breslow).
#[derive(Debug, Clone, PartialEq)]
pub struct RiskSetIndex {
    order: Vec<usize>,
    event_positions: Vec<usize>,
    tie_blocks: Vec<Range<usize>>,
    block_of_sample: Vec<usize>,
}

impl RiskSetIndex {
    /// Sorts by decreasing time; equal times keep their original index order.
    pub fn build(ds: &SurvivalDataset) -> Self {
        Self::from_times(ds.times(), ds.status())
    }

    pub(crate) fn from_times(times: &[f64], status: &[bool]) -> Self {
        let n = times.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| times[b].total_cmp(&times[a]));

        let mut tie_blocks = Vec::new();
        let mut block_of_sample = vec![0; n];
        let mut start = 0;
        for pos in 1..=n {
            if pos == n || times[order[pos]] != times[order[start]] {
                for &i in &order[start..pos] {
                    block_of_sample[i] = tie_blocks.len();
                }
                tie_blocks.push(start..pos);
                start = pos;
            }
        }
        let event_positions = (0..n).filter(|&pos| status[order[pos]]).collect();
        Self {
            order,
            event_positions,
            tie_blocks,
            block_of_sample,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn event_positions(&self) -> &[usize] {
        &self.event_positions
    }

    pub fn tie_blocks(&self) -> &[Range<usize>] {
        &self.tie_blocks
    }

    /// Index into [`RiskSetIndex::tie_blocks`] of the block holding `sample`.
    pub fn block_of(&self, sample: usize) -> usize {
        self.block_of_sample[sample]
    }

    /// Members of `R(t_sample)`.
    pub fn risk_set(&self, sample: usize) -> &[usize] {
        let block = &self.tie_blocks[self.block_of_sample[sample]];
        &self.order[..block.end]
    }
}

/// Which likelihood terms a model includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Shared coefficients for the Cox and logistic terms.
    Coxlogit,
    #[serde(rename = "cox")]
    CoxOnly,
    #[serde(rename = "logistic")]
    LogisticOnly,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Coxlogit, Mode::CoxOnly, Mode::LogisticOnly];

    pub fn weights(self) -> ModeWeights {
        match self {
            Mode::Coxlogit => ModeWeights {
                include_logistic: true,
                include_cox: true,
            },
            Mode::CoxOnly => ModeWeights {
                include_logistic: false,
                include_cox: true,
            },
            Mode::LogisticOnly => ModeWeights {
                include_logistic: true,
                include_cox: false,
            },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Coxlogit => "coxlogit",
            Mode::CoxOnly => "cox",
            Mode::LogisticOnly => "logistic",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coxlogit" => Ok(Mode::Coxlogit),
            "cox" | "coxonly" => Ok(Mode::CoxOnly),
            "logistic" | "logisticonly" => Ok(Mode::LogisticOnly),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

/// Term switches derived from a [`Mode`]; at least one is always set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeWeights {
    pub include_logistic: bool,
    pub include_cox: bool,
}

impl From<Mode> for ModeWeights {
    fn from(mode: Mode) -> Self {
        mode.weights()
    }
}

/// Coefficients produced by one penalized fit, with the settings behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta: Array1<f64>,
    pub lambda: f64,
    pub alpha: f64,
    pub mode: Mode,
    /// Penalized objective `(2/n)·NLL(β) + λ·Ω(β)` at `beta`.
    pub objective: f64,
    pub n_iterations: usize,
    pub converged: bool,
    /// Objective after each outer iteration, starting with the initial point.
    pub objective_trace: Vec<f64>,
}

impl FitResult {
    pub fn n_nonzero(&self) -> usize {
        self.beta.iter().filter(|b| **b != 0.0).count()
    }

    pub fn nonzero_indices(&self) -> Vec<usize> {
        self.beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}
