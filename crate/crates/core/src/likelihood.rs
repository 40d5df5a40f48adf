//! Negative log-likelihood of the joint Cox / logistic model.
//!
//! With risk scores `r_i = β·x_i` the objective is
//!
//! ```text
//! -l(β) = Σ_i log(1 + exp(-y_i r_i))                       (logistic)
//!       - Σ_i δ_i r_i + Σ_i δ_i log Σ_{j ∈ R(t_i)} exp(r_j)   (Cox, Breslow ties)
//! ```
//!
//! All quantities are first computed with respect to the score vector `r`
//! (one pass over the time-sorted [`RiskSetIndex`]) and then mapped to
//! coefficient space through the covariate matrix.

use ndarray::{Array1, ArrayView1};

use crate::data::{ModeWeights, RiskSetIndex, SurvivalDataset};
use crate::error::{Error, Result};

/// `exp(r) / (1 + exp(r))`, evaluated without overflow.
pub fn logistic_probability(risk_score: f64) -> f64 {
    if risk_score >= 0.0 {
        1.0 / (1.0 + (-risk_score).exp())
    } else {
        let e = risk_score.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))`.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Probability that sample `i` of a risk set has the event, written as the
/// conditional probability that `i` alone is in the high-risk class:
///
/// `P(Y_i=1) Π_{j≠i} P(Y_j=-1) / Σ_k P(Y_k=1) Π_{j≠k} P(Y_j=-1)`.
///
/// Computed literally from class probabilities, for checking against
/// [`partial_likelihood_term`].
pub fn event_probability_from_classes(scores: &[f64], i: usize) -> f64 {
    let joint = |k: usize| -> f64 {
        scores
            .iter()
            .enumerate()
            .map(|(j, &r)| {
                if j == k {
                    logistic_probability(r)
                } else {
                    1.0 - logistic_probability(r)
                }
            })
            .product()
    };
    let denominator: f64 = (0..scores.len()).map(joint).sum();
    joint(i) / denominator
}

/// `exp(r_i) / Σ_k exp(r_k)` over one risk set.
pub fn partial_likelihood_term(scores: &[f64], i: usize) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let denominator: f64 = scores.iter().map(|r| (r - max).exp()).sum();
    (scores[i] - max).exp() / denominator
}

pub(crate) fn check_shapes(beta_len: usize, ds: &SurvivalDataset, idx: &RiskSetIndex) -> Result<()> {
    if beta_len != ds.n_features() {
        return Err(Error::DimensionMismatch {
            what: "coefficient vector",
            expected: ds.n_features(),
            found: beta_len,
        });
    }
    if idx.n_samples() != ds.n_samples() {
        return Err(Error::DimensionMismatch {
            what: "risk-set index",
            expected: ds.n_samples(),
            found: idx.n_samples(),
        });
    }
    Ok(())
}

/// Risk scores `X β`.
pub fn risk_scores(beta: ArrayView1<f64>, ds: &SurvivalDataset) -> Result<Array1<f64>> {
    if beta.len() != ds.n_features() {
        return Err(Error::DimensionMismatch {
            what: "coefficient vector",
            expected: ds.n_features(),
            found: beta.len(),
        });
    }
    Ok(ds.covariates().dot(&beta))
}

/// Running `log Σ exp(r_j)` over each prefix of the risk index, one entry per
/// tie block.
fn log_risk_sums(scores: &Array1<f64>, idx: &RiskSetIndex) -> Vec<f64> {
    let order = idx.order();
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    idx.tie_blocks()
        .iter()
        .map(|block| {
            for &j in &order[block.clone()] {
                let r = scores[j];
                if r > max {
                    sum = sum * (max - r).exp() + 1.0;
                    max = r;
                } else {
                    sum += (r - max).exp();
                }
            }
            max + sum.ln()
        })
        .collect()
}

fn events_per_block(ds: &SurvivalDataset, idx: &RiskSetIndex) -> Vec<f64> {
    let status = ds.status();
    let order = idx.order();
    idx.tie_blocks()
        .iter()
        .map(|block| order[block.clone()].iter().filter(|&&j| status[j]).count() as f64)
        .collect()
}

pub(crate) fn nll_from_scores(
    scores: &Array1<f64>,
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    mode: ModeWeights,
) -> f64 {
    let mut total = 0.0;
    if mode.include_logistic {
        total += scores
            .iter()
            .zip(ds.labels())
            .map(|(r, &y)| softplus(-f64::from(y) * r))
            .sum::<f64>();
    }
    if mode.include_cox && !idx.event_positions().is_empty() {
        let log_sums = log_risk_sums(scores, idx);
        let status = ds.status();
        for (i, &r) in scores.iter().enumerate() {
            if status[i] {
                total += log_sums[idx.block_of(i)] - r;
            }
        }
    }
    total
}

/// First derivative of the NLL with respect to each risk score, and a
/// per-sample curvature weight that dominates the score-space Hessian.
///
/// Logistic samples contribute `p(1-p)`. For the Cox term the weight of
/// sample `k` is `Σ_{i: δ_i=1, k∈R(t_i)} π_k^{(i)}`, where `π^{(i)}` is the
/// softmax of the scores over `R(t_i)`; since each risk-set Hessian is
/// `diag(π) - ππᵀ ⪯ diag(π)`, the weights bound the Hessian from above.
pub(crate) struct ScoreDerivatives {
    pub gradient: Array1<f64>,
    pub weights: Array1<f64>,
}

pub(crate) fn score_derivatives(
    scores: &Array1<f64>,
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    mode: ModeWeights,
) -> ScoreDerivatives {
    let n = scores.len();
    let mut gradient = Array1::zeros(n);
    let mut weights = Array1::zeros(n);

    if mode.include_logistic {
        for (i, &y) in ds.labels().iter().enumerate() {
            let y = f64::from(y);
            // σ(-y r): probability assigned to the wrong class
            let q = logistic_probability(-y * scores[i]);
            gradient[i] -= y * q;
            weights[i] += q * (1.0 - q);
        }
    }

    if mode.include_cox && !idx.event_positions().is_empty() {
        let log_sums = log_risk_sums(scores, idx);
        let events = events_per_block(ds, idx);
        // carry[b] = Σ_{b' ≥ b} d_{b'} exp(logS_b - logS_{b'})
        let n_blocks = log_sums.len();
        let mut carry = vec![0.0; n_blocks];
        let mut acc = 0.0;
        for b in (0..n_blocks).rev() {
            if b + 1 < n_blocks {
                acc *= (log_sums[b] - log_sums[b + 1]).exp();
            }
            acc += events[b];
            carry[b] = acc;
        }
        let status = ds.status();
        for k in 0..n {
            let b = idx.block_of(k);
            let w = if carry[b] > 0.0 {
                (scores[k] - log_sums[b]).exp() * carry[b]
            } else {
                0.0
            };
            gradient[k] += w - if status[k] { 1.0 } else { 0.0 };
            weights[k] += w;
        }
    }

    ScoreDerivatives { gradient, weights }
}

/// `Xᵀ v`
pub(crate) fn to_coefficient_space(ds: &SurvivalDataset, v: &Array1<f64>) -> Array1<f64> {
    ds.covariates().t().dot(v)
}

/// `Σ_i w_i x_ij²` for every column `j`.
pub(crate) fn weighted_column_squares(ds: &SurvivalDataset, w: &Array1<f64>) -> Array1<f64> {
    let x = ds.covariates();
    let mut out = Array1::zeros(x.ncols());
    for (row, &wi) in x.rows().into_iter().zip(w) {
        if wi != 0.0 {
            out.scaled_add(wi, &row.mapv(|v| v * v));
        }
    }
    out
}

/// Value of the (unpenalized) negative log-likelihood at `beta`.
pub fn negative_log_likelihood(
    beta: ArrayView1<f64>,
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    mode: impl Into<ModeWeights>,
) -> Result<f64> {
    check_shapes(beta.len(), ds, idx)?;
    let scores = risk_scores(beta, ds)?;
    Ok(nll_from_scores(&scores, ds, idx, mode.into()))
}

/// Exact gradient of [`negative_log_likelihood`] with respect to `beta`.
pub fn gradient(
    beta: ArrayView1<f64>,
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    mode: impl Into<ModeWeights>,
) -> Result<Array1<f64>> {
    check_shapes(beta.len(), ds, idx)?;
    let scores = risk_scores(beta, ds)?;
    let d = score_derivatives(&scores, ds, idx, mode.into());
    Ok(to_coefficient_space(ds, &d.gradient))
}

/// Per-coordinate curvature `w_j` with `w_j ≥ ∂²NLL/∂β_j²` at `beta`.
pub fn curvature_bounds(
    beta: ArrayView1<f64>,
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    mode: impl Into<ModeWeights>,
) -> Result<Array1<f64>> {
    check_shapes(beta.len(), ds, idx)?;
    let scores = risk_scores(beta, ds)?;
    let d = score_derivatives(&scores, ds, idx, mode.into());
    Ok(weighted_column_squares(ds, &d.weights))
}
