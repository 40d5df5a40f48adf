//! Pathwise coordinate descent for the elastic-net penalized objective
//!
//! ```text
//! F(β) = (2/n)·NLL(β) + λ·[α‖β‖₁ + ((1-α)/2)‖β‖₂²]
//! ```
//!
//! Each outer iteration replaces the NLL by a quadratic model around the
//! current coefficients, built from the score-space gradient and per-sample
//! curvature weights (see [`crate::likelihood`]). The model is minimized by
//! cyclic coordinate descent with soft-thresholding; the resulting step is
//! accepted only if it does not increase `F`, halving it otherwise, and
//! lengthened while `F` keeps falling.

use ndarray::{Array1, ArrayView1, Zip};

use crate::data::{FitResult, Mode, RiskSetIndex, Standardizer, SurvivalDataset};
use crate::error::{Error, Result};
use crate::likelihood::{
    self, check_shapes, logistic_probability, nll_from_scores, score_derivatives, weighted_column_squares,
};

/// Relative slack when deciding that a coordinate sits in the soft-threshold
/// dead zone, so that `λ = lambda_max` yields exact zeros for any `α`.
const DEAD_ZONE_SLACK: f64 = 1e-12;
const MAX_STEP_HALVINGS: usize = 40;
const MAX_STEP_DOUBLINGS: usize = 20;
const INNER_TOL_FACTOR: f64 = 1e-4;
const MAX_BISECTIONS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Elastic-net mix in (0, 1]; 1 is the lasso.
    pub alpha: f64,
    /// Stop when `max_j w_j·Δβ_j² < tol`, with `w_j` the unscaled NLL
    /// curvature bound of coordinate `j`.
    pub tol: f64,
    pub max_outer: usize,
    /// Cap on coordinate sweeps per outer iteration.
    pub max_inner: usize,
    pub active_set: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            tol: 1e-7,
            max_outer: 100,
            max_inner: 1000,
            active_set: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidConfig("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig {
    pub n_lambdas: usize,
    pub lambda_min_ratio: f64,
    pub target_features: usize,
    /// Bisect in λ when the grid overshoots the target count.
    pub refine: bool,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            n_lambdas: 100,
            lambda_min_ratio: 1e-3,
            target_features: 10,
            refine: true,
        }
    }
}

impl PathConfig {
    pub fn validate(&self, p: usize) -> Result<()> {
        if self.n_lambdas < 2 {
            return Err(Error::InvalidConfig("n_lambdas must be at least 2".into()));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda_min_ratio must lie in (0, 1), got {}",
                self.lambda_min_ratio
            )));
        }
        if self.target_features > p {
            return Err(Error::InvalidConfig(format!(
                "target of {} features exceeds the {p} available",
                self.target_features
            )));
        }
        Ok(())
    }
}

/// Fits along a strictly decreasing sequence of λ values.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub fits: Vec<FitResult>,
    /// Index in `fits` of the model meeting the feature-count target.
    pub selected: usize,
}

impl PathResult {
    pub fn selected_fit(&self) -> &FitResult {
        &self.fits[self.selected]
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.fits.iter().map(|f| f.lambda).collect()
    }
}

/// `sign(z)·max(|z| - γ, 0)`
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// `λ·[α‖β‖₁ + ((1-α)/2)‖β‖₂²]`
pub fn penalty(beta: ArrayView1<f64>, lambda: f64, alpha: f64) -> f64 {
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let l2: f64 = beta.iter().map(|b| b * b).sum();
    lambda * (alpha * l1 + 0.5 * (1.0 - alpha) * l2)
}

fn loss_scale(ds: &SurvivalDataset) -> f64 {
    2.0 / ds.n_samples() as f64
}

/// `(2/n)·NLL(β) + λ·Ω(β)`
pub fn penalized_objective(
    beta: ArrayView1<f64>,
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    lambda: f64,
    alpha: f64,
    mode: Mode,
) -> Result<f64> {
    let nll = likelihood::negative_log_likelihood(beta, ds, idx, mode)?;
    Ok(loss_scale(ds) * nll + penalty(beta, lambda, alpha))
}

/// `β + t(proposal - β)` for `t > 1`, keeping zeros of the proposal and
/// clipping coordinates that would cross zero.
fn extrapolate(beta: &Array1<f64>, proposal: &Array1<f64>, t: f64) -> Array1<f64> {
    Zip::from(beta).and(proposal).map_collect(|&b, &q| {
        let c = b + t * (q - b);
        if q == 0.0 || c.signum() != q.signum() {
            0.0
        } else {
            c
        }
    })
}

fn column_gradient(ds: &SurvivalDataset, j: usize, residual: &Array1<f64>) -> f64 {
    ds.covariates().column(j).dot(residual)
}

/// Smallest λ at which `β = 0` is optimal: `max_j |(2/n)·g_j(0)| / α`.
pub fn lambda_max(ds: &SurvivalDataset, idx: &RiskSetIndex, mode: Mode, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    check_shapes(ds.n_features(), ds, idx)?;
    let scores = Array1::zeros(ds.n_samples());
    let d = score_derivatives(&scores, ds, idx, mode.weights());
    let scale = loss_scale(ds);
    let max = (0..ds.n_features())
        .map(|j| (scale * column_gradient(ds, j, &d.gradient)).abs())
        .fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::DegenerateDataset);
    }
    Ok(max / alpha)
}

/// Minimizes the penalized objective at a single λ.
///
/// Non-convergence within `config.max_outer` is reported through
/// [`FitResult::converged`], not as an error.
pub fn fit(
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    lambda: f64,
    config: &SolverConfig,
    mode: Mode,
    warm_start: Option<ArrayView1<f64>>,
) -> Result<FitResult> {
    config.validate()?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let p = ds.n_features();
    let mut beta = match warm_start {
        Some(w) => {
            check_shapes(w.len(), ds, idx)?;
            w.to_owned()
        }
        None => {
            check_shapes(p, ds, idx)?;
            Array1::zeros(p)
        }
    };

    let weights = mode.weights();
    let scale = loss_scale(ds);
    let alpha = config.alpha;
    let l1 = lambda * alpha;
    let l2 = lambda * (1.0 - alpha);
    let x = ds.covariates();

    let objective_at = |beta: &Array1<f64>, scores: &Array1<f64>| {
        scale * nll_from_scores(scores, ds, idx, weights) + penalty(beta.view(), lambda, alpha)
    };

    // The quadratic subproblems are solved more tightly than the outer
    // criterion so that a small outer step means a near-stationary point.
    let inner_tol = config.tol * INNER_TOL_FACTOR;

    let mut scores = x.dot(&beta);
    let mut objective = objective_at(&beta, &scores);
    let mut trace = vec![objective];
    let mut converged = false;
    let mut small_step = false;
    let mut n_iterations = 0;

    while n_iterations < config.max_outer {
        n_iterations += 1;
        let d = score_derivatives(&scores, ds, idx, weights);
        let curvature = weighted_column_squares(ds, &d.weights);

        // Quadratic model gradient in score space: u + W ∘ X(β_new - β)
        let mut residual = d.gradient.clone();
        let mut proposal = beta.clone();

        let update = |j: usize, proposal: &mut Array1<f64>, residual: &mut Array1<f64>| -> f64 {
            let w = curvature[j];
            let current = proposal[j];
            let g = column_gradient(ds, j, residual);
            let z = scale * (w * current - g);
            let denom = scale * w + l2;
            let next = if z.abs() <= l1 * (1.0 + DEAD_ZONE_SLACK) {
                0.0
            } else if denom > 0.0 {
                soft_threshold(z, l1) / denom
            } else {
                current
            };
            let delta = next - current;
            if delta == 0.0 {
                return 0.0;
            }
            proposal[j] = next;
            let column = x.column(j);
            for ((r, &wi), &xij) in residual.iter_mut().zip(&d.weights).zip(column) {
                *r += wi * xij * delta;
            }
            w * delta * delta
        };

        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let mut max_change = 0.0f64;
            for j in 0..p {
                max_change = max_change.max(update(j, &mut proposal, &mut residual));
            }
            if max_change < inner_tol || sweeps >= config.max_inner {
                break;
            }
            if config.active_set {
                let active: Vec<usize> = (0..p).filter(|&j| proposal[j] != 0.0).collect();
                loop {
                    sweeps += 1;
                    let mut change = 0.0f64;
                    for &j in &active {
                        change = change.max(update(j, &mut proposal, &mut residual));
                    }
                    if change < inner_tol || sweeps >= config.max_inner {
                        break;
                    }
                }
                if sweeps >= config.max_inner {
                    break;
                }
            }
        }

        let step = &proposal - &beta;
        let step_size = step.iter().zip(&curvature).map(|(s, w)| w * s * s).fold(0.0, f64::max);
        if step_size == 0.0 {
            converged = true;
            break;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_STEP_HALVINGS {
            let candidate = if t == 1.0 {
                proposal.clone()
            } else {
                &beta + &(&step * t)
            };
            let candidate_scores = x.dot(&candidate);
            let value = objective_at(&candidate, &candidate_scores);
            if value <= objective {
                accepted = Some((candidate, candidate_scores, value));
                break;
            }
            t *= 0.5;
        }
        // The Cox curvature bound can be loose, which makes full steps short
        // of the minimizer along a consistent direction. Keep doubling while
        // the objective keeps falling.
        if let (1.0, Some((_, _, value))) = (t, &accepted) {
            let mut best = *value;
            for _ in 0..MAX_STEP_DOUBLINGS {
                let candidate = extrapolate(&beta, &proposal, 2.0 * t);
                let candidate_scores = x.dot(&candidate);
                let value = objective_at(&candidate, &candidate_scores);
                if value >= best {
                    break;
                }
                t *= 2.0;
                best = value;
                accepted = Some((candidate, candidate_scores, value));
            }
        }
        match accepted {
            Some((candidate, candidate_scores, value)) => {
                beta = candidate;
                scores = candidate_scores;
                objective = value;
                trace.push(objective);
                // A halved step is no evidence of stationarity, so the change
                // is measured at no less than the full model step. One small
                // step can come from slow linear progress; two in a row are
                // required.
                if t.max(1.0).powi(2) * step_size < config.tol {
                    if small_step {
                        converged = true;
                        break;
                    }
                    small_step = true;
                } else {
                    small_step = false;
                }
            }
            None => {
                // no decrease at any step length: numerically stationary
                converged = step_size < config.tol.sqrt();
                break;
            }
        }
    }

    Ok(FitResult {
        beta,
        lambda,
        alpha,
        mode,
        objective,
        n_iterations,
        converged,
        objective_trace: trace,
    })
}

/// Largest violation of the elastic-net optimality conditions at `fit.beta`.
///
/// For `β_j ≠ 0` this is `|(2/n)g_j + λ(1-α)β_j + λα·sign(β_j)|`; for
/// `β_j = 0` it is `max(|(2/n)g_j| - λα, 0)`.
pub fn kkt_violation(fit: &FitResult, ds: &SurvivalDataset, idx: &RiskSetIndex) -> Result<f64> {
    let g = likelihood::gradient(fit.beta.view(), ds, idx, fit.mode)?;
    let scale = loss_scale(ds);
    let l1 = fit.lambda * fit.alpha;
    let l2 = fit.lambda * (1.0 - fit.alpha);
    Ok(fit
        .beta
        .iter()
        .zip(&g)
        .map(|(&b, &gj)| {
            let gj = scale * gj;
            if b != 0.0 {
                (gj + l2 * b + l1 * b.signum()).abs()
            } else {
                (gj.abs() - l1).max(0.0)
            }
        })
        .fold(0.0, f64::max))
}

/// Log-spaced grid from `lambda_max` down to `lambda_max·ratio`.
pub fn lambda_grid(lambda_max: f64, config: &PathConfig) -> Vec<f64> {
    let last = (config.n_lambdas - 1) as f64;
    (0..config.n_lambdas)
        .map(|i| {
            if i == 0 {
                lambda_max
            } else {
                lambda_max * config.lambda_min_ratio.powf(i as f64 / last)
            }
        })
        .collect()
}

/// Follows the path from `λ_max` with warm starts until the fit has at least
/// `target_features` nonzero coefficients.
///
/// When refinement is on and the grid jumps past the target, λ is bisected
/// (geometrically) between the two bracketing grid points. The refined fit
/// is inserted between them in `fits`.
pub fn regularization_path(
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    path_config: &PathConfig,
    solver_config: &SolverConfig,
    mode: Mode,
) -> Result<PathResult> {
    solver_config.validate()?;
    path_config.validate(ds.n_features())?;
    let target = path_config.target_features;
    let lmax = lambda_max(ds, idx, mode, solver_config.alpha)?;
    let grid = lambda_grid(lmax, path_config);

    let mut fits: Vec<FitResult> = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let warm = fits.last().map(|f| f.beta.view());
        let current = fit(ds, idx, lambda, solver_config, mode, warm)?;
        let count = current.n_nonzero();
        fits.push(current);
        if count < target {
            continue;
        }
        let last = fits.len() - 1;
        let selected = last;
        if count > target && path_config.refine && last > 0 {
            let refined = bisect_for_target(ds, idx, solver_config, mode, &fits[last - 1], &fits[last], target)?;
            if let Some(refined) = refined {
                fits.insert(last, refined);
            }
        }
        return Ok(PathResult { fits, selected });
    }

    let max_achieved = fits.iter().map(FitResult::n_nonzero).max().unwrap_or(0);
    let last = fits.len() - 1;
    Err(Error::TargetUnreachable {
        target,
        max_achieved,
        partial: Box::new(PathResult { fits, selected: last }),
    })
}

/// Bisects λ in `(lower.lambda, upper.lambda)`, where `upper` has fewer than
/// `target` nonzeros and `lower` more. Returns a fit with exactly `target`
/// nonzeros if one is found, otherwise the interior fit with the fewest
/// nonzeros above the target, or `None` if no interior fit beat `lower`.
fn bisect_for_target(
    ds: &SurvivalDataset,
    idx: &RiskSetIndex,
    config: &SolverConfig,
    mode: Mode,
    upper: &FitResult,
    lower: &FitResult,
    target: usize,
) -> Result<Option<FitResult>> {
    let mut hi = upper.lambda;
    let mut lo = lower.lambda;
    let mut hi_beta = upper.beta.clone();
    let mut best_above: Option<FitResult> = None;
    let mut best_count = lower.n_nonzero();

    for _ in 0..MAX_BISECTIONS {
        let mid = (hi * lo).sqrt();
        if !(mid < hi && mid > lo) {
            break;
        }
        let candidate = fit(ds, idx, mid, config, mode, Some(hi_beta.view()))?;
        let count = candidate.n_nonzero();
        if count == target {
            return Ok(Some(candidate));
        }
        if count < target {
            hi = mid;
            hi_beta = candidate.beta;
        } else {
            lo = mid;
            if count < best_count {
                best_count = count;
                best_above = Some(candidate);
            }
        }
    }
    Ok(best_above)
}

/// `β·standardize(x)` for one raw covariate row.
pub fn predict_risk(fit: &FitResult, x: ArrayView1<f64>, standardizer: &Standardizer) -> Result<f64> {
    if x.len() != fit.beta.len() {
        return Err(Error::DimensionMismatch {
            what: "covariate row",
            expected: fit.beta.len(),
            found: x.len(),
        });
    }
    let z = standardizer.transform_row(x)?;
    Ok(fit.beta.dot(&z))
}

pub fn predict_probability(fit: &FitResult, x: ArrayView1<f64>, standardizer: &Standardizer) -> Result<f64> {
    predict_risk(fit, x, standardizer).map(logistic_probability)
}

/// `+1` iff the class probability is at least ½ (risk ≥ 0).
pub fn predict_label(fit: &FitResult, x: ArrayView1<f64>, standardizer: &Standardizer) -> Result<i8> {
    predict_risk(fit, x, standardizer).map(label_from_risk)
}

pub fn label_from_risk(risk: f64) -> i8 {
    if risk >= 0.0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize) -> SurvivalDataset {
        let x = Array2::from_shape_fn((n, p), |_| rng.random_range(-2.0..2.0));
        let times = (0..n).map(|_| rng.random_range(0.1..5.0)).collect();
        let status = (0..n).map(|_| rng.random_bool(0.7)).collect();
        let labels = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        let raw = SurvivalDataset::with_default_names(x, times, status, labels).unwrap();
        raw.standardize().unwrap().0
    }

    #[test]
    fn soft_threshold_values() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(1.0, 1.0), 0.0);
    }

    #[test]
    fn zero_at_and_above_lambda_max() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for alpha in [1.0, 0.5, 0.3] {
            let ds = random_dataset(&mut rng, 30, 5);
            let idx = RiskSetIndex::build(&ds);
            let config = SolverConfig {
                alpha,
                ..Default::default()
            };
            for mode in Mode::ALL {
                let lmax = lambda_max(&ds, &idx, mode, alpha).unwrap();
                for factor in [1.0, 1.001] {
                    let f = fit(&ds, &idx, factor * lmax, &config, mode, None).unwrap();
                    assert!(f.beta.iter().all(|&b| b == 0.0), "{mode} alpha={alpha}");
                    assert_eq!(f.n_iterations, 1);
                    assert!(f.converged);
                }
                let f = fit(&ds, &idx, 0.5 * lmax, &config, mode, None).unwrap();
                assert!(f.n_nonzero() > 0);
            }
        }
    }

    #[test]
    fn objective_trace_is_monotone_and_kkt_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let ds = random_dataset(&mut rng, 40, 8);
            let idx = RiskSetIndex::build(&ds);
            for mode in Mode::ALL {
                let lmax = lambda_max(&ds, &idx, mode, 1.0).unwrap();
                let f = fit(&ds, &idx, 0.1 * lmax, &SolverConfig::default(), mode, None).unwrap();
                assert!(f.converged);
                for pair in f.objective_trace.windows(2) {
                    assert!(pair[1] <= pair[0] + 1e-12);
                }
                assert!(kkt_violation(&f, &ds, &idx).unwrap() < 1e-4);
            }
        }
    }

    #[test]
    fn elastic_net_kkt() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ds = random_dataset(&mut rng, 50, 6);
        let idx = RiskSetIndex::build(&ds);
        let config = SolverConfig {
            alpha: 0.4,
            ..Default::default()
        };
        for mode in Mode::ALL {
            let lmax = lambda_max(&ds, &idx, mode, 0.4).unwrap();
            let f = fit(&ds, &idx, 0.05 * lmax, &config, mode, None).unwrap();
            assert!(f.converged);
            assert!(kkt_violation(&f, &ds, &idx).unwrap() < 1e-4);
        }
    }

    #[test]
    fn path_selects_zero_model_for_zero_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ds = random_dataset(&mut rng, 30, 6);
        let idx = RiskSetIndex::build(&ds);
        let path = regularization_path(
            &ds,
            &idx,
            &PathConfig {
                target_features: 0,
                ..Default::default()
            },
            &SolverConfig::default(),
            Mode::Coxlogit,
        )
        .unwrap();
        assert_eq!(path.selected, 0);
        assert_eq!(path.fits.len(), 1);
        assert_eq!(path.selected_fit().n_nonzero(), 0);
    }

    #[test]
    fn path_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for target in [1, 3, 5] {
            let ds = random_dataset(&mut rng, 60, 8);
            let idx = RiskSetIndex::build(&ds);
            for mode in Mode::ALL {
                let config = PathConfig {
                    target_features: target,
                    ..Default::default()
                };
                let path = regularization_path(&ds, &idx, &config, &SolverConfig::default(), mode).unwrap();
                assert_eq!(path.fits[0].n_nonzero(), 0);
                for pair in path.fits.windows(2) {
                    assert!(pair[1].lambda < pair[0].lambda);
                }
                assert!(path.selected_fit().n_nonzero() >= target);
                let before = &path.fits[..path.selected];
                assert!(before.iter().all(|f| f.n_nonzero() < target));
            }
        }
    }

    #[test]
    fn unreachable_target_reports_partial_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ds = random_dataset(&mut rng, 30, 6);
        let idx = RiskSetIndex::build(&ds);
        let config = PathConfig {
            target_features: 6,
            n_lambdas: 3,
            lambda_min_ratio: 0.9,
            refine: true,
        };
        match regularization_path(&ds, &idx, &config, &SolverConfig::default(), Mode::CoxOnly) {
            Err(Error::TargetUnreachable {
                partial, max_achieved, ..
            }) => {
                assert_eq!(partial.fits.len(), 3);
                assert!(max_achieved < 6);
            }
            other => panic!("expected unreachable target, got {other:?}"),
        }
    }

    #[test]
    fn warm_and_cold_starts_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ds = random_dataset(&mut rng, 50, 7);
        let idx = RiskSetIndex::build(&ds);
        let path = regularization_path(
            &ds,
            &idx,
            &PathConfig {
                target_features: 5,
                ..Default::default()
            },
            &SolverConfig::default(),
            Mode::Coxlogit,
        )
        .unwrap();
        for warm in &path.fits {
            let cold = fit(&ds, &idx, warm.lambda, &SolverConfig::default(), Mode::Coxlogit, None).unwrap();
            assert!((cold.objective - warm.objective).abs() < 1e-6);
        }
    }

    #[test]
    fn predictions_follow_risk_sign() {
        let f = FitResult {
            beta: array![0.5, 0.0, -2.0],
            lambda: 0.1,
            alpha: 1.0,
            mode: Mode::Coxlogit,
            objective: 0.0,
            n_iterations: 1,
            converged: true,
            objective_trace: vec![0.0],
        };
        let s = Standardizer {
            means: vec![1.0, 0.0, 2.0],
            sds: vec![2.0, 1.0, 0.5],
        };
        let x = array![3.0, 100.0, 2.5];
        // 0.5·(3-1)/2 - 2·(2.5-2)/0.5 = 0.5 - 2 = -1.5
        let risk = predict_risk(&f, x.view(), &s).unwrap();
        assert!((risk + 1.5).abs() < 1e-15);
        let moved = array![3.0, -7.0, 2.5];
        assert_eq!(predict_risk(&f, moved.view(), &s).unwrap(), risk);
        assert_eq!(predict_label(&f, x.view(), &s).unwrap(), -1);
        assert!((predict_probability(&f, x.view(), &s).unwrap() - logistic_probability(-1.5)).abs() < 1e-15);

        let zero = FitResult {
            beta: Array1::zeros(3),
            ..f
        };
        assert_eq!(predict_risk(&zero, x.view(), &s).unwrap(), 0.0);
        assert_eq!(predict_probability(&zero, x.view(), &s).unwrap(), 0.5);
        assert_eq!(predict_label(&zero, x.view(), &s).unwrap(), 1);
        assert!(predict_risk(&zero, array![1.0].view(), &s).is_err());
    }
}
