//! Independent reference implementations used as test oracles.
//!
//! Nothing here goes through the cumulative-sum code paths of the library:
//! risk sets are enumerated explicitly and pairs are compared one by one.

#![allow(dead_code)]

use coxlogit::{Mode, SurvivalDataset};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standardized random dataset. Times are drawn from a small set of values
/// when `ties` is true so that tie blocks occur.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize, ties: bool, censor_prob: f64) -> SurvivalDataset {
    loop {
        let x = Array2::from_shape_simple_fn((n, p), || rng.sample::<f64, _>(StandardNormal));
        let times = (0..n)
            .map(|_| {
                if ties {
                    rng.random_range(1..=(n / 3).max(2)) as f64
                } else {
                    rng.random_range(0.05..10.0)
                }
            })
            .collect();
        let status = (0..n).map(|_| !rng.random_bool(censor_prob)).collect();
        let labels = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        let raw = SurvivalDataset::with_default_names(x, times, status, labels).unwrap();
        if let Ok((ds, _)) = raw.standardize() {
            return ds;
        }
    }
}

pub fn random_beta(rng: &mut ChaCha8Rng, p: usize, scale: f64) -> Array1<f64> {
    Array1::from_shape_simple_fn(p, || scale * rng.sample::<f64, _>(StandardNormal))
}

/// Negative log-likelihood with every risk set built as `{j | t_j >= t_i}`.
pub fn brute_nll(beta: &Array1<f64>, ds: &SurvivalDataset, mode: Mode) -> f64 {
    let n = ds.n_samples();
    let x = ds.covariates();
    let r: Vec<f64> = (0..n).map(|i| x.row(i).dot(beta)).collect();
    let t = ds.times();
    let mut total = 0.0;
    if mode != Mode::CoxOnly {
        for (&y, &ri) in ds.labels().iter().zip(&r) {
            let z = -f64::from(y) * ri;
            // log(1 + e^z) with a max shift, written independently of the library
            let m = z.max(0.0);
            total += m + ((-m).exp() + (z - m).exp()).ln();
        }
    }
    if mode != Mode::LogisticOnly {
        for i in 0..n {
            if !ds.status()[i] {
                continue;
            }
            let set: Vec<f64> = (0..n).filter(|&j| t[j] >= t[i]).map(|j| r[j]).collect();
            let m = set.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = m + set.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
            total += lse - r[i];
        }
    }
    total
}

pub fn central_difference(f: impl Fn(&Array1<f64>) -> f64, beta: &Array1<f64>, h: f64) -> Array1<f64> {
    let mut g = Array1::zeros(beta.len());
    for j in 0..beta.len() {
        let mut plus = beta.clone();
        let mut minus = beta.clone();
        plus[j] += h;
        minus[j] -= h;
        g[j] = (f(&plus) - f(&minus)) / (2.0 * h);
    }
    g
}

/// Second central difference along each coordinate.
pub fn hessian_diagonal(f: impl Fn(&Array1<f64>) -> f64, beta: &Array1<f64>, h: f64) -> Array1<f64> {
    let f0 = f(beta);
    let mut d = Array1::zeros(beta.len());
    for j in 0..beta.len() {
        let mut plus = beta.clone();
        let mut minus = beta.clone();
        plus[j] += h;
        minus[j] -= h;
        d[j] = (f(&plus) - 2.0 * f0 + f(&minus)) / (h * h);
    }
    d
}

/// `‖a - b‖ / max(‖b‖, 1)`
pub fn relative_error(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let diff = (a - b).mapv(|v| v * v).sum().sqrt();
    let norm = b.mapv(|v| v * v).sum().sqrt();
    diff / norm.max(1.0)
}

/// Minimum of a two-dimensional objective over `[-3, 3]²`: a 0.01 grid
/// followed by successively finer grids around the incumbent.
pub fn grid_minimum(f: impl Fn(f64, f64) -> f64) -> (f64, [f64; 2]) {
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    let mut step = 0.01;
    let steps = 600;
    for a in 0..=steps {
        for b in 0..=steps {
            let (u, v) = (-3.0 + a as f64 * step, -3.0 + b as f64 * step);
            let value = f(u, v);
            if value < best.0 {
                best = (value, [u, v]);
            }
        }
    }
    while step > 1e-8 {
        let center = best.1;
        let fine = step / 10.0;
        for a in -20..=20 {
            for b in -20..=20 {
                let u = (center[0] + a as f64 * fine).clamp(-3.0, 3.0);
                let v = (center[1] + b as f64 * fine).clamp(-3.0, 3.0);
                let value = f(u, v);
                if value < best.0 {
                    best = (value, [u, v]);
                }
            }
        }
        step = fine;
    }
    best
}

/// Harrell's C by enumerating every ordered pair.
pub fn brute_c_index(risks: &[f64], times: &[f64], status: &[bool]) -> Option<f64> {
    let n = risks.len();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if status[i] && times[i] < times[j] {
                den += 1.0;
                if risks[i] > risks[j] {
                    num += 1.0;
                } else if risks[i] == risks[j] {
                    num += 0.5;
                }
            }
        }
    }
    (den > 0.0).then(|| num / den)
}
