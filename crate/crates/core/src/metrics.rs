//! Validation metrics: accuracy, Harrell's C-index, their harmonic mean and
//! feature-recovery counts against a known ground truth.

use crate::error::{Error, Result};
use crate::simulate::SyntheticTruth;

/// Fraction of positions where `predicted` and `actual` agree.
pub fn accuracy(predicted: &[i8], actual: &[i8]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            what: "label vectors",
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hits = predicted.iter().zip(actual).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / actual.len() as f64)
}

/// Harrell's concordance index.
///
/// A pair `(i, j)` is comparable when `t_i < t_j` and sample `i` had an event;
/// it is concordant when `risk_i > risk_j`, and tied risks count one half.
/// Pairs with equal times are never comparable.
///
/// Runs in `O(n log n)`: samples are visited by increasing time, and each
/// event is compared against all strictly later samples through a Fenwick
/// tree over risk ranks.
pub fn concordance_index(risks: &[f64], times: &[f64], status: &[bool]) -> Result<f64> {
    let n = risks.len();
    for (what, len) in [("times", times.len()), ("status", status.len())] {
        if len != n {
            return Err(Error::DimensionMismatch {
                what,
                expected: n,
                found: len,
            });
        }
    }

    // dense ranks of the risks, 1-based
    let mut by_risk: Vec<usize> = (0..n).collect();
    by_risk.sort_by(|&a, &b| risks[a].total_cmp(&risks[b]));
    let mut rank = vec![0usize; n];
    let mut distinct = 0;
    for (pos, &i) in by_risk.iter().enumerate() {
        if pos == 0 || risks[i] != risks[by_risk[pos - 1]] {
            distinct += 1;
        }
        rank[i] = distinct;
    }

    // walk from the latest time backwards, so the tree holds every sample
    // with a strictly greater time when an event block is scored
    let mut by_time: Vec<usize> = (0..n).collect();
    by_time.sort_by(|&a, &b| times[b].total_cmp(&times[a]));
    let mut tree = Fenwick::new(distinct);
    let mut concordant = 0.0;
    let mut tied = 0.0;
    let mut comparable = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end < n && times[by_time[end]] == times[by_time[start]] {
            end += 1;
        }
        let later = tree.total() as f64;
        for &i in &by_time[start..end] {
            if status[i] {
                let below = tree.prefix(rank[i] - 1) as f64;
                let equal = tree.prefix(rank[i]) as f64 - below;
                concordant += below;
                tied += equal;
                comparable += later;
            }
        }
        for &i in &by_time[start..end] {
            tree.add(rank[i]);
        }
        start = end;
    }

    if comparable == 0.0 {
        return Err(Error::NoComparablePairs);
    }
    Ok((concordant + 0.5 * tied) / comparable)
}

struct Fenwick {
    counts: Vec<u64>,
    total: u64,
}

impl Fenwick {
    fn new(size: usize) -> Self {
        Self {
            counts: vec![0; size + 1],
            total: 0,
        }
    }

    fn add(&mut self, mut i: usize) {
        self.total += 1;
        while i < self.counts.len() {
            self.counts[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted ranks `<= i`.
    fn prefix(&self, mut i: usize) -> u64 {
        let mut sum = 0;
        while i > 0 {
            sum += self.counts[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }

    fn total(&self) -> u64 {
        self.total
    }
}

/// `2ab / (a + b)`, or 0 when both are 0.
pub fn harmonic_performance(accuracy: f64, c_index: f64) -> f64 {
    let sum = accuracy + c_index;
    if sum == 0.0 {
        0.0
    } else {
        2.0 * accuracy * c_index / sum
    }
}

/// How many selected features fall in each ground-truth group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeatureRecovery {
    /// Predictive of both survival and labels.
    pub joint: usize,
    pub survival_only: usize,
    pub label_only: usize,
    pub noise: usize,
}

impl FeatureRecovery {
    pub fn total(&self) -> usize {
        self.joint + self.survival_only + self.label_only + self.noise
    }
}

pub fn feature_recovery(selected: &[usize], truth: &SyntheticTruth) -> Result<FeatureRecovery> {
    let p = truth.n_features();
    let mut counts = FeatureRecovery::default();
    for &j in selected {
        if j >= p {
            return Err(Error::DimensionMismatch {
                what: "feature index",
                expected: p,
                found: j,
            });
        }
        let masks = &truth.group_masks;
        if masks.joint.contains(&j) {
            counts.joint += 1;
        } else if masks.survival_only.contains(&j) {
            counts.survival_only += 1;
        } else if masks.label_only.contains(&j) {
            counts.label_only += 1;
        } else {
            counts.noise += 1;
        }
    }
    Ok(counts)
}
