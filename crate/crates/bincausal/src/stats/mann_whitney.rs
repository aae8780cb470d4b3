//! Mann-Whitney U rank-sum test of bootstrap replicates against zero.
//!
//! The null location is represented by a degenerate sample of zeros with the
//! same length as the replicate vector. The normal approximation carries the
//! usual tie correction and a 0.5 continuity correction; when every pooled
//! value is identical the variance vanishes and the p-value is 1.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::stats::{percentile_ci, BootstrapDistribution, ConfidenceInterval, StatsError};

/// Alternative hypothesis for the test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// H1: the replicate distribution differs from zero (used for signed
    /// statistics such as the odds difference and the causal direction).
    TwoSided,
    /// H1: the replicate distribution exceeds zero (used for nonnegative
    /// statistics such as the dependency degree).
    Greater,
}

/// Outcome of a hypothesis test, bundled with the estimation statistics for
/// the same replicate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisResult {
    pub p_value: f64,
    /// Exactly `p_value < alpha`.
    pub reject_null: bool,
    pub alpha: f64,
    /// Percentile interval at level `1 - alpha`.
    pub ci: ConfidenceInterval,
    /// Mean of the replicate values.
    pub mean: f64,
}

/// Ranks the pooled sample with average ranks for ties; returns the rank sum
/// of the first `m` entries and the tie-correction term `sum(t^3 - t)`.
fn rank_sum_vs_zeros(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    let mut pooled: Vec<(f64, bool)> = values.iter().map(|&v| (v, true)).collect();
    pooled.extend(std::iter::repeat((0.0, false)).take(m));
    pooled.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));

    let mut r_values = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let t = (j - i) as f64;
        let avg_rank = (i + j + 1) as f64 / 2.0; // ranks are 1-based
        for entry in &pooled[i..j] {
            if entry.1 {
                r_values += avg_rank;
            }
        }
        tie_term += t * t * t - t;
        i = j;
    }
    (r_values, tie_term)
}

/// Mann-Whitney U test of `bd.values` against an equal-length all-zero
/// sample.
///
/// Requires at least 8 effective replicates for the normal approximation.
/// The returned result also carries the replicate mean and the percentile
/// interval at level `1 - alpha`.
pub fn mw_test(
    bd: &BootstrapDistribution,
    alpha: f64,
    alternative: Alternative,
) -> Result<HypothesisResult, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidAlpha(alpha));
    }
    let m = bd.effective();
    if m < 8 {
        return Err(StatsError::TooFewReplicates { needed: 8, got: m });
    }

    let (r_values, tie_term) = rank_sum_vs_zeros(&bd.values);
    let mf = m as f64;
    let n_total = 2.0 * mf;
    let u = r_values - mf * (mf + 1.0) / 2.0;
    let mean_u = mf * mf / 2.0;
    let variance = mf * mf / 12.0 * ((n_total + 1.0) - tie_term / (n_total * (n_total - 1.0)));

    let p_value = if variance <= 0.0 {
        // all pooled values identical: no evidence against the null
        1.0
    } else {
        let sd = variance.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        match alternative {
            Alternative::TwoSided => {
                let z = ((u - mean_u).abs() - 0.5).max(0.0) / sd;
                (2.0 * (1.0 - normal.cdf(z))).min(1.0)
            }
            Alternative::Greater => {
                let z = (u - mean_u - 0.5) / sd;
                1.0 - normal.cdf(z)
            }
        }
    };

    Ok(HypothesisResult {
        p_value,
        reject_null: p_value < alpha,
        alpha,
        ci: percentile_ci(bd, 1.0 - alpha)?,
        mean: bd.mean(),
    })
}
