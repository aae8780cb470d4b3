//! Percentile confidence intervals.

use serde::Serialize;

use crate::stats::{BootstrapDistribution, StatsError};

/// A two-sided empirical confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    /// Nominal coverage, e.g. 0.95.
    pub level: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// True when the interval lies strictly on one side of zero.
    pub fn excludes_zero(&self) -> bool {
        self.lower > 0.0 || self.upper < 0.0
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Empirical quantile with linear interpolation between order statistics
/// (the convention numpy and R's default quantile type share).
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let m = sorted.len();
    if m == 1 {
        return sorted[0];
    }
    let h = (m - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if lo + 1 >= m {
        return sorted[m - 1];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Percentile interval of the replicate values at the given coverage level:
/// the empirical (alpha/2, 1 - alpha/2) quantiles with alpha = 1 - level.
pub fn percentile_ci(
    bd: &BootstrapDistribution,
    level: f64,
) -> Result<ConfidenceInterval, StatsError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidLevel(level));
    }
    if bd.effective() < 2 {
        return Err(StatsError::TooFewReplicates {
            needed: 2,
            got: bd.effective(),
        });
    }
    let mut sorted = bd.values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("replicate values are finite"));
    let tail = (1.0 - level) / 2.0;
    Ok(ConfidenceInterval {
        lower: quantile(&sorted, tail),
        upper: quantile(&sorted, 1.0 - tail),
        level,
    })
}
