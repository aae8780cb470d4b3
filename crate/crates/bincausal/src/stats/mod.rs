//! Statistics layer: plug-in dependency/association/direction measures,
//! bootstrap replication over pattern counts, percentile confidence
//! intervals, and the Mann-Whitney rank-sum test.

mod bootstrap;
mod interval;
mod mann_whitney;
mod measures;

pub use bootstrap::{bootstrap, BootstrapDistribution, ReplicateSet, Statistic};
pub use interval::{percentile_ci, ConfidenceInterval};
pub use mann_whitney::{mw_test, Alternative, HypothesisResult};
pub use measures::{causal_dir, cond_dependency, dependency, odd_diff, odd_ratio};

use thiserror::Error;

/// Errors from the statistics layer.
#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("variable indices must be distinct")]
    SameVariable,
    #[error("variable index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("odd ratio undefined: an off-diagonal joint cell is empty")]
    DivisionByZero,
    #[error("conditional undefined: conditioning event has no support")]
    UndefinedConditional,
    #[error("need at least {needed} effective replicates, got {got}")]
    TooFewReplicates { needed: usize, got: usize },
    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error("significance level must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("replicate count must be at least 1")]
    NoReplicates,
    #[error(transparent)]
    Align(#[from] crate::align::AlignError),
}
