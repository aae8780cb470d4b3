//! Causal structure discovery for binary indicator data.
//!
//! This crate infers empirical causal graphs among binary (0/1) variables
//! from tabular data. The pipeline estimates pairwise dependency, association
//! direction, and degree of causal direction from pattern counts, attaches
//! bootstrap confidence intervals and nonparametric tests to each quantity,
//! and assembles a directed graph in three phases: dependency screening,
//! confounder filtering, and edge orientation.
//!
//! It also ships a Bernoulli structural-causal-model simulator, a
//! frequent-pattern baseline, and a benchmark harness that scores inferred
//! graphs against ground truth on directed and transitive tasks.

pub mod align;
pub mod dataset;
pub mod discovery;
pub mod evaluate;
pub mod graph;
pub mod seeds;
pub mod simulate;
pub mod stats;

pub use align::{AlignedDataset, PatternKey, ValueAssignment};
pub use dataset::{BinaryDataset, MpiResult, ValidationReport};
pub use discovery::{DiscoveryConfig, DiscoveryResult};
pub use evaluate::{EvaluationReport, Task};
pub use graph::CausalGraph;
pub use simulate::BscmModel;
