//! Bootstrap replication over aligned pattern counts.
//!
//! A replicate is an n-row resample drawn with replacement from the original
//! dataset. Because every statistic here depends on the data only through
//! pattern counts, resampling is done directly on the aligned buckets with a
//! multinomial draw (sequential conditional binomials), which is
//! distributionally identical to row resampling and costs O(distinct
//! patterns) per replicate. Replicate `r` uses its own RNG stream derived
//! from the master seed, so results do not depend on evaluation order or
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::align::{AlignedDataset, PatternView, ValueAssignment};
use crate::dataset::BinaryDataset;
use crate::seeds::stream_seed;
use crate::stats::measures;
use crate::stats::StatsError;

/// Descriptor of a statistic that can be evaluated on any replicate.
#[derive(Debug, Clone, PartialEq)]
pub enum Statistic {
    /// Degree of dependency between two variables.
    Dependency { i: usize, j: usize },
    /// Degree of conditional dependency given a third variable.
    CondDependency { i: usize, j: usize, given: usize },
    /// Odds ratio of a pair.
    OddRatio { i: usize, j: usize },
    /// Signed odds difference of a pair.
    OddDiff { i: usize, j: usize },
    /// Degree of causal direction at fixed conditioning values.
    CausalDir {
        i: usize,
        j: usize,
        xi_val: u8,
        xj_val: u8,
    },
    /// Conditional probability of a target assignment given another.
    CondProb {
        target: ValueAssignment,
        given: ValueAssignment,
    },
}

impl Statistic {
    /// Stable human-readable identifier used in reports.
    pub fn name(&self) -> String {
        match self {
            Statistic::Dependency { i, j } => format!("dependency({i},{j})"),
            Statistic::CondDependency { i, j, given } => {
                format!("cond_dependency({i},{j}|{given})")
            }
            Statistic::OddRatio { i, j } => format!("odd_ratio({i},{j})"),
            Statistic::OddDiff { i, j } => format!("odd_diff({i},{j})"),
            Statistic::CausalDir { i, j, xi_val, xj_val } => {
                format!("causal_dir({i}={xi_val},{j}={xj_val})")
            }
            Statistic::CondProb { .. } => "cond_prob".to_string(),
        }
    }

    /// Evaluates the statistic on one set of pattern counts.
    pub fn eval(&self, view: PatternView<'_>) -> Result<f64, StatsError> {
        match self {
            Statistic::Dependency { i, j } => measures::dependency(view, *i, *j),
            Statistic::CondDependency { i, j, given } => {
                measures::cond_dependency(view, *i, *j, *given)
            }
            Statistic::OddRatio { i, j } => measures::odd_ratio(view, *i, *j),
            Statistic::OddDiff { i, j } => measures::odd_diff(view, *i, *j),
            Statistic::CausalDir { i, j, xi_val, xj_val } => {
                measures::causal_dir(view, *i, *j, *xi_val, *xj_val)
            }
            Statistic::CondProb { target, given } => {
                view.cond_prob(target, given).map_err(|e| match e {
                    crate::align::AlignError::UndefinedConditional => {
                        StatsError::UndefinedConditional
                    }
                    other => StatsError::Align(other),
                })
            }
        }
    }
}

/// A batch of bootstrap resamples sharing the base alignment's key order.
#[derive(Debug, Clone)]
pub struct ReplicateSet {
    d: usize,
    n: u64,
    keys: Vec<u64>,
    base_counts: Vec<u32>,
    replicate_counts: Vec<Vec<u32>>,
    seed: u64,
}

impl ReplicateSet {
    /// Draws `q` multinomial resamples of the aligned counts.
    pub fn draw(ad: &AlignedDataset, q: usize, seed: u64) -> Self {
        let keys = ad.keys().to_vec();
        let base: Vec<u32> = ad.counts().to_vec();
        let n = ad.n();
        let replicate_counts: Vec<Vec<u32>> = (0..q)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, r as u64));
                resample_counts(&base, n, &mut rng)
            })
            .collect();
        Self {
            d: ad.d(),
            n,
            keys,
            base_counts: base,
            replicate_counts,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.replicate_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicate_counts.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// View of replicate `r`'s counts.
    pub fn view(&self, r: usize) -> PatternView<'_> {
        PatternView {
            d: self.d,
            keys: &self.keys,
            counts: &self.replicate_counts[r],
        }
    }

    /// View of the original (plug-in) counts.
    pub fn base_view(&self) -> PatternView<'_> {
        PatternView {
            d: self.d,
            keys: &self.keys,
            counts: &self.base_counts,
        }
    }

    /// Evaluates a statistic on every replicate, recording undefined
    /// replicates as skipped.
    pub fn evaluate(&self, stat: &Statistic) -> Result<BootstrapDistribution, StatsError> {
        let mut values = Vec::with_capacity(self.len());
        for r in 0..self.len() {
            match stat.eval(self.view(r)) {
                Ok(v) => values.push(v),
                Err(StatsError::UndefinedConditional) | Err(StatsError::DivisionByZero) => {}
                Err(other) => return Err(other),
            }
        }
        Ok(BootstrapDistribution {
            statistic_name: stat.name(),
            requested: self.len(),
            values,
            seed: self.seed,
        })
    }
}

/// Multinomial resample of `n` trials over the bucket masses in `base`.
fn resample_counts(base: &[u32], n: u64, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut out = vec![0u32; base.len()];
    let mut remaining_trials = n;
    let mut remaining_mass = n;
    for (k, &c) in base.iter().enumerate() {
        if remaining_trials == 0 || c == 0 {
            remaining_mass -= c as u64;
            continue;
        }
        if c as u64 >= remaining_mass {
            out[k] = remaining_trials as u32;
            remaining_trials = 0;
            remaining_mass = 0;
            continue;
        }
        let p = c as f64 / remaining_mass as f64;
        let draw = Binomial::new(remaining_trials, p).expect("p in [0,1]").sample(rng);
        out[k] = draw as u32;
        remaining_trials -= draw;
        remaining_mass -= c as u64;
    }
    out
}

/// Replicate values of one statistic, plus the sampling metadata needed to
/// reproduce them.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDistribution {
    /// Identifier of the statistic these replicates estimate.
    pub statistic_name: String,
    /// Values of the statistic on replicates where it was defined.
    pub values: Vec<f64>,
    /// Number of replicates requested.
    pub requested: usize,
    /// Master seed the replicate streams were derived from.
    pub seed: u64,
}

impl BootstrapDistribution {
    /// Number of replicates on which the statistic was defined.
    pub fn effective(&self) -> usize {
        self.values.len()
    }

    /// Number of replicates skipped because the statistic was undefined.
    pub fn skipped(&self) -> usize {
        self.requested - self.values.len()
    }

    /// Mean of the replicate values: the point estimate.
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return f64::NAN;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// True when more than 20% of replicates were skipped; downstream
    /// decisions treat such distributions as unreliable.
    pub fn unreliable(&self) -> bool {
        self.skipped() as f64 > 0.20 * self.requested as f64
    }
}

/// Bootstraps `stat` on `q` resamples of `ds`.
///
/// Deterministic in `(ds, q, seed, stat)`: replicate RNG streams are derived
/// from `seed` by replicate index, independent of scheduling.
pub fn bootstrap(
    ds: &BinaryDataset,
    q: usize,
    seed: u64,
    stat: &Statistic,
) -> Result<BootstrapDistribution, StatsError> {
    if q == 0 {
        return Err(StatsError::NoReplicates);
    }
    let ad = AlignedDataset::from_dataset(ds)?;
    let reps = ReplicateSet::draw(&ad, q, seed);
    reps.evaluate(stat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(rows: &[&[u8]]) -> BinaryDataset {
        let d = rows[0].len();
        BinaryDataset::new(
            (1..=d).map(|i| format!("X{i}")).collect(),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn resample_preserves_total_mass() {
        let ds = dataset(&[&[1, 1], &[1, 0], &[0, 1], &[0, 0], &[1, 1], &[0, 1]]);
        let ad = AlignedDataset::from_dataset(&ds).unwrap();
        let reps = ReplicateSet::draw(&ad, 200, 9);
        for r in 0..reps.len() {
            assert_eq!(reps.view(r).total(), 6);
        }
    }

    #[test]
    fn single_replicate_yields_finite_value() {
        let ds = dataset(&[&[1, 1], &[1, 0], &[0, 1], &[0, 0]]);
        let bd = bootstrap(&ds, 1, 3, &Statistic::Dependency { i: 0, j: 1 }).unwrap();
        assert_eq!(bd.requested, 1);
        assert_eq!(bd.effective(), 1);
        assert!(bd.values[0].is_finite());
    }

    #[test]
    fn constant_pair_gives_degenerate_distribution() {
        // identical columns: every resample reproduces the same statistic
        let ds = dataset(&[&[1, 1], &[1, 1], &[1, 1], &[1, 1]]);
        let bd = bootstrap(&ds, 50, 11, &Statistic::Dependency { i: 0, j: 1 }).unwrap();
        assert!(bd.values.iter().all(|&v| v == bd.values[0]));
    }

    #[test]
    fn bootstrap_is_deterministic_per_seed() {
        let ds = dataset(&[&[1, 1], &[1, 0], &[0, 1], &[0, 0], &[1, 1]]);
        let stat = Statistic::OddDiff { i: 0, j: 1 };
        let a = bootstrap(&ds, 64, 1234, &stat).unwrap();
        let b = bootstrap(&ds, 64, 1234, &stat).unwrap();
        assert_eq!(a.values, b.values);
        let c = bootstrap(&ds, 64, 1235, &stat).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn determinism_is_independent_of_worker_count() {
        let ds = dataset(&[&[1, 1], &[1, 0], &[0, 1], &[0, 0], &[1, 0], &[0, 1]]);
        let stat = Statistic::Dependency { i: 0, j: 1 };
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| bootstrap(&ds, 100, 77, &stat).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| bootstrap(&ds, 100, 77, &stat).unwrap());
        assert_eq!(serial.values, parallel.values);
    }

    #[test]
    fn undefined_replicates_are_skipped_not_zero_filled() {
        // only one row has X1 = 1; resamples that drop it make the
        // conditional undefined
        let mut rows: Vec<&[u8]> = vec![&[0, 0]; 19];
        rows.push(&[1, 1]);
        let ds = dataset(&rows);
        let stat = Statistic::CausalDir {
            i: 0,
            j: 1,
            xi_val: 1,
            xj_val: 1,
        };
        let bd = bootstrap(&ds, 300, 5, &stat).unwrap();
        assert!(bd.skipped() > 0, "expected some skipped replicates");
        assert_eq!(bd.effective() + bd.skipped(), 300);
        assert!(bd.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn bootstrap_mean_tracks_plug_in_statistic() {
        // moderately dependent pair; the bootstrap mean of the dependency
        // statistic stays near its plug-in value
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for _ in 0..120 {
            rows.push(vec![1, 1]);
        }
        for _ in 0..80 {
            rows.push(vec![0, 0]);
        }
        for _ in 0..50 {
            rows.push(vec![1, 0]);
        }
        for _ in 0..50 {
            rows.push(vec![0, 1]);
        }
        let ds = BinaryDataset::new(vec!["a".into(), "b".into()], rows).unwrap();
        let ad = AlignedDataset::from_dataset(&ds).unwrap();
        let plug_in = crate::stats::dependency(ad.view(), 0, 1).unwrap();
        let bd = bootstrap(&ds, 1000, 21, &Statistic::Dependency { i: 0, j: 1 }).unwrap();
        assert!(
            (bd.mean() - plug_in).abs() < 0.02,
            "bootstrap mean {} vs plug-in {plug_in}",
            bd.mean()
        );
    }

    #[test]
    fn zero_replicates_is_an_error() {
        let ds = dataset(&[&[1, 0], &[0, 1]]);
        assert_eq!(
            bootstrap(&ds, 0, 1, &Statistic::OddDiff { i: 0, j: 1 }),
            Err(StatsError::NoReplicates)
        );
    }
}
