//! Pattern alignment: buckets identical rows under an integer encoding and
//! answers empirical (conditional) probability queries from the counts.
//!
//! A row `(x_1, ..., x_d)` is encoded as `w = sum_{k=0}^{d-1} x_{d-k} * 2^k`,
//! i.e. the last variable is the least-significant bit. Instead of
//! materialising all `2^d` buckets, only patterns that actually occur are
//! stored, so memory is bounded by the number of distinct rows.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dataset::BinaryDataset;

/// Errors from encoding and probability queries.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignError {
    #[error("row width {0} exceeds the supported maximum of 63 variables")]
    WidthExceeded(usize),
    #[error("row width must be at least 1")]
    EmptyRow,
    #[error("row element at position {0} is {1}; expected 0 or 1")]
    NonBinaryElement(usize, u8),
    #[error("variable index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("duplicate variable index {0} in assignment")]
    DuplicateIndex(usize),
    #[error("target and conditioning assignments share variable index {0}")]
    OverlappingAssignments(usize),
    #[error("target assignment must be non-empty")]
    EmptyTarget,
    #[error("conditioning event has no support (no row matches)")]
    UndefinedConditional,
}

/// Integer encoding of one binary row; the last variable maps to bit 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternKey(pub u64);

/// Encodes a binary row into its pattern key.
pub fn encode(row: &[u8]) -> Result<PatternKey, AlignError> {
    let d = row.len();
    if d == 0 {
        return Err(AlignError::EmptyRow);
    }
    if d > 63 {
        return Err(AlignError::WidthExceeded(d));
    }
    let mut w = 0u64;
    for (pos, &x) in row.iter().enumerate() {
        if x > 1 {
            return Err(AlignError::NonBinaryElement(pos, x));
        }
        // variable at 0-based position pos occupies bit d-1-pos
        w |= (x as u64) << (d - 1 - pos);
    }
    Ok(PatternKey(w))
}

/// Inverse of [`encode`] for a known dimension.
pub fn decode(key: PatternKey, d: usize) -> Vec<u8> {
    (0..d).map(|pos| ((key.0 >> (d - 1 - pos)) & 1) as u8).collect()
}

/// A set of `(variable index, binary value)` constraints.
///
/// The empty assignment is valid and denotes no conditioning.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValueAssignment {
    pairs: Vec<(usize, u8)>,
}

impl ValueAssignment {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds an assignment; indices must be mutually distinct and values 0/1.
    pub fn new(pairs: impl IntoIterator<Item = (usize, u8)>) -> Result<Self, AlignError> {
        let mut seen: Vec<usize> = Vec::new();
        let mut out = Vec::new();
        for (idx, val) in pairs {
            if val > 1 {
                return Err(AlignError::NonBinaryElement(idx, val));
            }
            if seen.contains(&idx) {
                return Err(AlignError::DuplicateIndex(idx));
            }
            seen.push(idx);
            out.push((idx, val));
        }
        Ok(Self { pairs: out })
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, u8)] {
        &self.pairs
    }

    /// Bit mask / wanted-bits pair for dimension `d`.
    fn mask_want(&self, d: usize) -> Result<(u64, u64), AlignError> {
        let mut mask = 0u64;
        let mut want = 0u64;
        for &(idx, val) in &self.pairs {
            if idx >= d {
                return Err(AlignError::IndexOutOfRange(idx, d));
            }
            let bit = d - 1 - idx;
            mask |= 1 << bit;
            if val == 1 {
                want |= 1 << bit;
            }
        }
        Ok((mask, want))
    }
}

/// Sparse multiset of row patterns: the alignment of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedDataset {
    d: usize,
    n: u64,
    keys: Vec<u64>,
    counts: Vec<u32>,
}

impl AlignedDataset {
    /// Buckets the rows of `ds` by pattern.
    pub fn from_dataset(ds: &BinaryDataset) -> Result<Self, AlignError> {
        let d = ds.d();
        let mut buckets: BTreeMap<u64, u32> = BTreeMap::new();
        for row in ds.rows() {
            let key = encode(row)?;
            *buckets.entry(key.0).or_insert(0) += 1;
        }
        let mut keys = Vec::with_capacity(buckets.len());
        let mut counts = Vec::with_capacity(buckets.len());
        for (k, c) in buckets {
            keys.push(k);
            counts.push(c);
        }
        Ok(Self {
            d,
            n: ds.n() as u64,
            keys,
            counts,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of distinct patterns.
    pub fn num_buckets(&self) -> usize {
        self.keys.len()
    }

    /// Occurrence count of a pattern (0 if absent).
    pub fn count(&self, key: PatternKey) -> u32 {
        match self.keys.binary_search(&key.0) {
            Ok(i) => self.counts[i],
            Err(_) => 0,
        }
    }

    /// Iterates `(key, count)` pairs in ascending key order.
    pub fn buckets(&self) -> impl Iterator<Item = (PatternKey, u32)> + '_ {
        self.keys
            .iter()
            .zip(&self.counts)
            .map(|(&k, &c)| (PatternKey(k), c))
    }

    pub(crate) fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub(crate) fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Borrowed view over the counts, usable by the statistics layer.
    pub fn view(&self) -> PatternView<'_> {
        PatternView {
            d: self.d,
            keys: &self.keys,
            counts: &self.counts,
        }
    }

    /// Estimates `P(Y = y | Z = z)` by counting matching patterns.
    ///
    /// `y` must be non-empty and index-disjoint from `z`; an empty `z`
    /// conditions on the whole dataset. Returns
    /// [`AlignError::UndefinedConditional`] when no row matches `z`.
    pub fn cond_prob(&self, y: &ValueAssignment, z: &ValueAssignment) -> Result<f64, AlignError> {
        self.view().cond_prob(y, z)
    }
}

/// A lightweight borrowed view of pattern counts.
///
/// Bootstrap replicates reuse the key slice of the base alignment with their
/// own count vectors, so every statistic in this crate is written against
/// this view rather than against [`AlignedDataset`] directly.
#[derive(Debug, Clone, Copy)]
pub struct PatternView<'a> {
    pub(crate) d: usize,
    pub(crate) keys: &'a [u64],
    pub(crate) counts: &'a [u32],
}

impl<'a> PatternView<'a> {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    #[inline]
    fn bit(&self, key: u64, var: usize) -> usize {
        ((key >> (self.d - 1 - var)) & 1) as usize
    }

    /// Count of rows whose bits match `(mask, want)`.
    fn count_masked(&self, mask: u64, want: u64) -> u64 {
        self.keys
            .iter()
            .zip(self.counts)
            .filter(|(&k, _)| k & mask == want)
            .map(|(_, &c)| c as u64)
            .sum()
    }

    /// 2x2 table for variables `(i, j)`: index `a * 2 + b` holds the count of
    /// rows with `X_i = a, X_j = b`.
    pub fn joint2(&self, i: usize, j: usize) -> [u64; 4] {
        let mut t = [0u64; 4];
        for (&k, &c) in self.keys.iter().zip(self.counts) {
            t[self.bit(k, i) * 2 + self.bit(k, j)] += c as u64;
        }
        t
    }

    /// Two 2x2 tables for `(i, j)` stratified by the value of `z`.
    pub fn joint2_given(&self, i: usize, j: usize, z: usize) -> [[u64; 4]; 2] {
        let mut t = [[0u64; 4]; 2];
        for (&k, &c) in self.keys.iter().zip(self.counts) {
            t[self.bit(k, z)][self.bit(k, i) * 2 + self.bit(k, j)] += c as u64;
        }
        t
    }

    /// See [`AlignedDataset::cond_prob`].
    pub fn cond_prob(&self, y: &ValueAssignment, z: &ValueAssignment) -> Result<f64, AlignError> {
        if y.is_empty() {
            return Err(AlignError::EmptyTarget);
        }
        for &(idx, _) in y.pairs() {
            if z.pairs().iter().any(|&(zi, _)| zi == idx) {
                return Err(AlignError::OverlappingAssignments(idx));
            }
        }
        let (zm, zw) = z.mask_want(self.d)?;
        let (ym, yw) = y.mask_want(self.d)?;
        let denom = self.count_masked(zm, zw);
        if denom == 0 {
            return Err(AlignError::UndefinedConditional);
        }
        let num = self.count_masked(zm | ym, zw | yw);
        Ok(num as f64 / denom as f64)
    }
}
