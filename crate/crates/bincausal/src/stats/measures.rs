//! Plug-in measures over a 2x2 (or stratified 2x2) empirical table.
//!
//! All quantities are exact functions of integer pattern counts; the same
//! code path serves both the original sample and bootstrap replicates via
//! [`PatternView`].

use crate::align::PatternView;
use crate::stats::StatsError;

fn check_pair(view: &PatternView<'_>, i: usize, j: usize) -> Result<(), StatsError> {
    if i == j {
        return Err(StatsError::SameVariable);
    }
    let d = view.d();
    for idx in [i, j] {
        if idx >= d {
            return Err(StatsError::IndexOutOfRange(idx, d));
        }
    }
    Ok(())
}

fn cell_probs(table: [u64; 4]) -> [f64; 4] {
    let n = table.iter().sum::<u64>() as f64;
    [
        table[0] as f64 / n,
        table[1] as f64 / n,
        table[2] as f64 / n,
        table[3] as f64 / n,
    ]
}

/// Degree of dependency between variables `i` and `j`:
/// `sum over (a, b) of |P(a,b) - P(a)P(b)| * P(a,b)`.
///
/// Zero exactly when the empirical 2x2 joint factorises; at most 1.
pub fn dependency(view: PatternView<'_>, i: usize, j: usize) -> Result<f64, StatsError> {
    check_pair(&view, i, j)?;
    Ok(dependency_from_table(view.joint2(i, j)))
}

pub(crate) fn dependency_from_table(table: [u64; 4]) -> f64 {
    // table index: a*2 + b for X_i = a, X_j = b
    let p = cell_probs(table);
    let pi = [p[0] + p[1], p[2] + p[3]]; // P(X_i = 0), P(X_i = 1)
    let pj = [p[0] + p[2], p[1] + p[3]];
    let mut total = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let joint = p[a * 2 + b];
            total += (joint - pi[a] * pj[b]).abs() * joint;
        }
    }
    total
}

/// Degree of conditional dependency between `i` and `j` given variable
/// `zvar`: `sum over (a, b, z) of P(a,b|z) * |P(a,b|z) - P(a|z)P(b|z)|`.
///
/// Values of `zvar` with zero support contribute nothing to the sum.
pub fn cond_dependency(
    view: PatternView<'_>,
    i: usize,
    j: usize,
    zvar: usize,
) -> Result<f64, StatsError> {
    check_pair(&view, i, j)?;
    if zvar == i || zvar == j {
        return Err(StatsError::SameVariable);
    }
    if zvar >= view.d() {
        return Err(StatsError::IndexOutOfRange(zvar, view.d()));
    }
    let strata = view.joint2_given(i, j, zvar);
    let mut total = 0.0;
    for table in strata {
        if table.iter().sum::<u64>() == 0 {
            continue;
        }
        let p = cell_probs(table);
        let pi = [p[0] + p[1], p[2] + p[3]];
        let pj = [p[0] + p[2], p[1] + p[3]];
        for a in 0..2 {
            for b in 0..2 {
                let joint = p[a * 2 + b];
                total += joint * (joint - pi[a] * pj[b]).abs();
            }
        }
    }
    Ok(total)
}

/// Odds ratio `P(1,1)P(0,0) / (P(0,1)P(1,0))`.
///
/// Greater than 1 indicates positive association, less than 1 negative,
/// exactly 1 none. Fails with [`StatsError::DivisionByZero`] when an
/// off-diagonal cell is empty; [`odd_diff`] is the robust alternative.
pub fn odd_ratio(view: PatternView<'_>, i: usize, j: usize) -> Result<f64, StatsError> {
    check_pair(&view, i, j)?;
    odd_ratio_from_table(view.joint2(i, j))
}

pub(crate) fn odd_ratio_from_table(table: [u64; 4]) -> Result<f64, StatsError> {
    let p = cell_probs(table);
    let denom = p[1] * p[2]; // P(0,1) * P(1,0)
    if denom == 0.0 {
        return Err(StatsError::DivisionByZero);
    }
    Ok(p[3] * p[0] / denom)
}

/// Signed odds difference `P(1,1)P(0,0) - P(0,1)P(1,0)`.
///
/// Positive indicates positive association, negative the opposite, zero
/// none. Always defined; bounded by [-0.25, 0.25].
pub fn odd_diff(view: PatternView<'_>, i: usize, j: usize) -> Result<f64, StatsError> {
    check_pair(&view, i, j)?;
    Ok(odd_diff_from_table(view.joint2(i, j)))
}

pub(crate) fn odd_diff_from_table(table: [u64; 4]) -> f64 {
    let p = cell_probs(table);
    p[3] * p[0] - p[1] * p[2]
}

/// Per-stratum signed odds difference of `(i, j)` given each value of
/// `zvar`; `None` for strata without support.
pub(crate) fn stratified_odd_diff(
    view: PatternView<'_>,
    i: usize,
    j: usize,
    zvar: usize,
) -> [Option<f64>; 2] {
    let strata = view.joint2_given(i, j, zvar);
    let eval = |table: [u64; 4]| {
        if table.iter().sum::<u64>() == 0 {
            None
        } else {
            Some(odd_diff_from_table(table))
        }
    };
    [eval(strata[0]), eval(strata[1])]
}

/// Degree of causal direction:
/// `P(X_j = xj_val | X_i = xi_val) - P(X_i = xi_val | X_j = xj_val)`.
///
/// Positive suggests `X_i -> X_j`, negative the reverse. Fails when either
/// conditioning event has no support.
pub fn causal_dir(
    view: PatternView<'_>,
    i: usize,
    j: usize,
    xi_val: u8,
    xj_val: u8,
) -> Result<f64, StatsError> {
    check_pair(&view, i, j)?;
    causal_dir_from_table(view.joint2(i, j), xi_val, xj_val)
}

pub(crate) fn causal_dir_from_table(
    table: [u64; 4],
    xi_val: u8,
    xj_val: u8,
) -> Result<f64, StatsError> {
    let a = xi_val as usize;
    let b = xj_val as usize;
    let joint = table[a * 2 + b];
    let margin_i = table[a * 2] + table[a * 2 + 1];
    let margin_j = table[b] + table[2 + b];
    if margin_i == 0 || margin_j == 0 {
        return Err(StatsError::UndefinedConditional);
    }
    Ok(joint as f64 / margin_i as f64 - joint as f64 / margin_j as f64)
}

/// `P(X_j = xj_val | X_i = xi_val)` from a 2x2 table.
pub(crate) fn cond_prob_from_table(
    table: [u64; 4],
    xi_val: u8,
    xj_val: u8,
) -> Result<f64, StatsError> {
    let a = xi_val as usize;
    let b = xj_val as usize;
    let margin_i = table[a * 2] + table[a * 2 + 1];
    if margin_i == 0 {
        return Err(StatsError::UndefinedConditional);
    }
    Ok(table[a * 2 + b] as f64 / margin_i as f64)
}
