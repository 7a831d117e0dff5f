//! Exact optima by exhaustive enumeration.
//!
//! The enumerator walks all assignments of the free variables in Gray-code
//! order, so each step flips a single variable and the objective and
//! constraint loads are updated incrementally. Intended for calibration and
//! tests; the variable count is capped (default 24, i.e. 2^24 assignments).

use crate::instance::{BinarySolution, PiqpInstance, ScaledInstance};

/// Default cap on the number of free variables.
pub const DEFAULT_LIMIT: usize = 24;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {n} free variables, above the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("inconsistent mkp dimensions: {0}")]
    BadShape(String),
}

/// An exact optimum together with the size of the search.
#[derive(Clone, Debug)]
pub struct OracleResult {
    /// The optimal assignment with the smallest selected-index tuple among
    /// ties (vertex 0 beats vertex 1, and so on).
    pub best: BinarySolution,
    /// Number of assignments enumerated (2^free).
    pub explored: u64,
}

/// Exact optimum of an instance under its original budgets.
pub fn brute_force(inst: &PiqpInstance, limit_n: usize) -> Result<OracleResult, OracleError> {
    let free: Vec<usize> = (0..inst.n).collect();
    enumerate(
        &free,
        inst.n,
        limit_n,
        |u, v| inst.benefits[u][v],
        |j| inst.linear[j],
        &inst.weights,
        &inst.budgets,
    )
    .map(|(x, explored)| OracleResult { best: BinarySolution::evaluate(inst, &x), explored })
}

/// Exact optimum of a scaled instance (working benefits, scaled weights,
/// uniform budget); variables fixed to zero are excluded from the search.
pub fn brute_force_scaled(s: &ScaledInstance, limit_n: usize) -> Result<OracleResult, OracleError> {
    let free = s.free_vars();
    let budgets = vec![s.budget; s.base.p];
    enumerate(
        &free,
        s.base.n,
        limit_n,
        |u, v| s.benefits[u][v],
        |j| s.linear[j],
        &s.weights,
        &budgets,
    )
    .map(|(x, explored)| OracleResult { best: BinarySolution::evaluate_scaled(s, &x), explored })
}

/// Exact optimum of a linear multi-knapsack: maximise `b . x` subject to
/// `A x <= budgets`, `x in {0,1}^n`.
pub fn brute_force_mkp(
    benefits: &[u64],
    weights: &[Vec<u64>],
    budgets: &[u64],
    limit_n: usize,
) -> Result<OracleResult, OracleError> {
    let n = benefits.len();
    if weights.len() != budgets.len() {
        return Err(OracleError::BadShape(format!(
            "A has {} rows but {} budgets given",
            weights.len(),
            budgets.len()
        )));
    }
    for (i, row) in weights.iter().enumerate() {
        if row.len() != n {
            return Err(OracleError::BadShape(format!("A row {i} has length {}, expected {n}", row.len())));
        }
    }
    let free: Vec<usize> = (0..n).collect();
    let (x, explored) = enumerate(&free, n, limit_n, |_, _| 0, |j| benefits[j], weights, budgets)?;
    let value: u64 = (0..n).filter(|&j| x[j] == 1).map(|j| benefits[j]).sum();
    let usage: Vec<u64> = weights
        .iter()
        .map(|row| (0..n).filter(|&j| x[j] == 1).map(|j| row[j]).sum())
        .collect();
    let feasible = usage.iter().zip(budgets).all(|(&u, &w)| u <= w);
    Ok(OracleResult {
        best: BinarySolution {
            x,
            objective: value,
            quadratic: 0,
            linear: value,
            usage,
            feasible,
        },
        explored,
    })
}

/// Gray-code walk over the subsets of `free`, returning the feasible
/// maximiser with the smallest selected-index tuple among ties, plus the
/// number of assignments visited.
fn enumerate(
    free: &[usize],
    n: usize,
    limit_n: usize,
    benefit: impl Fn(usize, usize) -> u64,
    linear: impl Fn(usize) -> u64,
    weights: &[Vec<u64>],
    budgets: &[u64],
) -> Result<(Vec<u8>, u64), OracleError> {
    let m = free.len();
    if m > limit_n {
        return Err(OracleError::TooLarge { n: m, limit: limit_n });
    }
    let p = budgets.len();
    let mut x = vec![0u8; n];
    let mut usage = vec![0u64; p];
    let mut objective = 0u64;
    // The empty assignment is feasible (budgets are nonnegative) and seeds
    // the incumbent; it is also the lexicographic minimum.
    let mut best_x = x.clone();
    let mut best_objective = 0u64;

    let total: u64 = 1u64 << m;
    for step in 1..total {
        let bit = step.trailing_zeros() as usize;
        let j = free[bit];
        if x[j] == 0 {
            // Flip on: add linear term, edges into the current set, and loads.
            x[j] = 1;
            objective += linear(j);
            for &u in free {
                if u != j && x[u] == 1 {
                    objective += benefit(u.min(j), u.max(j));
                }
            }
            for (i, row) in weights.iter().enumerate() {
                usage[i] += row[j];
            }
        } else {
            x[j] = 0;
            objective -= linear(j);
            for &u in free {
                if u != j && x[u] == 1 {
                    objective -= benefit(u.min(j), u.max(j));
                }
            }
            for (i, row) in weights.iter().enumerate() {
                usage[i] -= row[j];
            }
        }
        let feasible = usage.iter().zip(budgets).all(|(&u, &w)| u <= w);
        let wins_tie = |cand: &[u8], incumbent: &[u8]| {
            // Among equal objectives the smaller selected-index tuple wins,
            // with the empty selection smallest of all: {0,1} beats {1,2},
            // and {} beats any zero-benefit selection.
            let cand_sel = cand.iter().enumerate().filter(|(_, &v)| v == 1).map(|(j, _)| j);
            let inc_sel = incumbent.iter().enumerate().filter(|(_, &v)| v == 1).map(|(j, _)| j);
            cand_sel.lt(inc_sel)
        };
        if feasible && (objective > best_objective || (objective == best_objective && wins_tie(&x, &best_x))) {
            best_objective = objective;
            best_x = x.clone();
        }
    }
    Ok((best_x, total))
}
