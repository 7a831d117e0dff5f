//! Bounded-variable primal simplex over exact rationals.
//!
//! Solves `max b.x : A x <= W, 0 <= x <= 1` for nonnegative integer data.
//! Item variables live in `[0, 1]`; one slack per row turns the constraints
//! into equations. The tableau is kept as `B^{-1} [A | I]` with exact
//! `BigRational` entries, entering variables are chosen by Bland's rule
//! (smallest index among those that improve), and the ratio test allows
//! bound flips, so the method terminates without cycling and the final
//! state is a basic feasible solution — at most one fractional coordinate
//! per constraint row.

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

/// Exact LP solution at a vertex of the feasible box-polytope.
pub struct Vertex {
    /// Item values in `[0, 1]`.
    pub x: Vec<BigRational>,
    /// Objective value `b . x`.
    pub value: BigRational,
}

fn rat(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

/// Runs the simplex; `weights` is `p x n`, all rows full length. The
/// objective is bounded (every variable is), so the method always returns.
pub fn maximize(benefits: &[u64], weights: &[Vec<u64>], budgets: &[u64]) -> Vertex {
    let n = benefits.len();
    let p = budgets.len();
    let cols = n + p;

    // Objective row: items carry their benefit, slacks nothing.
    let cost: Vec<BigRational> = benefits.iter().map(|&b| rat(b)).chain((0..p).map(|_| BigRational::zero())).collect();

    // Tableau starts as [A | I]; the initial basis is the slack set, so
    // B^{-1} = I and the basic values are the budgets.
    let mut tableau: Vec<Vec<BigRational>> = (0..p)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    if j < n {
                        rat(weights[i][j])
                    } else if j - n == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut basic_value: Vec<BigRational> = budgets.iter().map(|&w| rat(w)).collect();
    let mut basis: Vec<usize> = (n..cols).collect();
    let mut state: Vec<VarState> = (0..cols)
        .map(|j| if j < n { VarState::AtLower } else { VarState::Basic(j - n) })
        .collect();

    // Upper bound per column: items 1, slacks unbounded.
    let has_upper = |j: usize| j < n;

    loop {
        // Reduced costs via the basic cost multipliers: rc_j = c_j - c_B . T_j.
        let mut entering: Option<(usize, bool)> = None; // (column, increasing?)
        for j in 0..cols {
            match state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLower | VarState::AtUpper => {
                    let mut rc = cost[j].clone();
                    for (r, row) in tableau.iter().enumerate() {
                        if !row[j].is_zero() {
                            rc -= &cost[basis[r]] * &row[j];
                        }
                    }
                    let improves = match state[j] {
                        VarState::AtLower => rc.is_positive(),
                        VarState::AtUpper => rc.is_negative(),
                        VarState::Basic(_) => unreachable!(),
                    };
                    if improves {
                        entering = Some((j, state[j] == VarState::AtLower));
                        break; // Bland: smallest improving index
                    }
                }
            }
        }
        let Some((e, increasing)) = entering else {
            break; // optimal
        };

        // Ratio test: how far can the entering variable move? Moving by
        // `t >= 0` changes basic value r by -dir * t * T[r][e].
        let dir = if increasing { BigRational::one() } else { -BigRational::one() };
        // Candidate limits: (t, blocking variable index, row or flip).
        enum Block {
            Flip,
            Row(usize),
        }
        let mut best: Option<(BigRational, usize, Block)> = None;
        let consider = |t: BigRational, var: usize, block: Block, best: &mut Option<(BigRational, usize, Block)>| {
            debug_assert!(!t.is_negative());
            let replace = match best {
                None => true,
                Some((bt, bvar, _)) => t < *bt || (t == *bt && var < *bvar),
            };
            if replace {
                *best = Some((t, var, block));
            }
        };
        if has_upper(e) {
            consider(BigRational::one(), e, Block::Flip, &mut best);
        }
        for r in 0..p {
            let step = &dir * &tableau[r][e];
            if step.is_positive() {
                // Basic variable decreases towards its lower bound 0.
                consider(&basic_value[r] / &step, basis[r], Block::Row(r), &mut best);
            } else if step.is_negative() && has_upper(basis[r]) {
                // Basic variable increases towards its upper bound 1.
                let room = BigRational::one() - &basic_value[r];
                consider(room / (-step), basis[r], Block::Row(r), &mut best);
            }
        }
        let (t_star, _, block) = best.expect("objective is bounded, so some limit always blocks");

        match block {
            Block::Flip => {
                // The entering variable crosses to its other bound.
                for r in 0..p {
                    let delta = &dir * &t_star * &tableau[r][e];
                    basic_value[r] -= delta;
                }
                state[e] = if increasing { VarState::AtUpper } else { VarState::AtLower };
            }
            Block::Row(r_star) => {
                // Pivot: entering variable becomes basic in row r_star.
                let leaving = basis[r_star];
                let step = &dir * &tableau[r_star][e];
                state[leaving] = if step.is_positive() { VarState::AtLower } else { VarState::AtUpper };

                for r in 0..p {
                    let delta = &dir * &t_star * &tableau[r][e];
                    basic_value[r] -= delta;
                }
                let entering_value = if increasing {
                    t_star.clone()
                } else {
                    BigRational::one() - &t_star
                };

                // Row reduction so column e becomes the r_star-th unit vector.
                let pivot = tableau[r_star][e].clone();
                for v in tableau[r_star].iter_mut() {
                    *v /= &pivot;
                }
                for r in 0..p {
                    if r != r_star && !tableau[r][e].is_zero() {
                        let factor = tableau[r][e].clone();
                        for j in 0..cols {
                            let adj = &factor * &tableau[r_star][j];
                            tableau[r][j] -= adj;
                        }
                    }
                }
                basis[r_star] = e;
                state[e] = VarState::Basic(r_star);
                basic_value[r_star] = entering_value;
            }
        }
    }

    // Read off the solution.
    let mut x = vec![BigRational::zero(); n];
    for j in 0..n {
        x[j] = match state[j] {
            VarState::AtLower => BigRational::zero(),
            VarState::AtUpper => BigRational::one(),
            VarState::Basic(r) => basic_value[r].clone(),
        };
        debug_assert!(!x[j].is_negative() && x[j] <= BigRational::one(), "x[{j}] out of bounds");
    }
    let value = (0..n).map(|j| rat(benefits[j]) * &x[j]).sum();
    Vertex { x, value }
}
