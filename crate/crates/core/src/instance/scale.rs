//! Budget scaling to a uniform budget, pruning of unusable pairs, and the
//! light/heavy variable split.

use super::model::PiqpInstance;

/// An instance rescaled to the uniform budget `W = max_i W_i`.
///
/// Each weight becomes `A_hat[i][j] = ceil(A[i][j] * W / W_i)` (exact integer
/// ceiling), which only tightens constraints: any assignment feasible here is
/// feasible for the original instance. `benefits` and `linear` start as
/// working copies of the originals so that pruning and the split can zero
/// entries without touching `base`. Variables forced to zero are recorded in
/// `fixed_zero` rather than by shrinking the matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledInstance {
    /// The originating instance, kept for back-evaluation.
    pub base: PiqpInstance,
    /// Uniform budget `W = max_i W_i`.
    pub budget: u64,
    /// Scaled `p x n` weight matrix `A_hat`.
    pub weights: Vec<Vec<u64>>,
    /// Working copy of the benefit matrix (pruning/split may zero entries).
    pub benefits: Vec<Vec<u64>>,
    /// Working copy of the linear benefits.
    pub linear: Vec<u64>,
    /// Mask of variables forced to zero.
    pub fixed_zero: Vec<bool>,
    /// Maximum scaled weight over variables not fixed to zero (`a_max`).
    pub max_weight: u64,
}

impl ScaledInstance {
    /// Applies the scaling transform. With a single constraint (or all
    /// budgets equal) the weights are unchanged.
    pub fn scale(inst: &PiqpInstance) -> ScaledInstance {
        let w = inst.max_budget();
        let weights: Vec<Vec<u64>> = inst
            .weights
            .iter()
            .zip(&inst.budgets)
            .map(|(row, &wi)| row.iter().map(|&a| ceil_mul_div(a, w, wi)).collect())
            .collect();
        let mut s = ScaledInstance {
            base: inst.clone(),
            budget: w,
            weights,
            benefits: inst.benefits.clone(),
            linear: inst.linear.clone(),
            fixed_zero: vec![false; inst.n],
            max_weight: 0,
        };
        s.recompute_max_weight();
        s
    }

    /// Zeroes the benefit of every pair that no feasible assignment can take
    /// together (`A_hat[i][j] + A_hat[i][k] > W` for some constraint), and
    /// forces to zero every single variable with `A_hat[i][j] > W`. For a
    /// forced variable the weight column and linear benefit are zeroed too,
    /// so it is harmless wherever it appears.
    ///
    /// Feasible assignments of the scaled instance keep their exact
    /// objective value: a pruned pair can never have both endpoints chosen.
    pub fn prune_infeasible_pairs(&self) -> ScaledInstance {
        let mut s = self.clone();
        let n = s.base.n;
        let w = s.budget;
        for j in 0..n {
            for k in (j + 1)..n {
                if s.benefits[j][k] > 0
                    && s.weights.iter().any(|row| row[j].saturating_add(row[k]) > w)
                {
                    s.benefits[j][k] = 0;
                    s.benefits[k][j] = 0;
                }
            }
        }
        for j in 0..n {
            if s.weights.iter().any(|row| row[j] > w) {
                s.fix_variable(j);
                for row in s.weights.iter_mut() {
                    row[j] = 0;
                }
            }
        }
        s.recompute_max_weight();
        s
    }

    /// Splits into the "light" and "heavy" subproblems. A variable is heavy
    /// when some scaled weight exceeds half the budget (`2 * A_hat[i][j] > W`,
    /// an exact integer comparison). The first output fixes every heavy
    /// variable to zero (light part); the second fixes every light variable
    /// to zero (heavy part). The better of the two optima is, for instances
    /// whose benefit mass is not concentrated on light-heavy pairs, at least
    /// half the optimum of the full scaled instance.
    pub fn split_piqps_piqpr(&self) -> (ScaledInstance, ScaledInstance) {
        let n = self.base.n;
        let mut light = self.clone();
        let mut heavy = self.clone();
        for j in 0..n {
            if self.fixed_zero[j] {
                continue;
            }
            if self.is_heavy(j) {
                light.fix_variable(j);
            } else {
                heavy.fix_variable(j);
            }
        }
        light.recompute_max_weight();
        heavy.recompute_max_weight();
        (light, heavy)
    }

    /// Whether some scaled weight of `j` exceeds half the uniform budget.
    pub fn is_heavy(&self, j: usize) -> bool {
        self.weights.iter().any(|row| 2 * row[j] > self.budget)
    }

    /// Unfixed variable indices, increasing.
    pub fn free_vars(&self) -> Vec<usize> {
        (0..self.base.n).filter(|&j| !self.fixed_zero[j]).collect()
    }

    /// Forces `j` to zero: marks it fixed and zeroes its benefit row/column
    /// and linear term. The weight column stays untouched (a fixed variable
    /// is simply never selected).
    fn fix_variable(&mut self, j: usize) {
        self.fixed_zero[j] = true;
        self.linear[j] = 0;
        let n = self.base.n;
        for k in 0..n {
            self.benefits[j][k] = 0;
            self.benefits[k][j] = 0;
        }
    }

    fn recompute_max_weight(&mut self) {
        self.max_weight = (0..self.base.n)
            .filter(|&j| !self.fixed_zero[j])
            .flat_map(|j| self.weights.iter().map(move |row| row[j]))
            .max()
            .unwrap_or(0);
    }
}

/// `ceil(a * w / wi)` without overflow for 64-bit inputs.
fn ceil_mul_div(a: u64, w: u64, wi: u64) -> u64 {
    debug_assert!(wi > 0, "budgets are validated positive");
    let prod = a as u128 * w as u128;
    prod.div_ceil(wi as u128) as u64
}
