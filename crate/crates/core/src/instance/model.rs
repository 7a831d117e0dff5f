//! Core types: the problem instance, validation, evaluated 0-1 solutions and
//! the graph view used by combinatorial strategies.

use serde::{Deserialize, Serialize};
use std::fmt;

use super::scale::ScaledInstance;

/// A positive 0-1 quadratic program with knapsack constraints.
///
/// Maximise `sum_{u<v} B[u][v] x_u x_v + sum_j c_j x_j` over `x in {0,1}^n`
/// subject to `A x <= budgets` componentwise. All data are nonnegative
/// integers; `B` is symmetric with zero diagonal, so each unordered pair
/// contributes its benefit once.
///
/// The struct mirrors the JSON schema (`n`, `p`, `B`, `c`, `A`, `budgets`,
/// optional `meta`). Invariants are not enforced by construction; call
/// [`validate`] to collect violations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiqpInstance {
    /// Number of variables (vertices).
    pub n: usize,
    /// Number of knapsack constraints.
    pub p: usize,
    /// Symmetric `n x n` benefit matrix with zero diagonal.
    #[serde(rename = "B")]
    pub benefits: Vec<Vec<u64>>,
    /// Length-`n` linear benefits.
    #[serde(rename = "c")]
    pub linear: Vec<u64>,
    /// `p x n` weight matrix.
    #[serde(rename = "A")]
    pub weights: Vec<Vec<u64>>,
    /// Length-`p` positive budgets.
    pub budgets: Vec<u64>,
    /// Free-form provenance carried through I/O untouched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

/// Error for constructors that receive vectors of inconsistent dimensions.
#[derive(Debug, thiserror::Error)]
#[error("inconsistent dimensions: {0}")]
pub struct ShapeError(pub String);

impl PiqpInstance {
    /// Builds an instance from dense parts, checking dimensions only.
    /// Semantic invariants (symmetry, zero diagonal, positive budgets) are
    /// left to [`validate`].
    pub fn from_dense(
        benefits: Vec<Vec<u64>>,
        linear: Vec<u64>,
        weights: Vec<Vec<u64>>,
        budgets: Vec<u64>,
    ) -> Result<Self, ShapeError> {
        let n = linear.len();
        let p = budgets.len();
        if benefits.len() != n {
            return Err(ShapeError(format!("B has {} rows, expected {n}", benefits.len())));
        }
        for (i, row) in benefits.iter().enumerate() {
            if row.len() != n {
                return Err(ShapeError(format!("B row {i} has length {}, expected {n}", row.len())));
            }
        }
        if weights.len() != p {
            return Err(ShapeError(format!("A has {} rows, expected {p}", weights.len())));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(ShapeError(format!("A row {i} has length {}, expected {n}", row.len())));
            }
        }
        Ok(PiqpInstance { n, p, benefits, linear, weights, budgets, meta: None })
    }

    /// Builds an instance from an undirected edge list; `edges` entries are
    /// `(u, v, benefit)` with `u != v`. Benefits of repeated edges must agree.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize, u64)],
        linear: Vec<u64>,
        weights: Vec<Vec<u64>>,
        budgets: Vec<u64>,
    ) -> Result<Self, ShapeError> {
        let mut benefits = vec![vec![0u64; n]; n];
        for &(u, v, b) in edges {
            if u >= n || v >= n {
                return Err(ShapeError(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(ShapeError(format!("edge ({u},{v}) is a diagonal entry")));
            }
            if benefits[u][v] != 0 && benefits[u][v] != b {
                return Err(ShapeError(format!("edge ({u},{v}) listed twice with different benefits")));
            }
            benefits[u][v] = b;
            benefits[v][u] = b;
        }
        if linear.len() != n {
            return Err(ShapeError(format!("c has length {}, expected {n}", linear.len())));
        }
        Self::from_dense(benefits, linear, weights, budgets)
    }

    /// Benefit of the unordered pair `{u, v}`.
    pub fn benefit(&self, u: usize, v: usize) -> u64 {
        self.benefits[u][v]
    }

    /// Weight of variable `j` in constraint `i`.
    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights[i][j]
    }

    /// The uniform budget `W = max_i W_i` used by scaling. Zero only for the
    /// degenerate `p = 0` case, which [`validate`] rejects.
    pub fn max_budget(&self) -> u64 {
        self.budgets.iter().copied().max().unwrap_or(0)
    }

    /// Scales every constraint to the common budget `W = max_i W_i`.
    pub fn scale(&self) -> ScaledInstance {
        ScaledInstance::scale(self)
    }
}

/// A single validation finding; `field` names the offending input and
/// `index` locates it when meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub index: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some((i, j)) => write!(f, "{} at ({i},{j}): {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

/// Checks every structural invariant of an instance and returns the list of
/// violations; the list is empty exactly when the instance is well formed.
///
/// Checked: dimension consistency of `B`, `c`, `A`, `budgets` against `n`
/// and `p`; symmetry and zero diagonal of `B`; `p >= 1`; positive budgets.
/// Nonnegativity is enforced by the unsigned types. (`p` far above
/// `log2 n` is legal; the solver reports it as a warning instead.)
pub fn validate(inst: &PiqpInstance) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = inst.n;
    let err = |field, index, message: String| Violation { field, index, message };

    if inst.benefits.len() != n {
        out.push(err("B", None, format!("has {} rows, expected n={n}", inst.benefits.len())));
    }
    for (i, row) in inst.benefits.iter().enumerate() {
        if row.len() != n {
            out.push(err("B", Some((i, 0)), format!("row has length {}, expected n={n}", row.len())));
        }
    }
    // Symmetry / diagonal checks only make sense where the shape allows.
    if inst.benefits.len() == n && inst.benefits.iter().all(|r| r.len() == n) {
        for i in 0..n {
            if inst.benefits[i][i] != 0 {
                out.push(err("B", Some((i, i)), format!("diagonal entry must be 0, found {}", inst.benefits[i][i])));
            }
            for j in (i + 1)..n {
                if inst.benefits[i][j] != inst.benefits[j][i] {
                    out.push(err(
                        "B",
                        Some((i, j)),
                        format!("asymmetric: B[{i}][{j}]={} but B[{j}][{i}]={}", inst.benefits[i][j], inst.benefits[j][i]),
                    ));
                }
            }
        }
    }
    if inst.linear.len() != n {
        out.push(err("c", None, format!("has length {}, expected n={n}", inst.linear.len())));
    }
    if inst.p == 0 {
        out.push(err("p", None, "at least one constraint is required".to_string()));
    }
    if inst.weights.len() != inst.p {
        out.push(err("A", None, format!("has {} rows, expected p={}", inst.weights.len(), inst.p)));
    }
    for (i, row) in inst.weights.iter().enumerate() {
        if row.len() != n {
            out.push(err("A", Some((i, 0)), format!("row has length {}, expected n={n}", row.len())));
        }
    }
    if inst.budgets.len() != inst.p {
        out.push(err("budgets", None, format!("has length {}, expected p={}", inst.budgets.len(), inst.p)));
    }
    for (i, &w) in inst.budgets.iter().enumerate() {
        if w == 0 {
            out.push(err("budgets", Some((i, 0)), "budget must be positive".to_string()));
        }
    }
    out
}

/// Warnings about regimes the approximation guarantees do not cover; the
/// instance is still solved as-is.
pub(crate) fn regime_warnings(inst: &PiqpInstance) -> Vec<String> {
    let mut out = Vec::new();
    let log2_ceil = if inst.n <= 1 { 0 } else { 64 - ((inst.n - 1) as u64).leading_zeros() as usize };
    if inst.p > log2_ceil.max(1) {
        out.push(format!(
            "p={} exceeds ceil(log2 n)={} for n={}; approximation factors are not guaranteed in this regime",
            inst.p,
            log2_ceil.max(1),
            inst.n
        ));
    }
    out
}

/// A 0-1 assignment evaluated against a fixed constraint system.
///
/// `objective = quadratic + linear` where `quadratic` is the edge-sum
/// `sum_{u<v} B[u][v] x_u x_v` and `linear` is `sum_j c_j x_j`; `usage[i]`
/// is the load `sum_j A[i][j] x_j` of constraint `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinarySolution {
    /// The assignment as 0/1 entries.
    pub x: Vec<u8>,
    /// Total objective value.
    pub objective: u64,
    /// Pairwise part of the objective.
    pub quadratic: u64,
    /// Linear part of the objective.
    pub linear: u64,
    /// Load per constraint.
    pub usage: Vec<u64>,
    /// Whether every constraint load is within its budget.
    pub feasible: bool,
}

impl BinarySolution {
    /// Evaluates `x` against the original instance.
    pub fn evaluate(inst: &PiqpInstance, x: &[u8]) -> BinarySolution {
        assert_eq!(x.len(), inst.n, "assignment length must match n");
        Self::eval_parts(x, &inst.benefits, &inst.linear, &inst.weights, &inst.budgets)
    }

    /// Evaluates `x` against a scaled instance: its working benefit copy,
    /// scaled weights and the uniform budget.
    pub fn evaluate_scaled(s: &ScaledInstance, x: &[u8]) -> BinarySolution {
        assert_eq!(x.len(), s.base.n, "assignment length must match n");
        let budgets = vec![s.budget; s.base.p];
        Self::eval_parts(x, &s.benefits, &s.linear, &s.weights, &budgets)
    }

    fn eval_parts(
        x: &[u8],
        benefits: &[Vec<u64>],
        linear: &[u64],
        weights: &[Vec<u64>],
        budgets: &[u64],
    ) -> BinarySolution {
        let n = x.len();
        debug_assert!(x.iter().all(|&v| v <= 1), "entries must be 0/1");
        let mut quadratic = 0u64;
        for u in 0..n {
            if x[u] == 0 {
                continue;
            }
            for v in (u + 1)..n {
                if x[v] == 1 {
                    quadratic += benefits[u][v];
                }
            }
        }
        let lin: u64 = (0..n).filter(|&j| x[j] == 1).map(|j| linear[j]).sum();
        let usage: Vec<u64> = weights
            .iter()
            .map(|row| (0..n).filter(|&j| x[j] == 1).map(|j| row[j]).sum())
            .collect();
        let feasible = usage.iter().zip(budgets).all(|(&u, &w)| u <= w);
        BinarySolution {
            x: x.to_vec(),
            objective: quadratic + lin,
            quadratic,
            linear: lin,
            usage,
            feasible,
        }
    }

    /// The all-zeros solution, trivially feasible for positive budgets.
    pub fn zeros(n: usize, p: usize) -> BinarySolution {
        BinarySolution {
            x: vec![0; n],
            objective: 0,
            quadratic: 0,
            linear: 0,
            usage: vec![0; p],
            feasible: true,
        }
    }

    /// Selected indices in increasing order.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&j| self.x[j] == 1).collect()
    }
}

/// Graph view of a scaled instance: vertices are the unfixed variables,
/// edges the positive entries of the (working) benefit matrix, and each
/// vertex carries the combined weight `w_v = sum_i A_hat[i][v]`.
pub struct GraphView<'a> {
    pub scaled: &'a ScaledInstance,
    /// Unfixed variable indices, increasing.
    pub vertices: Vec<usize>,
    /// `adjacency[v]` lists unfixed `u != v` with positive benefit, increasing.
    pub adjacency: Vec<Vec<usize>>,
    /// Combined weight per variable (column sums of the scaled weights).
    pub combined: Vec<u64>,
}

impl<'a> GraphView<'a> {
    pub fn new(scaled: &'a ScaledInstance) -> GraphView<'a> {
        let n = scaled.base.n;
        let vertices: Vec<usize> = (0..n).filter(|&j| !scaled.fixed_zero[j]).collect();
        let mut adjacency = vec![Vec::new(); n];
        for &v in &vertices {
            adjacency[v] = vertices
                .iter()
                .copied()
                .filter(|&u| u != v && scaled.benefits[v][u] > 0)
                .collect();
        }
        let combined: Vec<u64> = (0..n).map(|j| scaled.weights.iter().map(|row| row[j]).sum()).collect();
        GraphView { scaled, vertices, adjacency, combined }
    }

    /// Benefit of the unordered pair `{u, v}` in the working matrix.
    pub fn benefit(&self, u: usize, v: usize) -> u64 {
        self.scaled.benefits[u][v]
    }
}
