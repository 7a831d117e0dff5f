//! Approximation toolkit for positive 0-1 quadratic programs with knapsack
//! constraints (the "graph knapsack" problem).
//!
//! The problem: given a symmetric nonnegative benefit matrix `B` with zero
//! diagonal, nonnegative linear benefits `c`, a nonnegative weight matrix `A`
//! with `p` rows, and positive budgets `W_1..W_p`, maximise
//!
//! ```text
//!     sum_{u<v} B[u][v] x_u x_v  +  sum_j c_j x_j
//! ```
//!
//! over 0-1 vectors `x` subject to `A x <= W` componentwise. Pairs with
//! positive benefit form the edges of a graph, so a solution is a vertex set
//! and its quadratic value is the total benefit of the induced edges.
//!
//! The toolkit combines several attacks on this NP-hard problem:
//!
//! * [`instance`] — the data model, budget scaling to a uniform budget,
//!   pruning of pairs that can never be taken together, a split of the
//!   variables into "light" and "heavy" subproblems, seeded generators, and
//!   JSON I/O.
//! * [`oracle`] — exact optima by Gray-code enumeration, for small instances
//!   and for calibrating the approximate methods.
//! * [`greedy`] — a ratio greedy that repeatedly adds the subset (up to a
//!   configurable size) with the best marginal-benefit-to-weight ratio,
//!   using exact integer arithmetic for all comparisons.
//! * [`relaxation`] — a concave continuous relaxation (the pairwise terms
//!   become `B[u][v] * sqrt(x_u x_v)`) solved by projected gradient ascent;
//!   its value upper-bounds every integral solution of the scaled instance.
//! * [`rounding`] — randomized rounding of the relaxation optimum with a
//!   scaling factor `lambda`, plus two deterministic fallbacks (best single
//!   edge, and a local knapsack around a high-value centre vertex), and the
//!   `solve_auto` orchestrator that runs every strategy and keeps the best
//!   feasible answer.
//! * [`mkp`] — an exact-rational bounded-variable simplex for the linear
//!   multi-knapsack relaxation, returning a vertex solution with at most `p`
//!   fractional coordinates, and the `(p+1)`-factor rounding built on it.
//! * [`cli`] — the `piqp` command line: `gen`, `solve`, `oracle`, `mkp`,
//!   `bench`.
//!
//! All randomized components draw from ChaCha streams split deterministically
//! from a single master seed, so every run is reproducible bit for bit.

pub mod cli;
pub mod greedy;
pub mod instance;
pub mod mkp;
pub mod oracle;
pub mod relaxation;
pub mod rounding;

pub use instance::{BinarySolution, PiqpInstance, ScaledInstance};
pub use oracle::OracleResult;
pub use rounding::SolveReport;
