//! Concave continuous relaxation of the scaled problem.
//!
//! Replacing each pairwise term `b_uv x_u x_v` by `b_uv sqrt(x_u x_v)` gives
//! a concave objective over the polytope `{A_hat x <= W, 0 <= x <= 1}` whose
//! optimum upper-bounds every integral solution of the scaled instance: on
//! 0-1 points both objectives agree. The maximiser is found by projected
//! gradient ascent with a backtracking line search; the square root is
//! smoothed by a tiny epsilon so gradients stay bounded at zero, while
//! acceptance and reporting always use the unsmoothed objective. Projection
//! onto the polytope uses Dykstra's alternating method over the box and the
//! budget half-spaces. Several starts are tried (a feasible interior point,
//! any caller-supplied warm starts, and seeded random points) and the best
//! exactly-feasible iterate wins; a warm start can therefore never be lost.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::ScaledInstance;

/// RNG stream id for random multistart points (see the crate notes on
/// deterministic stream splitting).
const RELAX_STREAM: u64 = 0x52454C41;

/// Parameters of the relaxation solver.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Gradient iterations allowed per start.
    pub max_iterations: usize,
    /// Stop once relative objective gains stay below this.
    pub rel_tol: f64,
    /// Smoothing added under the square root; gradients see
    /// `sqrt(x_u x_v + eps)`.
    pub smoothing_eps: f64,
    /// Total number of starts (interior + warm + random fill).
    pub multistarts: usize,
    /// Master seed for the random starts.
    pub seed: u64,
    /// Additional start points, e.g. indicator vectors of known good
    /// integral solutions; each is projected to feasibility first.
    pub warm_starts: Vec<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 5000,
            rel_tol: 1e-7,
            smoothing_eps: 1e-12,
            multistarts: 3,
            seed: 0,
            warm_starts: Vec::new(),
        }
    }
}

/// Output of [`solve_relaxation`].
#[derive(Clone, Debug)]
pub struct RelaxationSolution {
    /// The returned point: inside `[0,1]^n`, zero on fixed variables, and
    /// satisfying every scaled budget exactly (enforced by a final uniform
    /// shrink).
    pub x: Vec<f64>,
    /// `sqrt(x_u x_v)` for every edge `u < v` with positive working benefit.
    pub edge_vals: Vec<(usize, usize, f64)>,
    /// Unsmoothed objective at `x`.
    pub value: f64,
    /// Gradient iterations summed over all starts.
    pub iterations: usize,
    /// False when the winning start exhausted its iteration budget without
    /// meeting `rel_tol`.
    pub converged: bool,
    /// Largest budget overshoot at `x`; zero after enforcement.
    pub residual: f64,
    /// Unsmoothed objective after each accepted step of the winning start;
    /// non-decreasing.
    pub trace: Vec<f64>,
}

struct Edges {
    list: Vec<(usize, usize, f64)>,
}

impl Edges {
    fn of(s: &ScaledInstance) -> Edges {
        let mut list = Vec::new();
        for u in 0..s.base.n {
            if s.fixed_zero[u] {
                continue;
            }
            for v in (u + 1)..s.base.n {
                if !s.fixed_zero[v] && s.benefits[u][v] > 0 {
                    list.push((u, v, s.benefits[u][v] as f64));
                }
            }
        }
        Edges { list }
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.list
            .iter()
            .map(|&(u, v, b)| b * (x[u].max(0.0) * x[v].max(0.0)).sqrt())
            .sum()
    }

    fn value_smooth(&self, x: &[f64], eps: f64) -> f64 {
        self.list
            .iter()
            .map(|&(u, v, b)| b * ((x[u] * x[v]).max(0.0) + eps).sqrt())
            .sum()
    }

    fn gradient(&self, x: &[f64], eps: f64, g: &mut [f64]) {
        g.fill(0.0);
        for &(u, v, b) in &self.list {
            let root = ((x[u] * x[v]).max(0.0) + eps).sqrt();
            g[u] += b * x[v] / (2.0 * root);
            g[v] += b * x[u] / (2.0 * root);
        }
    }
}

/// Dykstra projection onto the intersection of the box (with fixed
/// variables pinned to zero) and the budget half-spaces.
fn project(s: &ScaledInstance, y: &[f64]) -> Vec<f64> {
    let n = s.base.n;
    let p = s.base.p;
    let w = s.budget as f64;
    let row_norms: Vec<f64> = s
        .weights
        .iter()
        .map(|row| row.iter().map(|&a| (a as f64) * (a as f64)).sum::<f64>())
        .collect();
    let mut x = y.to_vec();
    let sets = p + 1;
    let mut corrections = vec![vec![0.0; n]; sets];
    for _cycle in 0..200 {
        let mut moved = 0.0f64;
        for k in 0..sets {
            // Dykstra: re-add this set's correction, project, store the new
            // correction.
            let z: Vec<f64> = (0..n).map(|j| x[j] + corrections[k][j]).collect();
            let proj = if k == 0 {
                let mut q = z.clone();
                for j in 0..n {
                    q[j] = if s.fixed_zero[j] { 0.0 } else { q[j].clamp(0.0, 1.0) };
                }
                q
            } else {
                let i = k - 1;
                let load: f64 = (0..n).map(|j| s.weights[i][j] as f64 * z[j]).sum();
                if load > w && row_norms[i] > 0.0 {
                    let shift = (load - w) / row_norms[i];
                    (0..n).map(|j| z[j] - shift * s.weights[i][j] as f64).collect()
                } else {
                    z.clone()
                }
            };
            for j in 0..n {
                corrections[k][j] = z[j] - proj[j];
                moved += (x[j] - proj[j]).abs();
                x[j] = proj[j];
            }
        }
        if moved <= 1e-13 * (1.0 + n as f64) {
            break;
        }
    }
    x
}

/// Clamps to the box and uniformly shrinks until every scaled budget holds
/// exactly in floating point.
fn enforce_feasible(s: &ScaledInstance, x: &mut [f64]) {
    for (j, v) in x.iter_mut().enumerate() {
        *v = if s.fixed_zero[j] { 0.0 } else { v.clamp(0.0, 1.0) };
    }
    let w = s.budget as f64;
    for _ in 0..64 {
        let mut rho: f64 = 1.0;
        for row in &s.weights {
            let load: f64 = row.iter().zip(x.iter()).map(|(&a, &v)| a as f64 * v).sum();
            if load > w {
                rho = rho.max(load / w);
            }
        }
        if rho <= 1.0 {
            return;
        }
        let shrink = (1.0 - 1e-14) / rho;
        for v in x.iter_mut() {
            *v *= shrink;
        }
    }
    panic!("uniform shrink failed to reach feasibility");
}

fn max_overshoot(s: &ScaledInstance, x: &[f64]) -> f64 {
    let w = s.budget as f64;
    s.weights
        .iter()
        .map(|row| {
            let load: f64 = row.iter().zip(x.iter()).map(|(&a, &v)| a as f64 * v).sum();
            (load - w).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// A feasible interior starting point: a uniform fraction of the budget-
/// limited box.
fn interior_start(s: &ScaledInstance) -> Vec<f64> {
    let w = s.budget as f64;
    let mut scale: f64 = 1.0;
    for row in &s.weights {
        let total: f64 = (0..s.base.n)
            .filter(|&j| !s.fixed_zero[j])
            .map(|j| row[j] as f64)
            .sum();
        if total > 0.0 {
            scale = scale.min(w / total);
        }
    }
    (0..s.base.n)
        .map(|j| if s.fixed_zero[j] { 0.0 } else { 0.5 * scale.min(1.0) })
        .collect()
}

/// Maximises the relaxed objective over the scaled feasible region.
pub fn solve_relaxation(s: &ScaledInstance, cfg: &SolverConfig) -> RelaxationSolution {
    let n = s.base.n;
    let edges = Edges::of(s);
    if edges.list.is_empty() {
        // Nothing to optimise: the zero point is optimal and exactly feasible.
        return RelaxationSolution {
            x: vec![0.0; n],
            edge_vals: Vec::new(),
            value: 0.0,
            iterations: 0,
            converged: true,
            residual: 0.0,
            trace: vec![0.0],
        };
    }

    // Assemble starts: interior, caller warm starts, then random fill.
    let mut starts: Vec<Vec<f64>> = vec![interior_start(s)];
    for ws in &cfg.warm_starts {
        assert_eq!(ws.len(), n, "warm start length must match n");
        starts.push(ws.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(RELAX_STREAM);
    while starts.len() < cfg.multistarts.max(1) {
        starts.push((0..n).map(|_| rng.gen::<f64>()).collect());
    }

    let mut best: Option<(Vec<f64>, f64, bool, Vec<f64>)> = None; // x, value, converged, trace
    let mut iterations_total = 0usize;
    for start in &starts {
        let mut x = start.clone();
        enforce_feasible(s, &mut x);
        let start_value = edges.value(&x);

        let mut trace = vec![start_value];
        let mut f_smooth = edges.value_smooth(&x, cfg.smoothing_eps);
        let mut g = vec![0.0; n];
        let mut eta = 1.0f64;
        let mut converged = false;
        let mut flat_rounds = 0usize;
        for _ in 0..cfg.max_iterations {
            iterations_total += 1;
            edges.gradient(&x, cfg.smoothing_eps, &mut g);
            let f_true = edges.value(&x);
            let mut accepted = false;
            let mut eta_try = eta;
            for _ in 0..60 {
                let cand_raw: Vec<f64> = (0..n).map(|j| x[j] + eta_try * g[j]).collect();
                let cand = project(s, &cand_raw);
                let cand_smooth = edges.value_smooth(&cand, cfg.smoothing_eps);
                // Accept only genuine progress: the smoothed objective must
                // improve and the reported (unsmoothed) one must not drop,
                // keeping the trace monotone.
                if cand_smooth > f_smooth && edges.value(&cand) >= f_true {
                    let gain = cand_smooth - f_smooth;
                    x = cand;
                    f_smooth = cand_smooth;
                    eta = (eta_try * 1.5).min(1e6);
                    accepted = true;
                    trace.push(edges.value(&x));
                    if gain <= cfg.rel_tol * f_smooth.abs().max(1.0) {
                        flat_rounds += 1;
                        if flat_rounds >= 3 {
                            converged = true;
                        }
                    } else {
                        flat_rounds = 0;
                    }
                    break;
                }
                eta_try *= 0.5;
            }
            if !accepted {
                // No ascent direction improves: at a concave maximum.
                converged = true;
                break;
            }
            if converged {
                break;
            }
        }

        let mut x_exact = x;
        enforce_feasible(s, &mut x_exact);
        let final_value = edges.value(&x_exact);
        // The enforced start point itself is a candidate, so warm starts
        // are never lost to solver wobble.
        let mut local_best = (x_exact, final_value, converged, trace);
        if start_value > final_value {
            let mut xs = start.clone();
            enforce_feasible(s, &mut xs);
            local_best = (xs, start_value, converged, vec![start_value]);
        }
        let replace = match &best {
            None => true,
            Some((_, v, _, _)) => local_best.1 > *v,
        };
        if replace {
            best = Some(local_best);
        }
    }

    let (x, value, converged, trace) = best.expect("at least one start always runs");
    let edge_vals: Vec<(usize, usize, f64)> = edges
        .list
        .iter()
        .map(|&(u, v, _)| (u, v, (x[u].max(0.0) * x[v].max(0.0)).sqrt()))
        .collect();
    let residual = max_overshoot(s, &x);
    RelaxationSolution { x, edge_vals, value, iterations: iterations_total, converged, residual, trace }
}

/// Verifies the square-root budget bound at a feasible point: for every
/// constraint, `sum_j A_hat[i][j] sqrt(x_j) <= 2 W sqrt(a_max n / beta)`
/// whenever `a_max <= beta <= W`. Returns the slack per constraint and
/// asserts nonnegativity — a violation would mean the point left the
/// feasible region, i.e. a solver bug. (The bound's inherent factor-two
/// slack dwarfs floating-point error, so no tolerance is needed.)
pub fn check_sqrt_budget_bound(s: &ScaledInstance, x: &[f64], beta: f64) -> Vec<f64> {
    assert!(beta > 0.0, "beta must be positive");
    assert!(beta >= s.max_weight as f64, "beta must be at least a_max");
    assert!(beta <= s.budget as f64, "beta must be at most the uniform budget");
    let w = s.budget as f64;
    let n = s.base.n as f64;
    let rhs = 2.0 * w * (s.max_weight as f64 * n / beta).sqrt();
    s.weights
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let lhs: f64 = row
                .iter()
                .zip(x.iter())
                .map(|(&a, &v)| a as f64 * v.max(0.0).sqrt())
                .sum();
            let slack = rhs - lhs;
            assert!(
                slack >= 0.0,
                "square-root budget bound violated in constraint {i}: {lhs} > {rhs}"
            );
            slack
        })
        .collect()
}
