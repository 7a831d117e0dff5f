//! Randomized rounding of the relaxation, deterministic fallback solutions,
//! and the `solve_auto` orchestrator.
//!
//! The relaxed point `x*` is rounded by selecting each vertex independently
//! with probability `sqrt(x_u*)/lambda`, the scaling factor
//! `lambda = 2 sqrt(a_max n / beta)` keeping the expected load of every
//! scaled budget within `W`. Single trials may still overshoot, so trials
//! are repeated and infeasible draws are repaired (or discarded, behind a
//! flag). Two deterministic companions — the best single edge and a linear
//! knapsack solved around the most promising center vertex — cover the
//! regimes where concentration of the random draw fails; diagnostics based
//! on the moments (eps0, eps1, eps2) report which regime an instance is in.
//! `solve_auto` runs everything on both halves of the light/heavy split and
//! returns the best feasible solution in original units, together with a
//! relaxation-based upper bound and full provenance.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::greedy::{greedy_solve, GreedyConfig};
use crate::instance::{regime_warnings, validate, BinarySolution, PiqpInstance, ScaledInstance};
use crate::mkp::{round_vertex, solve_lp_vertex, MkpProblem};
use crate::relaxation::{check_sqrt_budget_bound, solve_relaxation, RelaxationSolution, SolverConfig};

/// Base RNG stream id for rounding trials; trial `j` of part `k` draws from
/// stream `ROUND_STREAM + k * PART_SPAN + j`, so every trial is independent
/// and reproducible from the master seed alone.
const ROUND_STREAM: u64 = 0x524F554E44;
const PART_SPAN: u64 = 1 << 32;

/// Parameters of the randomized stage.
#[derive(Clone, Debug)]
pub struct RoundingConfig {
    /// Budget lower-bound parameter; must end up in `[a_max, W]` and is
    /// clamped there. `None` means `W` itself.
    pub beta: Option<f64>,
    /// Number of rounding trials; `None` means `ceil(n^0.6)`.
    pub trials: Option<usize>,
    /// Diagnostic overshoot tolerance in `(0, 1]`: a warning is emitted when
    /// the empirical trial feasibility rate drops below `1 - delta`.
    pub delta: f64,
    /// Exponent offset in the concentration threshold `(ln n)^(2+gamma)`.
    pub gamma: f64,
    /// Discard infeasible trials instead of repairing them.
    pub discard_infeasible: bool,
    /// Master seed for the trial streams.
    pub seed: u64,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        RoundingConfig {
            beta: None,
            trials: None,
            delta: 0.5,
            gamma: 0.1,
            discard_infeasible: false,
            seed: 0,
        }
    }
}

/// One raw rounding draw, recorded before any repair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Objective of the raw draw under the working (scaled) instance.
    pub objective: u64,
    /// Scaled budget loads of the raw draw.
    pub usage: Vec<u64>,
    /// Whether the raw draw already satisfied every scaled budget.
    pub feasible: bool,
    /// Whether the draw was repaired before entering the comparison.
    pub repaired: bool,
}

/// Aggregate view of all rounding trials of a solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    /// Every raw trial, in execution order (light part first).
    pub trials: Vec<TrialRecord>,
    /// Fraction of trials feasible before repair.
    pub feasibility_rate: f64,
    /// Mean raw objective.
    pub mean_objective: f64,
    /// Mean raw load per constraint.
    pub mean_usage: Vec<f64>,
}

impl TrialStats {
    /// Recomputes the aggregates from per-trial records.
    pub fn from_records(trials: Vec<TrialRecord>, p: usize) -> TrialStats {
        if trials.is_empty() {
            return TrialStats { trials, feasibility_rate: 0.0, mean_objective: 0.0, mean_usage: vec![0.0; p] };
        }
        let k = trials.len() as f64;
        let feasible = trials.iter().filter(|t| t.feasible).count() as f64;
        let mean_objective = trials.iter().map(|t| t.objective as f64).sum::<f64>() / k;
        let mut mean_usage = vec![0.0; p];
        for t in &trials {
            for (m, &u) in mean_usage.iter_mut().zip(t.usage.iter()) {
                *m += u as f64 / k;
            }
        }
        TrialStats { feasibility_rate: feasible / k, mean_objective, mean_usage, trials }
    }
}

/// The moments governing concentration of the random draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    /// Expected objective of one draw: relaxation value over `lambda^2`.
    pub eps0: f64,
    /// Largest expected benefit mass incident to a single vertex.
    pub eps1: f64,
    /// Largest single edge benefit.
    pub eps2: f64,
    /// The comparison threshold `(ln n)^(2+gamma)`.
    pub threshold: f64,
}

/// Which concentration regime an instance sits in; informational only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    /// No positive-benefit edge among free vertices.
    Degenerate,
    /// Single edges dominate and the expected draw is small: the best-edge
    /// solution is the theory-backed winner.
    I,
    /// Single edges dominate but the expected draw is large: the draw
    /// concentrates.
    II,
    /// Neighborhoods dominate and the expected draw is large: the draw
    /// concentrates.
    III,
    /// Neighborhoods dominate and the expected draw is small: the local
    /// knapsack around the best center is the theory-backed winner.
    IV,
}

impl CaseLabel {
    /// Lower-case roman-numeral form used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::Degenerate => "degenerate",
            CaseLabel::I => "i",
            CaseLabel::II => "ii",
            CaseLabel::III => "iii",
            CaseLabel::IV => "iv",
        }
    }
}

/// The scaling factor `max(1, 2 sqrt(a_max n / beta))` dividing the rounding
/// probabilities. The clamp to 1 keeps probabilities in `[0,1]` on inputs
/// outside the usual regime (where the raw value is at least 2).
pub fn compute_lambda(s: &ScaledInstance, beta: f64) -> f64 {
    assert!(beta > 0.0, "beta must be positive");
    assert!(beta >= s.max_weight as f64, "beta must be at least a_max");
    let raw = 2.0 * (s.max_weight as f64 * s.base.n as f64 / beta).sqrt();
    raw.max(1.0)
}

/// One independent rounding trial: vertex `u` is selected with probability
/// `sqrt(x_u*)/lambda` (fixed vertices never, and they consume no random
/// draws). The result may violate budgets; `feasible` says whether it does.
pub fn round_once(
    s: &ScaledInstance,
    rs: &RelaxationSolution,
    lambda: f64,
    rng: &mut ChaCha8Rng,
) -> BinarySolution {
    assert!(lambda >= 1.0, "lambda below 1 would need probabilities above 1");
    let mut x = vec![0u8; s.base.n];
    for (u, xu) in x.iter_mut().enumerate() {
        if s.fixed_zero[u] {
            continue;
        }
        let prob = (rs.x[u].max(0.0).sqrt() / lambda).clamp(0.0, 1.0);
        if rng.gen_bool(prob) {
            *xu = 1;
        }
    }
    BinarySolution::evaluate_scaled(s, &x)
}

/// Restores feasibility by dropping selected vertices one at a time: each
/// round removes the vertex with the smallest ratio of lost benefit to
/// overshoot-weighted weight (exact integer cross-multiplication), ties
/// toward the largest index. The empty selection is feasible, so this
/// terminates.
pub fn repair_infeasible(s: &ScaledInstance, x: &[u8]) -> BinarySolution {
    let n = s.base.n;
    let w = s.budget;
    let mut sel: Vec<bool> = (0..n).map(|j| x[j] != 0 && !s.fixed_zero[j]).collect();
    let mut usage: Vec<u64> = s
        .weights
        .iter()
        .map(|row| (0..n).filter(|&j| sel[j]).map(|j| row[j]).sum())
        .collect();
    loop {
        let overshoot: Vec<u64> = usage.iter().map(|&u| u.saturating_sub(w)).collect();
        if overshoot.iter().all(|&o| o == 0) {
            break;
        }
        // Benefit lost by dropping v: its linear term plus edges into the
        // rest of the selection.
        let mut best: Option<(u64, u128, usize)> = None; // (loss, denom, v)
        for v in 0..n {
            if !sel[v] {
                continue;
            }
            let denom: u128 = overshoot
                .iter()
                .enumerate()
                .map(|(i, &o)| o as u128 * s.weights[i][v] as u128)
                .sum();
            if denom == 0 {
                continue; // dropping v relieves no overshooting budget
            }
            let loss: u64 = s.linear[v]
                + (0..n).filter(|&u| sel[u] && u != v).map(|u| s.benefits[v.min(u)][v.max(u)]).sum::<u64>();
            let better = match best {
                None => true,
                // ratio_v <= ratio_best, with equality also replacing so the
                // largest index wins ties
                Some((bl, bd, _)) => (loss as u128 * bd) <= (bl as u128 * denom),
            };
            if better {
                best = Some((loss, denom, v));
            }
        }
        let (_, _, v) = best.expect("an overshooting budget has a selected vertex with weight");
        sel[v] = false;
        for (i, u) in usage.iter_mut().enumerate() {
            *u -= s.weights[i][v];
        }
    }
    let out: Vec<u8> = sel.iter().map(|&b| b as u8).collect();
    let repaired = BinarySolution::evaluate_scaled(s, &out);
    assert!(repaired.feasible, "repair must end feasible");
    repaired
}

/// The best single edge: both endpoints of the free pair with the largest
/// working benefit (ties toward the smallest `(i, j)`), everything else
/// zero. On a pair-pruned instance every positive-benefit pair fits, so the
/// result is feasible; pairs that do not fit are skipped defensively.
pub fn best_edge_solution(s: &ScaledInstance) -> BinarySolution {
    let n = s.base.n;
    let mut best: Option<(u64, usize, usize)> = None;
    for i in 0..n {
        if s.fixed_zero[i] {
            continue;
        }
        for j in (i + 1)..n {
            if s.fixed_zero[j] || s.benefits[i][j] == 0 {
                continue;
            }
            if s.weights.iter().any(|row| row[i] + row[j] > s.budget) {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, _, _)) => s.benefits[i][j] > b,
            };
            if better {
                best = Some((s.benefits[i][j], i, j));
            }
        }
    }
    let mut x = vec![0u8; n];
    if let Some((_, i, j)) = best {
        x[i] = 1;
        x[j] = 1;
    }
    BinarySolution::evaluate_scaled(s, &x)
}

/// Failure modes of the local knapsack construction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalKnapsackError {
    /// The chosen center does not fit a budget by itself; cannot happen on
    /// pruned instances.
    #[error("center vertex {center} exceeds budget {row} on its own")]
    CenterOverBudget { center: usize, row: usize },
}

/// The center vertex the local knapsack would be built around: the free
/// vertex maximizing the expected benefit mass of its neighborhood,
/// `sum_u b_uv sqrt(x_u*)/lambda`, ties toward the smallest index. `None`
/// when every score is zero (no useful neighborhood).
pub fn local_knapsack_center(s: &ScaledInstance, rs: &RelaxationSolution, lambda: f64) -> Option<usize> {
    let n = s.base.n;
    let mut best: Option<(f64, usize)> = None;
    for v in 0..n {
        if s.fixed_zero[v] {
            continue;
        }
        let score: f64 = (0..n)
            .filter(|&u| u != v && !s.fixed_zero[u])
            .map(|u| s.benefits[v.min(u)][v.max(u)] as f64 * rs.x[u].max(0.0).sqrt() / lambda)
            .sum();
        let better = match best {
            None => score > 0.0,
            Some((b, _)) => score > b,
        };
        if better {
            best = Some((score, v));
        }
    }
    best.map(|(_, v)| v)
}

/// Deterministic fallback for the regime where one neighborhood carries the
/// benefit mass: fix the best center vertex, then pack its neighbors by a
/// linear multi-constraint knapsack over the residual budgets `W - a_hat_iv`
/// rounded within factor `p+1`. Neighbors too heavy for a residual budget
/// are left out (they could never join the center anyway).
pub fn local_knapsack_solution(
    s: &ScaledInstance,
    rs: &RelaxationSolution,
    lambda: f64,
) -> Result<BinarySolution, LocalKnapsackError> {
    let n = s.base.n;
    let center = match local_knapsack_center(s, rs, lambda) {
        Some(v) => v,
        None => return Ok(BinarySolution::evaluate_scaled(s, &vec![0u8; n])),
    };
    for (i, row) in s.weights.iter().enumerate() {
        if row[center] > s.budget {
            return Err(LocalKnapsackError::CenterOverBudget { center, row: i });
        }
    }
    let residual: Vec<u64> = s.weights.iter().map(|row| s.budget - row[center]).collect();
    let items: Vec<usize> = (0..n)
        .filter(|&u| {
            u != center
                && !s.fixed_zero[u]
                && s.benefits[center.min(u)][center.max(u)] > 0
                && s.weights.iter().enumerate().all(|(i, row)| row[u] <= residual[i])
        })
        .collect();
    let mut x = vec![0u8; n];
    x[center] = 1;
    if !items.is_empty() {
        let benefits: Vec<u64> = items
            .iter()
            .map(|&u| s.benefits[center.min(u)][center.max(u)])
            .collect();
        let weights: Vec<Vec<u64>> = s
            .weights
            .iter()
            .map(|row| items.iter().map(|&u| row[u]).collect())
            .collect();
        let prob = MkpProblem::new(benefits, weights, residual)
            .expect("item weights were filtered to fit the residual budgets");
        let lp = solve_lp_vertex(&prob);
        let packed = round_vertex(&prob, &lp);
        for (idx, &u) in items.iter().enumerate() {
            x[u] = packed.x[idx];
        }
    }
    let sol = BinarySolution::evaluate_scaled(s, &x);
    assert!(sol.feasible, "center plus residual-budget packing cannot overshoot");
    Ok(sol)
}

/// Classifies the instance into the concentration regime implied by the
/// moments of a single rounding draw at `x*`. Purely informational.
pub fn concentration_diagnostics(
    s: &ScaledInstance,
    rs: &RelaxationSolution,
    lambda: f64,
    gamma: f64,
) -> (CaseLabel, EpsilonReport) {
    let n = s.base.n;
    let threshold = if n >= 1 { (n as f64).ln().powf(2.0 + gamma) } else { 0.0 };
    let mut eps2 = 0.0f64;
    let mut eps1 = 0.0f64;
    let mut has_edge = false;
    for v in 0..n {
        if s.fixed_zero[v] {
            continue;
        }
        let mut mass = 0.0f64;
        for u in 0..n {
            if u == v || s.fixed_zero[u] {
                continue;
            }
            let b = s.benefits[v.min(u)][v.max(u)];
            if b == 0 {
                continue;
            }
            has_edge = true;
            eps2 = eps2.max(b as f64);
            mass += b as f64 * rs.x[u].max(0.0).sqrt() / lambda;
        }
        eps1 = eps1.max(mass);
    }
    if !has_edge {
        return (CaseLabel::Degenerate, EpsilonReport { eps0: 0.0, eps1: 0.0, eps2: 0.0, threshold });
    }
    let eps0 = rs.value / (lambda * lambda);
    let label = if eps2 >= eps1 {
        if eps0 < eps2 * threshold {
            CaseLabel::I
        } else {
            CaseLabel::II
        }
    } else if eps0 < eps1 * threshold {
        CaseLabel::IV
    } else {
        CaseLabel::III
    };
    (label, EpsilonReport { eps0, eps1, eps2, threshold })
}

/// Full configuration of [`solve_auto`].
#[derive(Clone, Debug, Default)]
pub struct AutoConfig {
    /// Master seed; overrides the seeds inside the nested configs.
    pub seed: u64,
    /// Greedy stage settings (subset size `t`).
    pub greedy: GreedyConfig,
    /// Relaxation solver settings.
    pub relaxation: SolverConfig,
    /// Randomized stage settings.
    pub rounding: RoundingConfig,
}

/// Result of a full solve, serializable as a stable JSON report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Objective of the winner in original units.
    pub value: u64,
    /// The winning assignment; feasible for the original instance.
    pub x: Vec<u8>,
    /// Name of the winning strategy.
    pub strategy: String,
    /// Best objective achieved by each strategy that ran.
    pub strategy_values: BTreeMap<String, u64>,
    /// Upper bound on the scaled integral optimum: relaxation value plus the
    /// fractional LP value of the linear term.
    pub upper_bound: f64,
    /// Raw rounding trials and their aggregates.
    pub trial_stats: TrialStats,
    /// Concentration regime of the (pruned) instance.
    pub case_label: String,
    /// The moments behind the case label.
    pub epsilons: EpsilonReport,
    /// Regime and convergence warnings, if any.
    pub warnings: Vec<String>,
    /// The master seed that produced this report.
    pub seed: u64,
}

/// Strategy precedence for breaking value ties, most trusted first: the
/// linear branch is provably near-optimal when the quadratic part is
/// degenerate, then the deterministic strategies, then the randomized one.
const PRECEDENCE: [&str; 5] = ["linear", "greedy", "edge", "local", "rounding"];

fn default_trials(n: usize) -> usize {
    ((n as f64).powf(0.6).ceil() as usize).max(1)
}

pub(crate) fn effective_beta(s: &ScaledInstance, requested: Option<f64>) -> f64 {
    let lo = s.max_weight.max(1) as f64;
    let hi = s.budget as f64;
    requested.unwrap_or(hi).clamp(lo, hi)
}

pub(crate) fn trial_rng(seed: u64, part: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ROUND_STREAM + part as u64 * PART_SPAN + trial as u64);
    rng
}

/// Runs the whole pipeline — scale, prune, split, greedy plus the randomized
/// stage on each part, and the linear branch — and reports the best feasible
/// solution in original units with provenance.
pub fn solve_auto(inst: &PiqpInstance, cfg: &AutoConfig) -> SolveReport {
    let violations = validate(inst);
    assert!(violations.is_empty(), "solve_auto requires a valid instance: {:?}", violations);
    let mut warnings = regime_warnings(inst);

    let pruned = inst.scale().prune_infeasible_pairs();
    let (light, heavy) = pruned.split_piqps_piqpr();
    let trials = cfg.rounding.trials.unwrap_or_else(|| default_trials(inst.n)).max(1);

    // Candidates carry (strategy name, original-units evaluation).
    let mut candidates: Vec<(&'static str, BinarySolution)> = Vec::new();
    let mut records: Vec<TrialRecord> = Vec::new();

    let edge_sol = best_edge_solution(&pruned);
    candidates.push(("edge", BinarySolution::evaluate(inst, &edge_sol.x)));

    // Greedy also runs on the undivided instance: when the split costs
    // benefit (cross edges between light and heavy vertices), the full-view
    // pass recovers it.
    if !pruned.free_vars().is_empty() {
        let g_full = greedy_solve(&pruned, &cfg.greedy);
        candidates.push(("greedy", BinarySolution::evaluate(inst, &g_full.x)));
    }

    for (part_idx, part) in [&light, &heavy].into_iter().enumerate() {
        if part.free_vars().is_empty() {
            continue;
        }
        let part_name = if part_idx == 0 { "light" } else { "heavy" };
        let g = greedy_solve(part, &cfg.greedy);
        candidates.push(("greedy", BinarySolution::evaluate(inst, &g.x)));

        // The randomized stage needs every single vertex to fit on its own.
        if part.max_weight > part.budget {
            continue;
        }
        let beta = effective_beta(part, cfg.rounding.beta);
        let lambda = compute_lambda(part, beta);
        let warm: Vec<Vec<f64>> = [&g.x, &edge_sol.x]
            .iter()
            .map(|x| x.iter().map(|&b| b as f64).collect())
            .collect();
        let rel_cfg = SolverConfig { seed: cfg.seed, warm_starts: warm, ..cfg.relaxation.clone() };
        let rel = solve_relaxation(part, &rel_cfg);
        if !rel.converged {
            warnings.push(format!(
                "relaxation did not converge on the {part_name} part within {} iterations",
                cfg.relaxation.max_iterations
            ));
        }

        let mut best_trial: Option<BinarySolution> = None;
        for j in 0..trials {
            let mut rng = trial_rng(cfg.seed, part_idx, j);
            let raw = round_once(part, &rel, lambda, &mut rng);
            let mut record = TrialRecord {
                objective: raw.objective,
                usage: raw.usage.clone(),
                feasible: raw.feasible,
                repaired: false,
            };
            let kept = if raw.feasible {
                Some(raw)
            } else if cfg.rounding.discard_infeasible {
                None
            } else {
                record.repaired = true;
                Some(repair_infeasible(part, &raw.x))
            };
            records.push(record);
            if let Some(sol) = kept {
                let better = match &best_trial {
                    None => true,
                    Some(b) => sol.objective > b.objective,
                };
                if better {
                    best_trial = Some(sol);
                }
            }
        }
        if let Some(bt) = best_trial {
            candidates.push(("rounding", BinarySolution::evaluate(inst, &bt.x)));
        }

        match local_knapsack_solution(part, &rel, lambda) {
            Ok(z) => candidates.push(("local", BinarySolution::evaluate(inst, &z.x))),
            Err(e) => warnings.push(format!("local knapsack skipped on the {part_name} part: {e}")),
        }
    }

    // Linear branch: the quadratic-free knapsack over the working linear
    // terms, rounded within p+1; also supplies the LP part of the bound.
    let free = pruned.free_vars();
    let mut lp_linear_value = 0.0;
    if free.iter().any(|&j| pruned.linear[j] > 0) {
        let benefits: Vec<u64> = free.iter().map(|&j| pruned.linear[j]).collect();
        let weights: Vec<Vec<u64>> = pruned
            .weights
            .iter()
            .map(|row| free.iter().map(|&j| row[j]).collect())
            .collect();
        let budgets = vec![pruned.budget; inst.p];
        let prob = MkpProblem::new(benefits, weights, budgets)
            .expect("pruning left no free vertex above the budget");
        let lp = solve_lp_vertex(&prob);
        lp_linear_value = lp.value_f64();
        let packed = round_vertex(&prob, &lp);
        let mut x = vec![0u8; inst.n];
        for (idx, &j) in free.iter().enumerate() {
            x[j] = packed.x[idx];
        }
        candidates.push(("linear", BinarySolution::evaluate(inst, &x)));
    }

    // Strategy scoreboard and the winner under the fixed precedence.
    let mut strategy_values: BTreeMap<String, u64> = BTreeMap::new();
    for (name, sol) in &candidates {
        debug_assert!(sol.feasible, "candidate from strategy {name} must be feasible");
        let entry = strategy_values.entry((*name).to_string()).or_insert(0);
        *entry = (*entry).max(sol.objective);
    }
    let mut winner: Option<(&'static str, &BinarySolution)> = None;
    for name in PRECEDENCE {
        for (cand_name, sol) in &candidates {
            if *cand_name != name {
                continue;
            }
            let better = match winner {
                None => true,
                Some((_, w)) => sol.objective > w.objective,
            };
            if better {
                winner = Some((name, sol));
            }
        }
    }
    let (strategy, best) = match winner {
        Some((name, sol)) => (name.to_string(), sol.clone()),
        None => ("zero".to_string(), BinarySolution::evaluate(inst, &vec![0u8; inst.n])),
    };

    // Upper bound and diagnostics on the full pruned instance; every
    // candidate seeds the relaxation, so the bound always dominates the
    // returned value.
    let warm_full: Vec<Vec<f64>> = candidates
        .iter()
        .map(|(_, sol)| sol.x.iter().map(|&b| b as f64).collect())
        .collect();
    let rel_cfg_full = SolverConfig { seed: cfg.seed, warm_starts: warm_full, ..cfg.relaxation.clone() };
    let rel_full = solve_relaxation(&pruned, &rel_cfg_full);
    if !rel_full.converged {
        warnings.push(format!(
            "relaxation did not converge on the full instance within {} iterations",
            cfg.relaxation.max_iterations
        ));
    }
    let beta_full = effective_beta(&pruned, cfg.rounding.beta);
    let lambda_full = compute_lambda(&pruned, beta_full);
    check_sqrt_budget_bound(&pruned, &rel_full.x, beta_full);
    let (label, epsilons) = concentration_diagnostics(&pruned, &rel_full, lambda_full, cfg.rounding.gamma);

    let trial_stats = TrialStats::from_records(records, inst.p);
    if !trial_stats.trials.is_empty() && trial_stats.feasibility_rate < 1.0 - cfg.rounding.delta {
        warnings.push(format!(
            "trial feasibility rate {:.3} fell below 1 - delta = {:.3}",
            trial_stats.feasibility_rate,
            1.0 - cfg.rounding.delta
        ));
    }

    SolveReport {
        value: best.objective,
        x: best.x.clone(),
        strategy,
        strategy_values,
        upper_bound: rel_full.value + lp_linear_value,
        trial_stats,
        case_label: label.as_str().to_string(),
        epsilons,
        warnings,
        seed: cfg.seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, GenParams, GraphSpec, InstanceKind, PiqpInstance};
    use num::rational::BigRational;
    use num::BigInt;

    fn made_up_relaxation(x: Vec<f64>, value: f64) -> RelaxationSolution {
        RelaxationSolution {
            x,
            edge_vals: Vec::new(),
            value,
            iterations: 0,
            converged: true,
            residual: 0.0,
            trace: Vec::new(),
        }
    }

    fn scaled_unit(n: usize, edges: &[(usize, usize, u64)], budget: u64) -> ScaledInstance {
        PiqpInstance::from_edges(n, edges, vec![0; n], vec![vec![1; n]], vec![budget])
            .unwrap()
            .scale()
    }

    #[test]
    fn lambda_matches_formula_and_clamp() {
        let s16 = PiqpInstance::from_dense(vec![vec![0; 16]; 16], vec![0; 16], vec![vec![1; 16]], vec![4])
            .unwrap()
            .scale();
        assert_eq!(compute_lambda(&s16, 4.0), 4.0, "a_max=1, n=16, beta=4");
        let s4 = PiqpInstance::from_dense(vec![vec![0; 4]; 4], vec![0; 4], vec![vec![1; 4]], vec![4])
            .unwrap()
            .scale();
        assert_eq!(compute_lambda(&s4, 4.0), 2.0, "a_max=1, n=4, beta=4");
        let s1 = PiqpInstance::from_dense(vec![vec![0]], vec![0], vec![vec![1]], vec![1])
            .unwrap()
            .scale();
        assert_eq!(compute_lambda(&s1, 1.0), 2.0, "a_max=1, n=1, beta=1");
        // Raw value 2*sqrt(1/4) = 1 sits exactly at the clamp.
        let s_clamp = PiqpInstance::from_dense(vec![vec![0]], vec![0], vec![vec![1]], vec![4])
            .unwrap()
            .scale();
        assert_eq!(compute_lambda(&s_clamp, 4.0), 1.0, "raw lambda below 1 clamps to 1");
    }

    #[test]
    fn round_once_zero_relaxation_always_zero() {
        let s = scaled_unit(3, &[(0, 1, 4)], 10);
        let rs = made_up_relaxation(vec![0.0; 3], 0.0);
        let mut rng = trial_rng(7, 0, 0);
        for _ in 0..50 {
            let y = round_once(&s, &rs, 2.0, &mut rng);
            assert_eq!(y.x, vec![0, 0, 0]);
            assert_eq!(y.objective, 0);
        }
    }

    /// With x* = 1 and lambda = 2 each vertex appears with probability 1/2,
    /// so a single edge of benefit 12 contributes 12/4 = 3 in expectation.
    /// A 100k-trial Monte Carlo mean must sit within 3 standard errors.
    #[test]
    fn round_once_single_edge_expectation() {
        let s = scaled_unit(2, &[(0, 1, 12)], 100);
        let rs = made_up_relaxation(vec![1.0, 1.0], 12.0);
        let trials = 100_000usize;
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for j in 0..trials {
            let mut rng = trial_rng(42, 0, j);
            let y = round_once(&s, &rs, 2.0, &mut rng);
            let f = y.quadratic as f64;
            sum += f;
            sum_sq += f * f;
        }
        let mean = sum / trials as f64;
        let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
        let se = (var / trials as f64).sqrt();
        let expected = 12.0 / 4.0;
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "mean {mean} vs expected {expected} (3 SE = {})",
            3.0 * se
        );
    }

    #[test]
    fn repair_keeps_feasible_input_unchanged() {
        let s = scaled_unit(3, &[(0, 1, 5)], 3);
        let fixed = repair_infeasible(&s, &[1, 1, 1]);
        assert_eq!(fixed.x, vec![1, 1, 1], "already feasible, nothing to drop");
    }

    #[test]
    fn repair_drops_exactly_the_overshoot_with_unit_weights() {
        // Five unit-weight vertices, budget 3, no benefits: the two largest
        // indices go first (all ratios tie at zero loss).
        let s = scaled_unit(5, &[], 3);
        let fixed = repair_infeasible(&s, &[1, 1, 1, 1, 1]);
        assert_eq!(fixed.x, vec![1, 1, 1, 0, 0]);
        assert!(fixed.feasible);
    }

    #[test]
    fn repair_prefers_cheap_loss_per_relief() {
        // Budget 4, weights (1, 4): dropping vertex 2 (weight 4, loss 3)
        // relieves more per unit loss than vertex 0/1.
        let inst = PiqpInstance::from_edges(
            3,
            &[(0, 1, 9), (1, 2, 3)],
            vec![0; 3],
            vec![vec![1, 1, 4]],
            vec![4],
        )
        .unwrap();
        let fixed = repair_infeasible(&inst.scale(), &[1, 1, 1]);
        assert_eq!(fixed.x, vec![1, 1, 0], "keep the benefit-9 edge");
        assert_eq!(fixed.objective, 9);
    }

    #[test]
    fn best_edge_picks_max_then_smallest_pair() {
        let s = scaled_unit(4, &[(0, 1, 2), (1, 3, 5), (2, 3, 4)], 10);
        let sol = best_edge_solution(&s);
        assert_eq!(sol.x, vec![0, 1, 0, 1]);
        assert_eq!(sol.quadratic, 5);

        let tie = scaled_unit(4, &[(0, 1, 7), (2, 3, 7)], 10);
        assert_eq!(best_edge_solution(&tie).x, vec![1, 1, 0, 0], "tie goes to smallest pair");

        let empty = scaled_unit(3, &[], 10);
        assert_eq!(best_edge_solution(&empty).x, vec![0, 0, 0], "no edges, zero vector");
    }

    #[test]
    fn local_knapsack_covers_single_edge_and_star() {
        let s = scaled_unit(2, &[(0, 1, 3)], 10);
        let rs = made_up_relaxation(vec![1.0, 1.0], 3.0);
        let z = local_knapsack_solution(&s, &rs, 1.0).unwrap();
        assert_eq!(z.x, vec![1, 1], "single edge is covered");

        // Star around 0 with room for everyone.
        let star = scaled_unit(4, &[(0, 1, 2), (0, 2, 3), (0, 3, 4)], 10);
        let rs_star = made_up_relaxation(vec![1.0; 4], 9.0);
        let z_star = local_knapsack_solution(&star, &rs_star, 1.0).unwrap();
        assert_eq!(z_star.x, vec![1, 1, 1, 1]);
        assert_eq!(z_star.quadratic, 9);
    }

    #[test]
    fn local_knapsack_respects_residual_budget() {
        // Center 0 (weight 3); neighbors weigh 5 each against budget 8, so
        // only one fits the residual 5; the knapsack takes the benefit-9 one.
        let inst = PiqpInstance::from_edges(
            3,
            &[(0, 1, 9), (0, 2, 4)],
            vec![0; 3],
            vec![vec![3, 5, 5]],
            vec![8],
        )
        .unwrap();
        let s = inst.scale();
        let rs = made_up_relaxation(vec![1.0; 3], 13.0);
        let z = local_knapsack_solution(&s, &rs, 1.0).unwrap();
        assert_eq!(z.x, vec![1, 1, 0]);
        assert_eq!(z.quadratic, 9);
    }

    #[test]
    fn diagnostics_degenerate_without_edges() {
        let s = scaled_unit(3, &[], 5);
        let rs = made_up_relaxation(vec![0.0; 3], 0.0);
        let (label, eps) = concentration_diagnostics(&s, &rs, 2.0, 0.1);
        assert_eq!(label, CaseLabel::Degenerate);
        assert_eq!(label.as_str(), "degenerate");
        assert_eq!((eps.eps0, eps.eps1, eps.eps2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn diagnostics_single_edge_lands_in_case_i() {
        let s = scaled_unit(2, &[(0, 1, 5)], 2);
        let rs = made_up_relaxation(vec![1.0, 1.0], 5.0);
        let (label, eps) = concentration_diagnostics(&s, &rs, 2.0, 0.1);
        assert_eq!(eps.eps2, 5.0);
        assert!((eps.eps1 - 2.5).abs() < 1e-12, "one neighbor: 5 * 1 / 2");
        assert!((eps.eps0 - 1.25).abs() < 1e-12, "value / lambda^2");
        assert!(eps.eps1 <= eps.eps2);
        assert_eq!(label, CaseLabel::I, "edge dominates and eps0 is small");
    }

    #[test]
    fn solve_auto_k4_clique_reaches_three() {
        let params = GenParams {
            kind: InstanceKind::Clique,
            graph: Some(GraphSpec::Complete(4)),
            t: 3,
            ..GenParams::default()
        };
        let inst = generate(&params, 1).unwrap();
        let report = solve_auto(&inst, &AutoConfig::default());
        assert_eq!(report.value, 3, "three chosen vertices of K_4 span three edges");
        assert_eq!(report.x.iter().map(|&b| b as u64).sum::<u64>(), 3);
        for (name, &v) in &report.strategy_values {
            assert!(v <= report.value, "strategy {name} beat the winner");
        }
    }

    #[test]
    fn solve_auto_linear_only_uses_linear_branch() {
        let inst = PiqpInstance::from_dense(
            vec![vec![0; 2]; 2],
            vec![5, 3],
            vec![vec![1, 1]],
            vec![2],
        )
        .unwrap();
        let report = solve_auto(&inst, &AutoConfig::default());
        assert_eq!(report.value, 8, "both items fit");
        assert_eq!(report.strategy, "linear", "quadratic strategies have nothing to offer");
        assert_eq!(report.case_label, "degenerate");
    }

    #[test]
    fn solve_auto_dominates_components_and_bound() {
        let params = GenParams { n: 9, p: 2, density: 0.6, ..GenParams::default() };
        for seed in 0..15 {
            let inst = generate(&params, seed).unwrap();
            let report = solve_auto(&inst, &AutoConfig { seed, ..AutoConfig::default() });
            let check = BinarySolution::evaluate(&inst, &report.x);
            assert!(check.feasible, "seed {seed}: winner must be feasible in original units");
            assert_eq!(check.objective, report.value, "seed {seed}: reported value matches x");
            for (name, &v) in &report.strategy_values {
                assert!(v <= report.value, "seed {seed}: strategy {name} beat auto");
            }
            assert!(
                report.value as f64 <= report.upper_bound + 1e-6 * (1.0 + report.upper_bound),
                "seed {seed}: value {} above bound {}",
                report.value,
                report.upper_bound
            );
        }
    }

    #[test]
    fn solve_auto_reports_are_byte_identical_for_a_seed() {
        let params = GenParams { n: 10, p: 2, density: 0.7, ..GenParams::default() };
        let inst = generate(&params, 12).unwrap();
        let cfg = AutoConfig { seed: 5, ..AutoConfig::default() };
        let a = serde_json::to_string_pretty(&solve_auto(&inst, &cfg)).unwrap();
        let b = serde_json::to_string_pretty(&solve_auto(&inst, &cfg)).unwrap();
        assert_eq!(a, b, "same seed must reproduce the report bit for bit");
        let parsed: SolveReport = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed.seed, 5);
    }

    /// On light parts the local knapsack is within 2(p+1) of the fractional
    /// local optimum at full budgets: halving a full-budget solution fits
    /// the residual budgets because the center occupies at most half of
    /// each. Verified in exact rationals.
    #[test]
    fn local_knapsack_case_iv_factor_on_light_parts() {
        let params = GenParams { n: 10, p: 2, density: 0.7, ..GenParams::default() };
        let mut checked = 0;
        for seed in 0..30 {
            let inst = generate(&params, seed).unwrap();
            let (light, _) = inst.scale().prune_infeasible_pairs().split_piqps_piqpr();
            if light.free_vars().is_empty() {
                continue;
            }
            let rel = solve_relaxation(&light, &SolverConfig::default());
            let beta = light.budget as f64;
            let lambda = compute_lambda(&light, beta);
            let center = match local_knapsack_center(&light, &rel, lambda) {
                Some(v) => v,
                None => continue,
            };
            let z = local_knapsack_solution(&light, &rel, lambda).unwrap();
            let f_z: u64 = (0..light.base.n)
                .filter(|&u| u != center && z.x[u] == 1)
                .map(|u| light.benefits[center.min(u)][center.max(u)])
                .sum();

            // Fractional local problem at FULL budgets over the same items.
            let items: Vec<usize> = (0..light.base.n)
                .filter(|&u| {
                    u != center
                        && !light.fixed_zero[u]
                        && light.benefits[center.min(u)][center.max(u)] > 0
                })
                .collect();
            if items.is_empty() {
                continue;
            }
            let benefits: Vec<u64> =
                items.iter().map(|&u| light.benefits[center.min(u)][center.max(u)]).collect();
            let weights: Vec<Vec<u64>> =
                light.weights.iter().map(|row| items.iter().map(|&u| row[u]).collect()).collect();
            let prob = MkpProblem::new(benefits, weights, vec![light.budget; light.base.p]).unwrap();
            let full_lp = solve_lp_vertex(&prob);
            let factor = BigRational::from_integer(BigInt::from(2 * (light.base.p as u64 + 1)));
            let lhs = factor * BigRational::from_integer(BigInt::from(f_z));
            assert!(
                lhs >= full_lp.value,
                "seed {seed}: 2(p+1) * {f_z} < fractional local optimum {}",
                full_lp.value
            );
            checked += 1;
        }
        assert!(checked >= 5, "suite must exercise the factor check, got {checked}");
    }

    #[test]
    fn trial_stats_aggregates_are_recomputable() {
        let records = vec![
            TrialRecord { objective: 4, usage: vec![2, 0], feasible: true, repaired: false },
            TrialRecord { objective: 0, usage: vec![6, 2], feasible: false, repaired: true },
        ];
        let stats = TrialStats::from_records(records, 2);
        assert_eq!(stats.feasibility_rate, 0.5);
        assert_eq!(stats.mean_objective, 2.0);
        assert_eq!(stats.mean_usage, vec![4.0, 1.0]);
    }

    #[test]
    fn discard_mode_keeps_only_feasible_trials() {
        let params = GenParams { n: 8, p: 1, density: 0.9, ..GenParams::default() };
        let inst = generate(&params, 4).unwrap();
        let cfg = AutoConfig {
            seed: 9,
            rounding: RoundingConfig { discard_infeasible: true, ..RoundingConfig::default() },
            ..AutoConfig::default()
        };
        let report = solve_auto(&inst, &cfg);
        for t in &report.trial_stats.trials {
            assert!(!t.repaired, "discard mode never repairs");
        }
        let check = BinarySolution::evaluate(&inst, &report.x);
        assert!(check.feasible);
    }
}
