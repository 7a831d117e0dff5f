//! Command-line front-end: generate instances, solve them, cross-check
//! against the exact oracle, solve standalone linear knapsacks, and run
//! benchmark sweeps that record per-strategy values and empirical ratios.
//!
//! Global flags `--seed`, `--out`, `--quiet` and `--config` apply to every
//! subcommand. A JSON config file may mirror any flag; an explicit flag
//! always wins over the file, which wins over the built-in default. Exit
//! codes: 0 on success, 1 when the solve finished but carries a
//! non-convergence warning, 2 on input or usage errors.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use crate::greedy::{greedy_solve, GreedyConfig};
use crate::instance::{
    generate, read_instance, write_instance_string, BinarySolution, GenParams, GraphSpec,
    InstanceKind, IoError, PiqpInstance,
};
use crate::mkp::{round_vertex, solve_lp_vertex, MkpProblem};
use crate::oracle;
use crate::relaxation::{solve_relaxation, SolverConfig};
use crate::rounding::{
    best_edge_solution, compute_lambda, concentration_diagnostics, effective_beta,
    local_knapsack_solution, repair_infeasible, round_once, solve_auto, trial_rng, AutoConfig,
    RoundingConfig, SolveReport, TrialRecord, TrialStats,
};

/// Fixed benchmark CSV header; columns never change order.
pub const BENCH_HEADER: &str = "instance_id,n,p,W,a_max,greedy,edge,local,rounding,linear,auto,oracle,upper_bound,ratio,case,solve_ms,oracle_ms";

#[derive(Parser, Debug)]
#[command(name = "piqp", version, about = "Approximation toolkit for positive 0-1 quadratic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Master seed for generation and solver randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress and warning chatter on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    /// JSON config file mirroring the flags; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Solve an instance and emit a JSON report.
    Solve(SolveArgs),
    /// Solve an instance exactly by exhaustive search (small n only).
    Oracle(OracleArgs),
    /// Solve a standalone linear multi-constraint knapsack file.
    Mkp(MkpArgs),
    /// Sweep generated instances and emit benchmark CSV rows.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Qkp,
    Dsp,
    Clique,
}

impl KindArg {
    fn to_kind(self) -> InstanceKind {
        match self {
            KindArg::Qkp => InstanceKind::Qkp,
            KindArg::Dsp => InstanceKind::Dsp,
            KindArg::Clique => InstanceKind::Clique,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MethodArg {
    /// Everything, best feasible solution wins.
    Auto,
    /// Relaxation plus randomized rounding trials.
    Socp,
    /// The t-subset ratio greedy alone.
    Greedy,
    /// The best single edge alone.
    Edge,
    /// The local knapsack around the best center.
    Local,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Auto => "auto",
            MethodArg::Socp => "rounding",
            MethodArg::Greedy => "greedy",
            MethodArg::Edge => "edge",
            MethodArg::Local => "local",
        }
    }
}

#[derive(Args, Debug, Clone)]
struct GenArgs {
    /// Instance family: qkp, dsp or clique.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Variable count (qkp, dsp; also gnp graphs).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (qkp, dsp, gnp graphs).
    #[arg(long)]
    density: Option<f64>,
    /// Constraint count (qkp).
    #[arg(long)]
    p: Option<usize>,
    /// Cardinality budget (dsp).
    #[arg(long)]
    k: Option<u64>,
    /// Clique budget (clique).
    #[arg(long)]
    t: Option<u64>,
    /// Clique input graph: "k<m>" for complete, "gnp" to use --n/--density.
    #[arg(long)]
    graph: Option<String>,
    /// Inclusive qkp edge benefit range, "lo,hi".
    #[arg(long, value_parser = parse_range)]
    benefit_range: Option<(u64, u64)>,
    /// Inclusive qkp weight range, "lo,hi".
    #[arg(long, value_parser = parse_range)]
    weight_range: Option<(u64, u64)>,
    /// Inclusive qkp budget range, "lo,hi"; derived from weights if absent.
    #[arg(long, value_parser = parse_range)]
    budget_range: Option<(u64, u64)>,
}

#[derive(Args, Debug, Clone)]
struct SolveArgs {
    /// Instance file to solve.
    #[arg(long)]
    input: PathBuf,
    /// Solution method.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Rounding trial count; default ceil(n^0.6).
    #[arg(long)]
    trials: Option<usize>,
    /// Budget lower-bound parameter in [a_max, W]; default W.
    #[arg(long)]
    beta: Option<f64>,
    /// Concentration threshold exponent offset.
    #[arg(long)]
    gamma: Option<f64>,
    /// Trial feasibility-rate warning tolerance in (0, 1].
    #[arg(long)]
    delta: Option<f64>,
    /// Greedy ratio parameter (rounds consider up to t+1 vertices).
    #[arg(long)]
    t: Option<usize>,
    /// Relaxation iteration cap per start.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Relaxation relative tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Relaxation start points.
    #[arg(long)]
    multistarts: Option<usize>,
    /// Discard infeasible trials instead of repairing them.
    #[arg(long)]
    discard: bool,
}

#[derive(Args, Debug, Clone)]
struct OracleArgs {
    /// Instance file to solve exactly.
    #[arg(long)]
    input: PathBuf,
    /// Refuse instances with more variables than this.
    #[arg(long)]
    limit_n: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct MkpArgs {
    /// Knapsack file: {"b": [...], "A": [[...]], "budgets": [...]}.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct BenchArgs {
    /// Instance family to sweep.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Comma-separated list of sizes.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    /// Comma-separated list of constraint counts.
    #[arg(long, value_delimiter = ',')]
    p_list: Option<Vec<usize>>,
    /// Seeds 0..seeds per (n, p) cell.
    #[arg(long)]
    seeds: Option<u64>,
    /// Edge probability of generated instances.
    #[arg(long)]
    density: Option<f64>,
    /// Greedy ratio parameter used by the solver.
    #[arg(long)]
    t: Option<usize>,
    /// Rounding trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Budget lower-bound parameter.
    #[arg(long)]
    beta: Option<f64>,
    /// Concentration threshold exponent offset.
    #[arg(long)]
    gamma: Option<f64>,
    /// Run the oracle only when n is at most this.
    #[arg(long)]
    oracle_limit: Option<usize>,
    /// Zero the wall-time columns so output is byte-stable.
    #[arg(long)]
    stable: bool,
}

/// Optional JSON file mirroring the flags; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    out: Option<PathBuf>,
    quiet: Option<bool>,
    kind: Option<String>,
    n: Option<usize>,
    density: Option<f64>,
    p: Option<usize>,
    k: Option<u64>,
    t: Option<u64>,
    graph: Option<String>,
    benefit_range: Option<(u64, u64)>,
    weight_range: Option<(u64, u64)>,
    budget_range: Option<(u64, u64)>,
    method: Option<String>,
    trials: Option<usize>,
    beta: Option<f64>,
    gamma: Option<f64>,
    delta: Option<f64>,
    max_iters: Option<usize>,
    rel_tol: Option<f64>,
    multistarts: Option<usize>,
    discard: Option<bool>,
    limit_n: Option<usize>,
    n_list: Option<Vec<usize>>,
    p_list: Option<Vec<usize>>,
    seeds: Option<u64>,
    oracle_limit: Option<usize>,
    stable: Option<bool>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Instance(#[from] IoError),
    #[error(transparent)]
    Generate(#[from] crate::instance::GenerateError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error("bad config file {path}: {message}")]
    Config { path: String, message: String },
    #[error("{0}")]
    BadArg(String),
}

/// Parses "lo,hi" into an inclusive range pair.
fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"lo,hi\", got {s:?}"));
    }
    let lo = parts[0].trim().parse::<u64>().map_err(|e| format!("bad lo: {e}"))?;
    let hi = parts[1].trim().parse::<u64>().map_err(|e| format!("bad hi: {e}"))?;
    Ok((lo, hi))
}

/// Parses a graph spec: "k<m>" (complete graph) or "gnp" (uses n/density).
fn parse_graph(s: &str, n: usize, density: f64) -> Result<GraphSpec, CliError> {
    let lower = s.to_ascii_lowercase();
    if let Some(m) = lower.strip_prefix('k') {
        if let Ok(m) = m.parse::<usize>() {
            return Ok(GraphSpec::Complete(m));
        }
    }
    if lower == "gnp" {
        return Ok(GraphSpec::Gnp { n, density });
    }
    Err(CliError::BadArg(format!(
        "unrecognized graph spec {s:?}; use \"k<m>\" or \"gnp\""
    )))
}

fn parse_kind(s: &str) -> Result<KindArg, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "qkp" => Ok(KindArg::Qkp),
        "dsp" => Ok(KindArg::Dsp),
        "clique" => Ok(KindArg::Clique),
        other => Err(CliError::BadArg(format!("unknown kind {other:?}"))),
    }
}

fn parse_method(s: &str) -> Result<MethodArg, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "auto" => Ok(MethodArg::Auto),
        "socp" => Ok(MethodArg::Socp),
        "greedy" => Ok(MethodArg::Greedy),
        "edge" => Ok(MethodArg::Edge),
        "local" => Ok(MethodArg::Local),
        other => Err(CliError::BadArg(format!("unknown method {other:?}"))),
    }
}

fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Runs the CLI and returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            2
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let quiet = cli.quiet || file.quiet.unwrap_or(false);
    let out = cli.out.clone().or_else(|| file.out.clone());
    match cli.command {
        Command::Gen(args) => cmd_gen(args, &file, seed, out.as_deref()),
        Command::Solve(args) => cmd_solve(args, &file, seed, quiet, out.as_deref()),
        Command::Oracle(args) => cmd_oracle(args, &file, out.as_deref()),
        Command::Mkp(args) => cmd_mkp(args, out.as_deref()),
        Command::Bench(args) => cmd_bench(args, &file, seed, quiet, out.as_deref()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen_params(args: &GenArgs, file: &FileConfig) -> Result<GenParams, CliError> {
    let kind = match (args.kind, &file.kind) {
        (Some(k), _) => k,
        (None, Some(s)) => parse_kind(s)?,
        (None, None) => KindArg::Qkp,
    };
    let defaults = GenParams::default();
    let mut params = GenParams {
        kind: kind.to_kind(),
        n: args.n.or(file.n).unwrap_or(defaults.n),
        density: args.density.or(file.density).unwrap_or(defaults.density),
        p: args.p.or(file.p).unwrap_or(defaults.p),
        k: args.k.or(file.k).unwrap_or(defaults.k),
        t: args.t.or(file.t).unwrap_or(defaults.t),
        benefit_range: args.benefit_range.or(file.benefit_range).unwrap_or(defaults.benefit_range),
        weight_range: args.weight_range.or(file.weight_range).unwrap_or(defaults.weight_range),
        budget_range: args.budget_range.or(file.budget_range),
        graph: None,
    };
    let graph_str = args.graph.clone().or_else(|| file.graph.clone());
    if let Some(g) = graph_str {
        params.graph = Some(parse_graph(&g, params.n, params.density)?);
    }
    Ok(params)
}

fn cmd_gen(args: GenArgs, file: &FileConfig, seed: u64, out: Option<&Path>) -> Result<i32, CliError> {
    let params = gen_params(&args, file)?;
    let inst = generate(&params, seed)?;
    emit(out, &write_instance_string(&inst))?;
    Ok(0)
}

fn auto_config(args: &SolveArgs, file: &FileConfig, seed: u64) -> AutoConfig {
    let greedy_default = GreedyConfig::default();
    let solver_default = SolverConfig::default();
    let rounding_default = RoundingConfig::default();
    AutoConfig {
        seed,
        greedy: GreedyConfig {
            t: args.t.or(file.t.map(|t| t as usize)).unwrap_or(greedy_default.t),
        },
        relaxation: SolverConfig {
            max_iterations: args.max_iters.or(file.max_iters).unwrap_or(solver_default.max_iterations),
            rel_tol: args.rel_tol.or(file.rel_tol).unwrap_or(solver_default.rel_tol),
            multistarts: args.multistarts.or(file.multistarts).unwrap_or(solver_default.multistarts),
            seed,
            ..solver_default
        },
        rounding: RoundingConfig {
            beta: args.beta.or(file.beta),
            trials: args.trials.or(file.trials),
            delta: args.delta.or(file.delta).unwrap_or(rounding_default.delta),
            gamma: args.gamma.or(file.gamma).unwrap_or(rounding_default.gamma),
            discard_infeasible: args.discard || file.discard.unwrap_or(false),
            seed,
        },
    }
}

fn cmd_solve(
    args: SolveArgs,
    file: &FileConfig,
    seed: u64,
    quiet: bool,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let inst = read_instance(&args.input)?;
    let method = match (args.method, &file.method) {
        (Some(m), _) => m,
        (None, Some(s)) => parse_method(s)?,
        (None, None) => MethodArg::Auto,
    };
    let cfg = auto_config(&args, file, seed);
    let report = match method {
        MethodArg::Auto => solve_auto(&inst, &cfg),
        single => solve_single(&inst, &cfg, single),
    };
    if !quiet {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    }
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(out, &text)?;
    Ok(if report.warnings.iter().any(|w| w.contains("converge")) { 1 } else { 0 })
}

/// Runs exactly one strategy family through the shared pipeline (scale,
/// prune, split) and wraps it in the same report shape as `solve_auto`,
/// including the relaxation upper bound and diagnostics.
fn solve_single(inst: &PiqpInstance, cfg: &AutoConfig, method: MethodArg) -> SolveReport {
    let name = method.name();
    let pruned = inst.scale().prune_infeasible_pairs();
    let (light, heavy) = pruned.split_piqps_piqpr();
    let trials_cfg = cfg.rounding.trials.unwrap_or(((inst.n as f64).powf(0.6).ceil()) as usize).max(1);
    let mut warnings = Vec::new();
    let mut candidates: Vec<BinarySolution> = Vec::new();
    let mut records: Vec<TrialRecord> = Vec::new();

    match method {
        MethodArg::Auto => unreachable!("auto is dispatched to solve_auto"),
        MethodArg::Greedy => {
            // Same family as the orchestrator: the undivided instance plus
            // both halves of the split.
            for part in [&pruned, &light, &heavy] {
                if part.free_vars().is_empty() {
                    continue;
                }
                let g = greedy_solve(part, &cfg.greedy);
                candidates.push(BinarySolution::evaluate(inst, &g.x));
            }
        }
        MethodArg::Edge => {
            let e = best_edge_solution(&pruned);
            candidates.push(BinarySolution::evaluate(inst, &e.x));
        }
        MethodArg::Socp | MethodArg::Local => {
            for (part_idx, part) in [&light, &heavy].into_iter().enumerate() {
                if part.free_vars().is_empty() || part.max_weight > part.budget {
                    continue;
                }
                let beta = effective_beta(part, cfg.rounding.beta);
                let lambda = compute_lambda(part, beta);
                let g = greedy_solve(part, &cfg.greedy);
                let warm = vec![g.x.iter().map(|&b| b as f64).collect()];
                let rel_cfg = SolverConfig { seed: cfg.seed, warm_starts: warm, ..cfg.relaxation.clone() };
                let rel = solve_relaxation(part, &rel_cfg);
                if !rel.converged {
                    warnings.push(format!(
                        "relaxation did not converge on a part within {} iterations",
                        cfg.relaxation.max_iterations
                    ));
                }
                if method == MethodArg::Socp {
                    let mut best_trial: Option<BinarySolution> = None;
                    for j in 0..trials_cfg {
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
                            if best_trial.as_ref().is_none_or(|b| sol.objective > b.objective) {
                                best_trial = Some(sol);
                            }
                        }
                    }
                    if let Some(bt) = best_trial {
                        candidates.push(BinarySolution::evaluate(inst, &bt.x));
                    }
                } else {
                    match local_knapsack_solution(part, &rel, lambda) {
                        Ok(z) => candidates.push(BinarySolution::evaluate(inst, &z.x)),
                        Err(e) => warnings.push(format!("local knapsack skipped: {e}")),
                    }
                }
            }
        }
    }

    let mut strategy_values = BTreeMap::new();
    if let Some(max) = candidates.iter().map(|c| c.objective).max() {
        strategy_values.insert(name.to_string(), max);
    }
    let best = candidates
        .iter()
        .fold(None::<&BinarySolution>, |acc, c| match acc {
            Some(b) if b.objective >= c.objective => Some(b),
            _ => Some(c),
        })
        .cloned()
        .unwrap_or_else(|| BinarySolution::evaluate(inst, &vec![0u8; inst.n]));

    // Same bound and diagnostics as the orchestrator, seeded with whatever
    // this method produced.
    let warm_full: Vec<Vec<f64>> =
        candidates.iter().map(|c| c.x.iter().map(|&b| b as f64).collect()).collect();
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
    let (label, epsilons) = concentration_diagnostics(&pruned, &rel_full, lambda_full, cfg.rounding.gamma);
    let free = pruned.free_vars();
    let lp_linear_value = if free.iter().any(|&j| pruned.linear[j] > 0) {
        let benefits: Vec<u64> = free.iter().map(|&j| pruned.linear[j]).collect();
        let weights: Vec<Vec<u64>> =
            pruned.weights.iter().map(|row| free.iter().map(|&j| row[j]).collect()).collect();
        let prob = MkpProblem::new(benefits, weights, vec![pruned.budget; inst.p])
            .expect("pruning left no free vertex above the budget");
        solve_lp_vertex(&prob).value_f64()
    } else {
        0.0
    };

    let mut all_warnings = crate::instance::regime_warnings(inst);
    all_warnings.extend(warnings);

    SolveReport {
        value: best.objective,
        x: best.x.clone(),
        strategy: name.to_string(),
        strategy_values,
        upper_bound: rel_full.value + lp_linear_value,
        trial_stats: TrialStats::from_records(records, inst.p),
        case_label: label.as_str().to_string(),
        epsilons,
        warnings: all_warnings,
        seed: cfg.seed,
    }
}

fn cmd_oracle(args: OracleArgs, file: &FileConfig, out: Option<&Path>) -> Result<i32, CliError> {
    let inst = read_instance(&args.input)?;
    let limit = args.limit_n.or(file.limit_n).unwrap_or(oracle::DEFAULT_LIMIT);
    let res = oracle::brute_force(&inst, limit)?;
    let payload = json!({
        "value": res.best.objective,
        "x": res.best.x,
        "quadratic": res.best.quadratic,
        "linear": res.best.linear,
        "usage": res.best.usage,
        "explored": res.explored,
    });
    let mut text = serde_json::to_string_pretty(&payload).expect("oracle report serializes");
    text.push('\n');
    emit(out, &text)?;
    Ok(0)
}

/// Standalone linear knapsack file.
#[derive(Debug, Deserialize)]
struct MkpFile {
    b: Vec<u64>,
    #[serde(rename = "A")]
    a: Vec<Vec<u64>>,
    budgets: Vec<u64>,
}

fn cmd_mkp(args: MkpArgs, out: Option<&Path>) -> Result<i32, CliError> {
    let text = fs::read_to_string(&args.input).map_err(|source| CliError::File {
        path: args.input.display().to_string(),
        source,
    })?;
    let parsed: MkpFile = serde_json::from_str(&text).map_err(|e| CliError::Config {
        path: args.input.display().to_string(),
        message: e.to_string(),
    })?;
    let prob = MkpProblem::new(parsed.b, parsed.a, parsed.budgets)
        .map_err(|e| CliError::BadArg(e.to_string()))?;
    let lp = solve_lp_vertex(&prob);
    let sol = round_vertex(&prob, &lp);
    let payload = json!({
        "x": sol.x,
        "value": sol.value,
        "usage": sol.usage,
        "lp_value": lp.value_f64(),
        "lp_fractional": lp.fractional,
        "guarantee_factor": prob.p() + 1,
    });
    let mut text = serde_json::to_string_pretty(&payload).expect("mkp report serializes");
    text.push('\n');
    emit(out, &text)?;
    Ok(0)
}

struct BenchSettings {
    kind: KindArg,
    n_list: Vec<usize>,
    p_list: Vec<usize>,
    seeds: u64,
    density: f64,
    t: usize,
    trials: Option<usize>,
    beta: Option<f64>,
    gamma: f64,
    oracle_limit: usize,
    stable: bool,
}

fn bench_settings(args: &BenchArgs, file: &FileConfig) -> Result<BenchSettings, CliError> {
    let kind = match (args.kind, &file.kind) {
        (Some(k), _) => k,
        (None, Some(s)) => parse_kind(s)?,
        (None, None) => KindArg::Qkp,
    };
    Ok(BenchSettings {
        kind,
        n_list: args.n_list.clone().or_else(|| file.n_list.clone()).unwrap_or_else(|| vec![8, 10]),
        p_list: args.p_list.clone().or_else(|| file.p_list.clone()).unwrap_or_else(|| vec![1, 2]),
        seeds: args.seeds.or(file.seeds).unwrap_or(10),
        density: args.density.or(file.density).unwrap_or(0.5),
        t: args.t.or(file.t.map(|t| t as usize)).unwrap_or(2),
        trials: args.trials.or(file.trials),
        beta: args.beta.or(file.beta),
        gamma: args.gamma.or(file.gamma).unwrap_or(0.1),
        oracle_limit: args.oracle_limit.or(file.oracle_limit).unwrap_or(16),
        stable: args.stable || file.stable.unwrap_or(false),
    })
}

fn csv_cell(v: Option<u64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn bench_row(s: &BenchSettings, n: usize, p: usize, seed: u64) -> Result<(String, f64, f64, f64), String> {
    let params = GenParams {
        kind: s.kind.to_kind(),
        n,
        density: s.density,
        p,
        ..GenParams::default()
    };
    let inst = generate(&params, seed).map_err(|e| e.to_string())?;
    let cfg = AutoConfig {
        seed,
        greedy: GreedyConfig { t: s.t },
        relaxation: SolverConfig { seed, ..SolverConfig::default() },
        rounding: RoundingConfig {
            beta: s.beta,
            trials: s.trials,
            gamma: s.gamma,
            seed,
            ..RoundingConfig::default()
        },
    };
    let solve_start = Instant::now();
    let report = solve_auto(&inst, &cfg);
    let solve_ms = if s.stable { 0 } else { solve_start.elapsed().as_millis() };

    let (oracle_value, oracle_ms) = if inst.n <= s.oracle_limit {
        let start = Instant::now();
        let res = oracle::brute_force(&inst, s.oracle_limit).map_err(|e| e.to_string())?;
        (Some(res.best.objective), if s.stable { 0 } else { start.elapsed().as_millis() })
    } else {
        (None, 0)
    };

    let w = inst.max_budget();
    let a_max = inst.weights.iter().flatten().copied().max().unwrap_or(0);
    let numerator = oracle_value.map(|v| v as f64).unwrap_or(report.upper_bound);
    let ratio = if report.value > 0 {
        numerator / report.value as f64
    } else if numerator <= 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let greedy_bound = 8.0 * p as f64 * (n as f64).min(w as f64) / s.t as f64;
    let global_bound = a_max as f64 * (n as f64).sqrt() * (n as f64).ln().powf(2.1);

    let id = format!("{}-n{}-p{}-s{}", s.kind.to_kind().as_str(), n, p, seed);
    let sv = |k: &str| csv_cell(report.strategy_values.get(k).copied());
    let row = format!(
        "{id},{n},{p},{w},{a_max},{},{},{},{},{},{},{},{:.6},{:.6},{},{solve_ms},{oracle_ms}",
        sv("greedy"),
        sv("edge"),
        sv("local"),
        sv("rounding"),
        sv("linear"),
        report.value,
        csv_cell(oracle_value),
        report.upper_bound,
        ratio,
        report.case_label,
    );
    Ok((row, ratio, greedy_bound, global_bound))
}

fn cmd_bench(
    args: BenchArgs,
    file: &FileConfig,
    _seed: u64,
    quiet: bool,
    out: Option<&Path>,
) -> Result<i32, CliError> {
    let settings = bench_settings(&args, file)?;
    let mut text = String::from(BENCH_HEADER);
    text.push('\n');
    let mut rows = 0usize;
    let mut max_ratio = 0.0f64;
    let mut greedy_bound_max = 0.0f64;
    let mut global_bound_max = 0.0f64;
    let total = settings.n_list.len() * settings.p_list.len() * settings.seeds as usize;
    for &n in &settings.n_list {
        for &p in &settings.p_list {
            for seed in 0..settings.seeds {
                let result = catch_unwind(AssertUnwindSafe(|| bench_row(&settings, n, p, seed)));
                let id = format!("{}-n{}-p{}-s{}", settings.kind.to_kind().as_str(), n, p, seed);
                match result {
                    Ok(Ok((row, ratio, gb, zb))) => {
                        text.push_str(&row);
                        text.push('\n');
                        if ratio.is_finite() {
                            max_ratio = max_ratio.max(ratio);
                        } else {
                            max_ratio = f64::INFINITY;
                        }
                        greedy_bound_max = greedy_bound_max.max(gb);
                        global_bound_max = global_bound_max.max(zb);
                    }
                    Ok(Err(msg)) => {
                        text.push_str(&format!("{id},{n},{p},,,,,,,,,,,,error: {msg},0,0\n"));
                    }
                    Err(_) => {
                        text.push_str(&format!("{id},{n},{p},,,,,,,,,,,,error: panic,0,0\n"));
                    }
                }
                rows += 1;
                if !quiet {
                    eprintln!("bench: {rows}/{total} done");
                }
            }
        }
    }
    if rows > 0 {
        text.push_str(&format!(
            "# rows={rows} max_ratio={max_ratio:.6} greedy_bound_max={greedy_bound_max:.6} global_bound_max={global_bound_max:.6}\n"
        ));
    }
    emit(out, &text)?;
    Ok(0)
}
