//! Seeded instance generators. The same parameters and seed always produce
//! the same instance, bit for bit; the draw order is part of the contract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::model::PiqpInstance;

/// Families of generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    /// Quadratic knapsack: random pair benefits, random weights, `p`
    /// constraints, no linear term.
    Qkp,
    /// Densest-subgraph: a random graph with unit edge benefits and unit
    /// weights under a single cardinality budget `k`.
    Dsp,
    /// Clique search: a given graph with unit edge benefits, unit weights
    /// and budget `t`; the optimum is `t*(t-1)/2` exactly when the graph
    /// contains a `t`-clique.
    Clique,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Qkp => "qkp",
            InstanceKind::Dsp => "dsp",
            InstanceKind::Clique => "clique",
        }
    }
}

/// Graph inputs for the `clique` kind.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphSpec {
    /// Complete graph on `m` vertices.
    Complete(usize),
    /// Erdos-Renyi graph with the given order and edge probability.
    Gnp { n: usize, density: f64 },
}

/// Generator parameters; unused fields are ignored by the other kinds.
#[derive(Clone, Debug)]
pub struct GenParams {
    pub kind: InstanceKind,
    /// Variable count for `qkp`/`dsp`.
    pub n: usize,
    /// Edge probability for `qkp`/`dsp`.
    pub density: f64,
    /// Inclusive benefit range for `qkp` edges.
    pub benefit_range: (u64, u64),
    /// Inclusive weight range for `qkp`.
    pub weight_range: (u64, u64),
    /// Constraint count for `qkp`.
    pub p: usize,
    /// Inclusive budget range for `qkp`; `None` derives `[2*w_hi, 4*w_hi]`,
    /// a moderate spread that keeps the scaled weights comparable to the
    /// originals.
    pub budget_range: Option<(u64, u64)>,
    /// Budget for `dsp`.
    pub k: u64,
    /// Budget for `clique`.
    pub t: u64,
    /// Input graph for `clique`.
    pub graph: Option<GraphSpec>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            kind: InstanceKind::Qkp,
            n: 8,
            density: 0.5,
            benefit_range: (1, 9),
            weight_range: (1, 9),
            p: 1,
            budget_range: None,
            k: 4,
            t: 3,
            graph: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("density must lie in [0, 1], got {0}")]
    BadDensity(f64),
    #[error("{what} range ({lo}, {hi}) must satisfy lo <= hi{}", if *.positive { " and lo >= 1" } else { "" })]
    BadRange { what: &'static str, lo: u64, hi: u64, positive: bool },
    #[error("n must be at least 1")]
    EmptyInstance,
    #[error("p must be at least 1")]
    NoConstraints,
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("clique generation requires a graph spec")]
    MissingGraph,
}

/// Generates an instance from `params` and `seed`. The instance records its
/// provenance (kind, seed, key parameters) in `meta`.
pub fn generate(params: &GenParams, seed: u64) -> Result<PiqpInstance, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match params.kind {
        InstanceKind::Qkp => gen_qkp(params, seed, &mut rng),
        InstanceKind::Dsp => gen_dsp(params, seed, &mut rng),
        InstanceKind::Clique => gen_clique(params, seed, &mut rng),
    }
}

fn check_density(d: f64) -> Result<(), GenerateError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(GenerateError::BadDensity(d));
    }
    Ok(())
}

fn check_range(what: &'static str, (lo, hi): (u64, u64), positive: bool) -> Result<(), GenerateError> {
    if lo > hi || (positive && lo == 0) {
        return Err(GenerateError::BadRange { what, lo, hi, positive });
    }
    Ok(())
}

fn gen_qkp(params: &GenParams, seed: u64, rng: &mut ChaCha8Rng) -> Result<PiqpInstance, GenerateError> {
    if params.n == 0 {
        return Err(GenerateError::EmptyInstance);
    }
    if params.p == 0 {
        return Err(GenerateError::NoConstraints);
    }
    check_density(params.density)?;
    check_range("benefit", params.benefit_range, true)?;
    check_range("weight", params.weight_range, false)?;
    let budget_range = params
        .budget_range
        .unwrap_or((2 * params.weight_range.1.max(1), 4 * params.weight_range.1.max(1)));
    check_range("budget", budget_range, true)?;

    let n = params.n;
    // Fixed draw order: weight rows, then budgets, then the upper triangle
    // of the benefit matrix (presence draw before value draw).
    let weights: Vec<Vec<u64>> = (0..params.p)
        .map(|_| (0..n).map(|_| rng.gen_range(params.weight_range.0..=params.weight_range.1)).collect())
        .collect();
    let budgets: Vec<u64> = (0..params.p).map(|_| rng.gen_range(budget_range.0..=budget_range.1)).collect();
    let mut benefits = vec![vec![0u64; n]; n];
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < params.density {
                let b = rng.gen_range(params.benefit_range.0..=params.benefit_range.1);
                benefits[u][v] = b;
                benefits[v][u] = b;
            }
        }
    }
    let mut inst = PiqpInstance::from_dense(benefits, vec![0; n], weights, budgets)
        .expect("generated dimensions are consistent");
    inst.meta = Some(json!({
        "kind": "qkp",
        "seed": seed,
        "n": n,
        "p": params.p,
        "density": params.density,
        "benefit_range": [params.benefit_range.0, params.benefit_range.1],
        "weight_range": [params.weight_range.0, params.weight_range.1],
        "budget_range": [budget_range.0, budget_range.1],
    }));
    Ok(inst)
}

fn gen_dsp(params: &GenParams, seed: u64, rng: &mut ChaCha8Rng) -> Result<PiqpInstance, GenerateError> {
    if params.n == 0 {
        return Err(GenerateError::EmptyInstance);
    }
    check_density(params.density)?;
    if params.k == 0 {
        return Err(GenerateError::ZeroBudget);
    }
    let n = params.n;
    let mut benefits = vec![vec![0u64; n]; n];
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < params.density {
                benefits[u][v] = 1;
                benefits[v][u] = 1;
            }
        }
    }
    let mut inst = PiqpInstance::from_dense(benefits, vec![0; n], vec![vec![1; n]], vec![params.k])
        .expect("generated dimensions are consistent");
    inst.meta = Some(json!({
        "kind": "dsp",
        "seed": seed,
        "n": n,
        "density": params.density,
        "k": params.k,
    }));
    Ok(inst)
}

fn gen_clique(params: &GenParams, seed: u64, rng: &mut ChaCha8Rng) -> Result<PiqpInstance, GenerateError> {
    let graph = params.graph.ok_or(GenerateError::MissingGraph)?;
    if params.t == 0 {
        return Err(GenerateError::ZeroBudget);
    }
    let (n, edges): (usize, Vec<(usize, usize)>) = match graph {
        GraphSpec::Complete(m) => {
            if m == 0 {
                return Err(GenerateError::EmptyInstance);
            }
            let edges = (0..m).flat_map(|u| ((u + 1)..m).map(move |v| (u, v))).collect();
            (m, edges)
        }
        GraphSpec::Gnp { n, density } => {
            if n == 0 {
                return Err(GenerateError::EmptyInstance);
            }
            check_density(density)?;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen::<f64>() < density {
                        edges.push((u, v));
                    }
                }
            }
            (n, edges)
        }
    };
    let mut benefits = vec![vec![0u64; n]; n];
    for &(u, v) in &edges {
        benefits[u][v] = 1;
        benefits[v][u] = 1;
    }
    let mut inst = PiqpInstance::from_dense(benefits, vec![0; n], vec![vec![1; n]], vec![params.t])
        .expect("generated dimensions are consistent");
    let graph_desc = match graph {
        GraphSpec::Complete(m) => json!({"complete": m}),
        GraphSpec::Gnp { n, density } => json!({"gnp": {"n": n, "density": density}}),
    };
    inst.meta = Some(json!({
        "kind": "clique",
        "seed": seed,
        "t": params.t,
        "graph": graph_desc,
    }));
    Ok(inst)
}
