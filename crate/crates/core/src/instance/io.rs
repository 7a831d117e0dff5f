//! JSON serialization of instances.
//!
//! The on-disk schema mirrors [`PiqpInstance`]:
//!
//! ```json
//! {
//!   "n": 2, "p": 1,
//!   "B": [[0, 3], [3, 0]],
//!   "c": [1, 0],
//!   "A": [[2, 1]],
//!   "budgets": [3],
//!   "meta": {"note": "optional free-form"}
//! }
//! ```
//!
//! `B` may alternatively be given sparsely as `{"edges": [[u, v, b], ...]}`
//! with 0-based endpoints; each edge is symmetrized, diagonal entries are
//! rejected, and repeated edges must agree. Files are validated on read;
//! writing always emits the dense form.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::model::{validate, PiqpInstance, Violation};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot access {path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("bad sparse benefits: {0}")]
    SparseEdges(String),
    #[error("invalid instance: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Deserialize)]
struct InstanceDto {
    n: usize,
    p: usize,
    #[serde(rename = "B")]
    benefits: BenefitsDto,
    #[serde(rename = "c")]
    linear: Vec<u64>,
    #[serde(rename = "A")]
    weights: Vec<Vec<u64>>,
    budgets: Vec<u64>,
    #[serde(default)]
    meta: Option<serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(untagged, expecting = "B must be a dense matrix or {\"edges\": [[u, v, b], ...]}")]
enum BenefitsDto {
    Dense(Vec<Vec<u64>>),
    Sparse { edges: Vec<(usize, usize, u64)> },
}

/// Parses an instance from a JSON string and validates it.
pub fn read_instance_str(text: &str) -> Result<PiqpInstance, IoError> {
    let dto: InstanceDto = serde_json::from_str(text)?;
    let benefits = match dto.benefits {
        BenefitsDto::Dense(m) => m,
        BenefitsDto::Sparse { edges } => expand_edges(dto.n, &edges)?,
    };
    let inst = PiqpInstance {
        n: dto.n,
        p: dto.p,
        benefits,
        linear: dto.linear,
        weights: dto.weights,
        budgets: dto.budgets,
        meta: dto.meta,
    };
    let violations = validate(&inst);
    if !violations.is_empty() {
        return Err(IoError::Invalid(violations));
    }
    Ok(inst)
}

fn expand_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Vec<Vec<u64>>, IoError> {
    let mut benefits = vec![vec![0u64; n]; n];
    for &(u, v, b) in edges {
        if u == v {
            return Err(IoError::SparseEdges(format!("diagonal entry ({u},{v}) is not allowed")));
        }
        if u >= n || v >= n {
            return Err(IoError::SparseEdges(format!("edge ({u},{v}) out of range for n={n}")));
        }
        if benefits[u][v] != 0 && benefits[u][v] != b {
            return Err(IoError::SparseEdges(format!(
                "edge ({u},{v}) given twice with different benefits ({} vs {b})",
                benefits[u][v]
            )));
        }
        benefits[u][v] = b;
        benefits[v][u] = b;
    }
    Ok(benefits)
}

/// Reads and validates an instance file.
pub fn read_instance(path: impl AsRef<Path>) -> Result<PiqpInstance, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    read_instance_str(&text)
}

/// Serializes an instance as pretty JSON with a trailing newline. The output
/// is deterministic: field order is fixed and `meta` maps are key-sorted.
pub fn write_instance_string(inst: &PiqpInstance) -> String {
    let mut text = serde_json::to_string_pretty(inst).expect("instance serialization cannot fail");
    text.push('\n');
    text
}

/// Writes an instance file (see [`write_instance_string`]).
pub fn write_instance(path: impl AsRef<Path>, inst: &PiqpInstance) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, write_instance_string(inst))
        .map_err(|source| IoError::File { path: path.display().to_string(), source })
}
