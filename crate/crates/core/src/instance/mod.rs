//! Instance data model, budget scaling, pruning, the light/heavy split,
//! seeded generators and JSON I/O.

mod generate;
mod io;
mod model;
mod scale;

pub use generate::{generate, GenParams, GenerateError, GraphSpec, InstanceKind};
pub use io::{read_instance, read_instance_str, write_instance, write_instance_string, IoError};
pub use model::{validate, BinarySolution, GraphView, PiqpInstance, ShapeError, Violation};
pub(crate) use model::regime_warnings;
pub use scale::ScaledInstance;
