use thiserror::Error;

use crate::lattice::{Interval, Subset};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: {lower} is not a subset of {upper}")]
    InvalidInterval { lower: Subset, upper: Subset },

    #[error("{0} is not contained in the domain {1}")]
    OutsideDomain(String, Interval),

    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(Interval, Interval),

    #[error("ground set of size {d} exceeds the limit of {limit}")]
    DimensionLimit { d: usize, limit: usize },

    #[error("rank {rank} has {count} maximal chains; enumeration is limited to rank {limit}")]
    ChainLimit { rank: usize, count: u128, limit: usize },

    #[error("tuple is not conforming{}: no member attains the maximum along chain {}", neuron_label(.neuron), chain_label(.chain))]
    NotConforming { neuron: Option<usize>, chain: Vec<Subset> },

    #[error("capacity exceeded: |M| = {size} but the rank product is {capacity}")]
    Capacity { size: usize, capacity: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn neuron_label(neuron: &Option<usize>) -> String {
    match neuron {
        Some(i) => format!(" at neuron {i}"),
        None => String::new(),
    }
}

fn chain_label(chain: &[Subset]) -> String {
    let parts: Vec<String> = chain.iter().map(|s| s.to_string()).collect();
    parts.join(" < ")
}
