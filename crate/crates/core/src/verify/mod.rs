//! Executable checks of the structural results, with reproducible reports.
//!
//! Every check returns a [`Report`]. Sampled checks draw from per-index RNG
//! streams, so a report depends only on its parameters and seed, never on
//! the number of worker threads. Each check also has a `*_mutated` variant
//! that runs the same pipeline on a deliberately broken instance; those must
//! fail, which guards against checks that pass vacuously.

mod base;
mod dims;
mod fan;
mod prop51;
mod quadratic;
pub mod sampling;

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use base::{verify_base_and_identities, verify_base_and_identities_mutated};
pub use dims::{verify_dimensions, verify_dimensions_mutated};
pub use fan::{verify_fan_laws, verify_fan_laws_mutated};
pub use prop51::{outof6_pair, verify_prop51, verify_prop51_mutated, verify_prop51_with};
pub use quadratic::{
    verify_quadratic, verify_quadratic_mutated, verify_rank5, verify_rank5_mutated,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    /// Process exit code used by the command line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Whether a check covers its whole finite domain or samples it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub coverage: Coverage,
    pub attempted: u64,
    pub accepted: u64,
    pub status: Status,
    /// First failing object, present whenever the status is `Fail`.
    pub witness: Option<String>,
    /// Recorded exact values (alternating sums, levels, dimensions, ...).
    pub values: BTreeMap<String, String>,
    pub counters: BTreeMap<String, u64>,
    pub notes: Vec<String>,
    /// Wall time; left out of JSON so reports stay byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub(crate) fn new(name: &str, coverage: Coverage) -> Self {
        Report {
            name: name.to_string(),
            params: BTreeMap::new(),
            coverage,
            attempted: 0,
            accepted: 0,
            status: Status::Pass,
            witness: None,
            values: BTreeMap::new(),
            counters: BTreeMap::new(),
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub(crate) fn value(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub(crate) fn count(&mut self, key: &str, by: u64) {
        *self.counters.entry(key.to_string()).or_default() += by;
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Marks the report failed; the first witness is kept.
    pub(crate) fn fail(&mut self, witness: impl Into<String>) {
        self.status = Status::Fail;
        if self.witness.is_none() {
            self.witness = Some(witness.into());
        }
    }

    pub(crate) fn inconclusive(&mut self, reason: impl Into<String>) {
        if self.status == Status::Pass {
            self.status = Status::Inconclusive;
        }
        self.note(reason);
    }

    pub(crate) fn finish(mut self, started: Instant) -> Self {
        self.elapsed = started.elapsed();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn counter(&self, key: &str) -> u64 {
        self.counters.get(key).copied().unwrap_or(0)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope = match (self.status, self.coverage) {
            (Status::Pass, Coverage::Sampled) => {
                format!(" (property-verified on {} samples)", self.accepted)
            }
            (Status::Pass, Coverage::Exhaustive) => " (exhaustive)".to_string(),
            _ => String::new(),
        };
        writeln!(f, "{}: {}{}", self.name, self.status.label(), scope)?;
        if !self.params.is_empty() {
            let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(f, "  params: {}", params.join(" "))?;
        }
        if self.coverage == Coverage::Sampled {
            writeln!(
                f,
                "  samples: {} accepted of {} attempted",
                self.accepted, self.attempted
            )?;
        }
        for (k, v) in &self.values {
            writeln!(f, "  {k} = {v}")?;
        }
        for (k, v) in &self.counters {
            writeln!(f, "  #{k}: {v}")?;
        }
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        if let Some(w) = &self.witness {
            writeln!(f, "  witness: {w}")?;
        }
        write!(f, "  time: {:.3}s", self.elapsed.as_secs_f64())
    }
}
