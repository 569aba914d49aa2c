use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

/// Aggregated outcome of a run. Bitstrings list classical bit 0 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionResult {
    pub shots: u64,
    pub seed: u64,
    /// Bitstring of every shot, in shot order.
    pub memory: Vec<String>,
    pub counts: BTreeMap<String, u64>,
}

#[derive(Serialize)]
struct Json<'a> {
    shots: u64,
    seed: u64,
    counts: &'a BTreeMap<String, u64>,
    bit_order: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    memory: Option<&'a [String]>,
}

impl ExecutionResult {
    pub fn from_memory(seed: u64, memory: Vec<String>) -> ExecutionResult {
        let mut counts = BTreeMap::new();
        for bits in &memory {
            *counts.entry(bits.clone()).or_insert(0) += 1;
        }
        ExecutionResult { shots: memory.len() as u64, seed, memory, counts }
    }

    pub fn to_json(&self, with_memory: bool) -> String {
        let json = Json {
            shots: self.shots,
            seed: self.seed,
            counts: &self.counts,
            bit_order: "clbit0-leftmost",
            memory: with_memory.then_some(self.memory.as_slice()),
        };
        serde_json::to_string_pretty(&json).expect("result serializes")
    }

    /// One `bitstring count` line per outcome, then the memory if asked for.
    pub fn to_text(&self, with_memory: bool) -> String {
        let mut out = format!("shots: {}\nseed: {}\n", self.shots, self.seed);
        for (bits, n) in &self.counts {
            let shown = if bits.is_empty() { "\"\"" } else { bits };
            writeln!(out, "{shown} {n}").unwrap();
        }
        if with_memory {
            writeln!(out, "memory: {}", self.memory.join(" ")).unwrap();
        }
        out
    }
}
