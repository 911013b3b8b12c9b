use serde::Serialize;

use crate::lattice::Value;

/// Counters for one fixpoint binder, summed over every time it was entered.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FixStats {
    pub var: String,
    /// Distinct argument tuples (whole spine) whose value was tracked.
    pub width: usize,
    /// Distinct first-group arguments among those tuples.
    pub arguments: usize,
    /// Longest iteration chain, counting the initial approximation.
    pub height: usize,
    /// Iteration rounds over all entries.
    pub rounds: usize,
    /// Number of times the binder was entered.
    pub entries: usize,
    pub body_evals: u64,
    /// Table updates that moved against the direction of iteration.
    pub chain_violations: u64,
    /// Registered tuples in discovery order with their body-evaluation
    /// counts; empty for the global engine.
    #[serde(skip)]
    pub tuples: Vec<(Vec<Value>, u64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvalStats {
    pub mode: String,
    pub result: String,
    pub fixpoints: Vec<FixStats>,
    /// Operands evaluated to a full table (cache misses only).
    pub operand_tabulations: u64,
    pub operand_cache_hits: u64,
    /// Operand results computed at a single argument tuple.
    pub operand_points: u64,
    /// Single-point results reused from an earlier operand with the same
    /// node and free-variable values.
    pub operand_point_hits: u64,
    pub duration_ms: f64,
}

impl EvalStats {
    pub fn fixpoint(&self, var: &str) -> Option<&FixStats> {
        self.fixpoints.iter().find(|f| f.var == var)
    }

    pub fn chain_violations(&self) -> u64 {
        self.fixpoints.iter().map(|f| f.chain_violations).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}
