//! Machine-readable run reports, serialized as a single JSON object.

use serde::Serialize;

/// Wall-clock seconds per pipeline phase. `total` covers the whole command,
/// so the named phases always sum to at most `total`.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Phases {
    pub total: f64,
    pub discovery: f64,
    pub generate: f64,
    pub test: f64,
    pub constrain: f64,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Counters {
    pub facts_loaded: usize,
    pub properties_found: usize,
    pub constraints_compiled: usize,
    pub rules_enumerated: usize,
    pub programs_tested: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub phases: Phases,
    pub counters: Counters,
    /// Rendered solution rules in canonical order; `None` when the command
    /// does not learn or no solution exists within bounds.
    pub solution: Option<Vec<String>>,
    pub exit_status: i32,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}
