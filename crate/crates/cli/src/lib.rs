//! Command implementations behind the `disco` binary: property discovery,
//! learning, synthetic-BK generation, and rule-space statistics. Each
//! command returns a [`RunReport`]; the binary handles printing and exit
//! codes. Kept as a library so integration tests and benchmarks can drive
//! the exact production code paths.

mod output;
mod report;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use disco_core::synth;
use disco_core::{
    enumerate_rules, ground_model, learn, mine_properties, parse_bias, parse_examples,
    parse_program, Bias, ConstraintSet, FactStore, MinerConfig, PropertyAssertion, Symbol, Task,
};
use thiserror::Error;

pub use output::{write_asp, write_json};
pub use report::{Counters, Phases, RunReport};

/// Facts that would overflow this without `--force` are refused.
pub const GENBK_FACT_GUARD: u128 = 100_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 parse error, 4 resource guard, 1 anything else; 0 and 3 are
    /// produced by successful runs, not errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Guard(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

fn parse_err(e: impl std::fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Asp,
}

fn fact_count(store: &FactStore) -> usize {
    store.relations_by_name().iter().map(|r| r.len()).sum()
}

/// Parses a BK file (facts plus optional rules) and grounds any rules
/// up-front. Returns the grounded store and the count of facts loaded from
/// the file itself.
fn load_ground_store(bk: &Path) -> Result<(FactStore, usize), CliError> {
    let text = fs::read_to_string(bk)?;
    let mut store = FactStore::new();
    let rules = parse_program(&text, &mut store).map_err(parse_err)?;
    let loaded = fact_count(&store);
    if !rules.is_empty() {
        store = ground_model(&rules, &store);
    }
    Ok((store, loaded))
}

/// Candidate relations for mining: the bias body predicates minus the head
/// predicate (head facts are example-like, not background structure).
fn candidates_from_bias(bias: &Bias) -> Vec<Symbol> {
    bias.body_preds
        .iter()
        .map(|&(s, _)| s)
        .filter(|&s| s != bias.head.0)
        .collect()
}

/// Shared discovery step so `cmd_learn` and `cmd_discover` report the same
/// timings on the same BK.
fn discover(store: &FactStore, config: &MinerConfig) -> (Vec<PropertyAssertion>, f64) {
    let started = Instant::now();
    let assertions = mine_properties(store, config);
    (assertions, started.elapsed().as_secs_f64())
}

/// Mines properties of `bk` and writes them to `out` in the chosen format.
pub fn cmd_discover(
    bk: &Path,
    bias: Option<&Path>,
    out: &mut dyn Write,
    format: Format,
) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let (mut store, loaded) = load_ground_store(bk)?;
    let config = match bias {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let bias = parse_bias(&text, &mut store).map_err(parse_err)?;
            MinerConfig::new(candidates_from_bias(&bias))
        }
        None => MinerConfig::all_relations(&store),
    };
    let (assertions, discovery) = discover(&store, &config);
    match format {
        Format::Json => write_json(&assertions, &store, out)?,
        Format::Asp => write_asp(&assertions, &store, out)?,
    }
    Ok(RunReport {
        phases: Phases { total: started.elapsed().as_secs_f64(), discovery, ..Phases::default() },
        counters: Counters {
            facts_loaded: loaded,
            properties_found: assertions.len(),
            ..Counters::default()
        },
        solution: None,
        exit_status: 0,
    })
}

/// Loads a learning task from its three files. The returned count is the
/// number of ground facts read from the BK file.
pub fn load_task(bk: &Path, exs: &Path, bias: &Path) -> Result<(Task, usize), CliError> {
    let bk_text = fs::read_to_string(bk)?;
    let mut store = FactStore::new();
    let bk_rules = parse_program(&bk_text, &mut store).map_err(parse_err)?;
    let loaded = fact_count(&store);
    let exs_text = fs::read_to_string(exs)?;
    let (pos, neg) = parse_examples(&exs_text, &mut store).map_err(parse_err)?;
    let bias_text = fs::read_to_string(bias)?;
    let bias = parse_bias(&bias_text, &mut store).map_err(parse_err)?;
    let task = Task::new(store, &bk_rules, pos, neg, bias).map_err(parse_err)?;
    Ok((task, loaded))
}

/// Learns an optimal hypothesis; `no_discovery` skips property mining and
/// searches unconstrained. No solution within bounds is reported with exit
/// status 3, not an error.
pub fn cmd_learn(
    bk: &Path,
    exs: &Path,
    bias: &Path,
    no_discovery: bool,
) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let (task, loaded) = load_task(bk, exs, bias)?;
    let (constraints, properties_found, discovery) = if no_discovery {
        (ConstraintSet::new(), 0, 0.0)
    } else {
        let config = MinerConfig::new(candidates_from_bias(task.bias()));
        let (assertions, discovery) = discover(task.bk(), &config);
        (ConstraintSet::compile(&assertions), assertions.len(), discovery)
    };
    let outcome = learn(&task, &constraints);
    let solution = outcome
        .solution
        .as_ref()
        .map(|h| h.rules().iter().map(|r| r.display(task.bk().symbols()).to_string()).collect());
    Ok(RunReport {
        phases: Phases {
            total: started.elapsed().as_secs_f64(),
            discovery,
            generate: outcome.times.generate.as_secs_f64(),
            test: outcome.times.test.as_secs_f64(),
            constrain: outcome.times.constrain.as_secs_f64(),
        },
        counters: Counters {
            facts_loaded: loaded,
            properties_found,
            constraints_compiled: constraints.len(),
            rules_enumerated: outcome.stats.rules_enumerated,
            programs_tested: outcome.stats.programs_tested,
        },
        exit_status: if solution.is_some() { 0 } else { 3 },
        solution,
    })
}

/// Writes synthetic string BK for alphabet size `n` and maximum string
/// length `max_len`; returns the fact count. Refuses to emit more than
/// [`GENBK_FACT_GUARD`] facts unless `force` is set.
pub fn cmd_genbk(n: usize, max_len: usize, out: &Path, force: bool) -> Result<u64, CliError> {
    let expected = match synth::fact_count(n, max_len) {
        Ok(c) => c,
        Err(e) => return Err(CliError::Parse(e.to_string())),
    };
    if expected > GENBK_FACT_GUARD && !force {
        return Err(CliError::Guard(format!(
            "refusing to write {expected} facts (limit {GENBK_FACT_GUARD}); pass --force to override"
        )));
    }
    let file = fs::File::create(out)?;
    let mut writer = BufWriter::new(file);
    let written = match synth::write_facts(n, max_len, &mut writer) {
        Ok(c) => c,
        Err(synth::SynthError::Io(e)) => return Err(CliError::Io(e)),
        Err(e) => return Err(CliError::Parse(e.to_string())),
    };
    writer.flush()?;
    debug_assert_eq!(u128::from(written), expected);
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RulespaceCounts {
    pub without: usize,
    pub with: usize,
}

impl RulespaceCounts {
    /// Percentage of rules removed by the discovered constraints.
    pub fn reduction_pct(&self) -> f64 {
        if self.without == 0 {
            0.0
        } else {
            100.0 * (1.0 - self.with as f64 / self.without as f64)
        }
    }
}

/// Sizes every rule can take under `bias`: one head plus 1..=max_body
/// body literals.
fn rule_sizes(bias: &Bias) -> std::ops::RangeInclusive<usize> {
    2..=(1 + bias.max_body)
}

/// Counts the candidate rule space with and without mined constraints.
pub fn cmd_rulespace(bias_path: &Path, bk: &Path) -> Result<RulespaceCounts, CliError> {
    let (mut store, _) = load_ground_store(bk)?;
    let bias_text = fs::read_to_string(bias_path)?;
    let bias = parse_bias(&bias_text, &mut store).map_err(parse_err)?;
    let config = MinerConfig::new(candidates_from_bias(&bias));
    let (assertions, _) = discover(&store, &config);
    let mined = ConstraintSet::compile(&assertions);
    let empty = ConstraintSet::new();
    let count = |cs: &ConstraintSet| {
        rule_sizes(&bias).map(|size| enumerate_rules(&bias, cs, size).len()).sum()
    };
    Ok(RulespaceCounts { without: count(&empty), with: count(&mined) })
}
