//! Constraint discovery for optimal rule learning over function-free Datalog.
//!
//! The crate is organised as a pipeline:
//!
//! * [`kb`] holds ground background knowledge and evaluates definite
//!   programs bottom-up (semi-naive fixpoint, closed-world assumption).
//! * [`miner`] searches the background knowledge for relational properties
//!   (irreflexivity, functional dependencies, mutual exclusion, ...) by
//!   counter-example search.
//! * [`constraints`] compiles mined properties into hypothesis-space pruning
//!   constraints and decides whether candidate rules violate them.
//! * [`learner`] runs a generate-test-constrain loop with iterative
//!   deepening on program size, returning a minimum-cost solution.
//! * [`synth`] generates synthetic string background knowledge for scaling
//!   experiments.
//!
//! Pruning is *optimally sound*: a rule is only discarded when every
//! solution containing it is either impossible over the background
//! knowledge or beaten by a strictly smaller program, so the minimum cost
//! reachable with pruning equals the minimum cost without it.

pub mod constraints;
pub mod kb;
pub mod learner;
pub mod miner;
pub mod synth;

#[cfg(any(test, feature = "testutil"))]
pub mod testutil;

pub use constraints::{
    compile_constraint, verify_unsat, violates, ConstraintSet, HypothesisConstraint,
};
pub use kb::{
    entails, ground_model, parse_facts, parse_program, sat_body, Atom, Fact, FactStore,
    ParseError, Rule, RuleError, Symbol, SymbolTable, Term, VarId,
};
pub use learner::{
    constrain_update, enumerate_rules, learn, parse_bias, parse_examples, test_hypothesis, Bias,
    CoverageReport, Hypothesis, LearnOutcome, PhaseTimes, SearchStats, Task, TaskError,
};
pub use miner::{
    check_property, find_counter_example, mine_properties, oracle_mine, MinerConfig,
    PropertyAssertion, PropertyKind,
};
