//! Ground background knowledge and bottom-up evaluation of definite
//! programs.
//!
//! Everything downstream (mining, constraint checking, learning) speaks the
//! vocabulary defined here: interned [`Symbol`]s, [`Term`]s, [`Atom`]s,
//! ground [`Fact`]s, canonicalized [`Rule`]s and the indexed [`FactStore`].

mod ast;
mod eval;
mod parse;
mod store;
mod symbol;

pub use ast::{var_name, Atom, Fact, Rule, RuleError, Term, VarId};
pub use eval::{entails, find_body_witness, ground_model, sat_body};
pub(crate) use eval::derive;
pub use parse::{parse_facts, parse_program, ParseError, ParseErrorKind};
pub(crate) use parse::{is_constant, is_predicate};
pub use store::{FactStore, Relation, StoreError};
pub use symbol::{Symbol, SymbolTable};
