use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use super::ast::Fact;
use super::symbol::{Symbol, SymbolTable};

/// All tuples of one relation, with a membership index and lazily built
/// per-column indexes (constant -> row numbers).
#[derive(Debug)]
pub struct Relation {
    name: Symbol,
    arity: usize,
    /// Tuples flattened in insertion order, `arity` symbols per row.
    flat: Vec<Symbol>,
    /// Tuple -> row number; doubles as the duplicate filter.
    rows: HashMap<Box<[Symbol]>, u32>,
    cols: OnceLock<Vec<HashMap<Symbol, Vec<u32>>>>,
}

impl Relation {
    fn new(name: Symbol, arity: usize) -> Self {
        Relation {
            name,
            arity,
            flat: Vec::new(),
            rows: HashMap::new(),
            cols: OnceLock::new(),
        }
    }

    pub fn name(&self) -> Symbol {
        self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, tuple: &[Symbol]) -> bool {
        tuple.len() == self.arity && self.rows.contains_key(tuple)
    }

    pub fn row(&self, i: u32) -> &[Symbol] {
        let a = self.arity;
        &self.flat[i as usize * a..(i as usize + 1) * a]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Symbol]> + Clone + '_ {
        self.flat.chunks_exact(self.arity.max(1))
    }

    /// Row numbers whose column `col` holds `value`. Builds the column
    /// indexes on first use; safe to call from multiple threads.
    pub fn rows_with(&self, col: usize, value: Symbol) -> &[u32] {
        static EMPTY: [u32; 0] = [];
        let cols = self.cols.get_or_init(|| {
            let mut cols = vec![HashMap::new(); self.arity];
            for (i, row) in self.iter().enumerate() {
                for (c, &s) in row.iter().enumerate() {
                    cols[c].entry(s).or_insert_with(Vec::new).push(i as u32);
                }
            }
            cols
        });
        cols[col].get(&value).map(|v| v.as_slice()).unwrap_or(&EMPTY)
    }

    /// True if the tuple was new. Resets column indexes, so all insertion
    /// should happen before indexed reads.
    fn insert(&mut self, tuple: &[Symbol]) -> bool {
        debug_assert_eq!(tuple.len(), self.arity);
        if self.rows.contains_key(tuple) {
            return false;
        }
        let row = (self.rows.len()) as u32;
        self.rows.insert(tuple.into(), row);
        self.flat.extend_from_slice(tuple);
        self.cols = OnceLock::new();
        true
    }
}

impl Clone for Relation {
    fn clone(&self) -> Self {
        // Column indexes are derived data; let the clone rebuild them.
        Relation {
            name: self.name,
            arity: self.arity,
            flat: self.flat.clone(),
            rows: self.rows.clone(),
            cols: OnceLock::new(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StoreError {
    #[error("arity mismatch for {pred}: declared {declared}, found {found}")]
    ArityMismatch {
        pred: String,
        declared: usize,
        found: usize,
    },
}

/// Ground background knowledge: one [`Relation`] per predicate plus the
/// symbol table the facts were interned against.
///
/// The store is filled during parsing or model computation and treated as
/// immutable afterwards; all read paths are `&self` and thread-safe.
#[derive(Clone, Debug, Default)]
pub struct FactStore {
    symbols: SymbolTable,
    relations: HashMap<Symbol, Relation>,
    /// Predicate -> arity, covering relation symbols and predicates that so
    /// far appear only in rules.
    arities: HashMap<Symbol, usize>,
}

impl FactStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn symbols_mut(&mut self) -> &mut SymbolTable {
        &mut self.symbols
    }

    pub fn intern(&mut self, name: &str) -> Symbol {
        self.symbols.intern(name)
    }

    /// Declared arity of a predicate, whether or not it has tuples.
    pub fn arity(&self, pred: Symbol) -> Option<usize> {
        self.arities.get(&pred).copied()
    }

    /// Registers a predicate arity, failing on conflicts.
    pub fn declare(&mut self, pred: Symbol, arity: usize) -> Result<(), StoreError> {
        match self.arities.get(&pred) {
            Some(&a) if a != arity => Err(StoreError::ArityMismatch {
                pred: self.symbols.name(pred).to_string(),
                declared: a,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(pred, arity);
                Ok(())
            }
        }
    }

    /// Inserts a tuple, silently dropping duplicates. Returns true when new.
    pub fn insert(&mut self, pred: Symbol, tuple: &[Symbol]) -> Result<bool, StoreError> {
        self.declare(pred, tuple.len())?;
        Ok(self
            .relations
            .entry(pred)
            .or_insert_with(|| Relation::new(pred, tuple.len()))
            .insert(tuple))
    }

    pub fn insert_fact(&mut self, fact: &Fact) -> Result<bool, StoreError> {
        self.insert(fact.pred, &fact.args)
    }

    pub fn relation(&self, pred: Symbol) -> Option<&Relation> {
        self.relations.get(&pred)
    }

    pub fn contains(&self, fact: &Fact) -> bool {
        self.relations
            .get(&fact.pred)
            .is_some_and(|r| r.contains(&fact.args))
    }

    /// Relations with at least one tuple, sorted by name for deterministic
    /// iteration.
    pub fn relations_by_name(&self) -> Vec<&Relation> {
        let mut rels: Vec<&Relation> = self.relations.values().filter(|r| !r.is_empty()).collect();
        rels.sort_by(|a, b| self.symbols.name(a.name()).cmp(self.symbols.name(b.name())));
        rels
    }

    /// Total tuple count across relations.
    pub fn fact_count(&self) -> usize {
        self.relations.values().map(|r| r.len()).sum()
    }

    /// Set equality on relation contents; insertion order is irrelevant.
    /// Only meaningful for stores sharing one symbol table, such as two
    /// models computed from the same base store.
    pub fn same_facts(&self, other: &FactStore) -> bool {
        let nonempty = |s: &FactStore| {
            s.relations
                .iter()
                .filter(|(_, r)| !r.is_empty())
                .map(|(p, _)| *p)
                .collect::<std::collections::HashSet<_>>()
        };
        if nonempty(self) != nonempty(other) {
            return false;
        }
        self.relations.iter().all(|(p, r)| {
            r.is_empty()
                || other
                    .relations
                    .get(p)
                    .is_some_and(|o| o.len() == r.len() && r.iter().all(|t| o.contains(t)))
        })
    }
}
