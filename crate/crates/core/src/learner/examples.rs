//! Positive/negative example files: `pos(f(a,b)).` and `neg(f(c,d)).`

use thiserror::Error;

use crate::kb::{is_constant, is_predicate, Fact, FactStore};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ExampleError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ExampleError {
    ExampleError { line, msg: msg.into() }
}

/// Parses example lines into deduplicated positive and negative fact lists,
/// preserving first-occurrence order. Example predicates are arity-checked
/// against the store.
pub fn parse_examples(
    text: &str,
    store: &mut FactStore,
) -> Result<(Vec<Fact>, Vec<Fact>), ExampleError> {
    let mut pos: Vec<Fact> = Vec::new();
    let mut neg: Vec<Fact> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stmt = raw.split('%').next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let stmt = stmt
            .strip_suffix('.')
            .ok_or_else(|| err(line, "expected '.' at end of example"))?
            .trim();
        let (tag, inner) = if let Some(rest) = stmt.strip_prefix("pos(") {
            (true, rest)
        } else if let Some(rest) = stmt.strip_prefix("neg(") {
            (false, rest)
        } else {
            return Err(err(line, "expected pos(...) or neg(...)"));
        };
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| err(line, "expected ')' closing the example"))?;
        let fact = parse_ground_atom(inner, store, line)?;
        let bucket = if tag { &mut pos } else { &mut neg };
        if !bucket.contains(&fact) {
            bucket.push(fact);
        }
    }
    Ok((pos, neg))
}

fn parse_ground_atom(text: &str, store: &mut FactStore, line: usize) -> Result<Fact, ExampleError> {
    let (pred, rest) = text
        .split_once('(')
        .ok_or_else(|| err(line, format!("expected an atom, got '{text}'")))?;
    let pred = pred.trim();
    if !is_predicate(pred) {
        return Err(err(line, format!("bad predicate name '{pred}'")));
    }
    let args_text = rest
        .strip_suffix(')')
        .ok_or_else(|| err(line, "expected ')' closing the atom"))?;
    let mut args = Vec::new();
    for tok in args_text.split(',') {
        let tok = tok.trim();
        if !is_constant(tok) {
            return Err(err(line, format!("bad constant '{tok}'")));
        }
        args.push(store.intern(tok));
    }
    let pred = store.intern(pred);
    store
        .declare(pred, args.len())
        .map_err(|e| err(line, e.to_string()))?;
    Ok(Fact::new(pred, args))
}
