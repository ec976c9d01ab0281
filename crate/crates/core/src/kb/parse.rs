//! Line-based parser for fact files and definite programs.
//!
//! Grammar, one statement per line, `%` starts a comment:
//!
//! ```text
//! fact      := pred '(' const {',' const} ')' '.'
//! rule      := atom ':-' atom {',' atom} '.'
//! pred      := [a-z][a-zA-Z0-9_]*
//! const     := [a-z0-9][a-zA-Z0-9_]*
//! variable  := [A-Z][a-zA-Z0-9_]*
//! ```

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::ast::{Atom, Fact, Rule, RuleError, Term};
use super::store::{FactStore, StoreError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("arity mismatch for {pred}: declared {declared}, found {found}")]
    ArityMismatch {
        pred: String,
        declared: usize,
        found: usize,
    },
    #[error("variable {0} cannot appear in a fact")]
    VariableInFact(String),
    #[error("invalid rule: {0}")]
    InvalidRule(RuleError),
}

/// A parse failure with its 1-based source line.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, kind }
    }

    fn syntax(line: usize, msg: impl fmt::Display) -> Self {
        ParseError::new(line, ParseErrorKind::Syntax(msg.to_string()))
    }
}

fn store_err(line: usize, e: StoreError) -> ParseError {
    match e {
        StoreError::ArityMismatch {
            pred,
            declared,
            found,
        } => ParseError::new(
            line,
            ParseErrorKind::ArityMismatch {
                pred,
                declared,
                found,
            },
        ),
    }
}

/// Parses a fact file into a fresh store. Later duplicates are dropped
/// silently; any rule syntax is an error here.
pub fn parse_facts(text: &str) -> Result<FactStore, ParseError> {
    let mut store = FactStore::new();
    for (line_no, line) in statements(text) {
        let stmt = parse_statement(line, line_no, &mut store)?;
        match stmt {
            Statement::Fact(f) => {
                store.insert_fact(&f).map_err(|e| store_err(line_no, e))?;
            }
            Statement::Rule(_) => {
                return Err(ParseError::syntax(line_no, "rules are not allowed in a fact file"));
            }
        }
    }
    Ok(store)
}

/// Parses a program file against an existing store: bare facts are routed
/// into `store`, rules are returned in canonical form.
pub fn parse_program(text: &str, store: &mut FactStore) -> Result<Vec<Rule>, ParseError> {
    let mut rules = Vec::new();
    for (line_no, line) in statements(text) {
        match parse_statement(line, line_no, store)? {
            Statement::Fact(f) => {
                store.insert_fact(&f).map_err(|e| store_err(line_no, e))?;
            }
            Statement::Rule(r) => rules.push(r),
        }
    }
    Ok(rules)
}

enum Statement {
    Fact(Fact),
    Rule(Rule),
}

/// Strips comments and blank lines, yielding (1-based line, statement text).
fn statements(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = match raw.find('%') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let trimmed = stripped.trim();
        if trimmed.is_empty() {
            None
        } else {
            Some((i + 1, trimmed))
        }
    })
}

fn parse_statement(line: &str, line_no: usize, store: &mut FactStore) -> Result<Statement, ParseError> {
    match line.split_once(":-") {
        None => {
            let text = line
                .strip_suffix('.')
                .ok_or_else(|| ParseError::syntax(line_no, "statement must end with '.'"))?;
            let (atom, vars) = parse_atom(text.trim(), line_no, store, &mut HashMap::new())?;
            if let Some(v) = vars {
                return Err(ParseError::new(line_no, ParseErrorKind::VariableInFact(v)));
            }
            let args = atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => *c,
                    Term::Var(_) => unreachable!("checked above"),
                })
                .collect();
            store
                .declare(atom.pred, atom.args.len())
                .map_err(|e| store_err(line_no, e))?;
            Ok(Statement::Fact(Fact::new(atom.pred, args)))
        }
        Some((head_text, rest)) => {
            let rest = rest
                .trim()
                .strip_suffix('.')
                .ok_or_else(|| ParseError::syntax(line_no, "statement must end with '.'"))?;
            let mut vars = HashMap::new();
            let (head, _) = parse_atom(head_text.trim(), line_no, store, &mut vars)?;
            let mut body = Vec::new();
            for part in split_atoms(rest, line_no)? {
                let (atom, _) = parse_atom(part.trim(), line_no, store, &mut vars)?;
                body.push(atom);
            }
            if body.is_empty() {
                return Err(ParseError::syntax(line_no, "rule body is empty"));
            }
            for a in body.iter().chain(std::iter::once(&head)) {
                store
                    .declare(a.pred, a.args.len())
                    .map_err(|e| store_err(line_no, e))?;
            }
            let rule = Rule::new(head, body, vec![])
                .map_err(|e| ParseError::new(line_no, ParseErrorKind::InvalidRule(e)))?;
            Ok(Statement::Rule(rule))
        }
    }
}

/// Splits `p(a,B),q(B)` at top-level commas.
fn split_atoms(text: &str, line_no: usize) -> Result<Vec<&str>, ParseError> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| ParseError::syntax(line_no, "unbalanced ')'"))?;
            }
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(ParseError::syntax(line_no, "unbalanced '('"));
    }
    parts.push(&text[start..]);
    Ok(parts)
}

/// Parses one atom; returns the first variable name seen (if any) so fact
/// contexts can reject it with a good message.
fn parse_atom(
    text: &str,
    line_no: usize,
    store: &mut FactStore,
    vars: &mut HashMap<String, u32>,
) -> Result<(Atom, Option<String>), ParseError> {
    let open = text
        .find('(')
        .ok_or_else(|| ParseError::syntax(line_no, format!("expected '(' in atom `{text}`")))?;
    let close = text
        .rfind(')')
        .filter(|&c| c == text.len() - 1 && c > open)
        .ok_or_else(|| ParseError::syntax(line_no, format!("expected ')' closing atom `{text}`")))?;
    let name = text[..open].trim();
    if !is_predicate(name) {
        return Err(ParseError::syntax(
            line_no,
            format!("`{name}` is not a valid predicate name"),
        ));
    }
    let pred = store.intern(name);
    let mut args = Vec::new();
    let mut first_var = None;
    for raw in text[open + 1..close].split(',') {
        let tok = raw.trim();
        if tok.is_empty() {
            return Err(ParseError::syntax(line_no, format!("empty argument in `{text}`")));
        }
        if is_variable(tok) {
            if first_var.is_none() {
                first_var = Some(tok.to_string());
            }
            let next = vars.len() as u32;
            let id = *vars.entry(tok.to_string()).or_insert(next);
            args.push(Term::Var(id));
        } else if is_constant(tok) {
            args.push(Term::Const(store.intern(tok)));
        } else {
            return Err(ParseError::syntax(line_no, format!("`{tok}` is not a valid term")));
        }
    }
    Ok((Atom::new(pred, args), first_var))
}

pub(crate) fn is_predicate(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_constant(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_variable(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
