//! Language bias: the declarations bounding the hypothesis space.

use thiserror::Error;

use crate::kb::{is_predicate, FactStore, Symbol};

/// Bounds on the rule and hypothesis shapes the learner may consider.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bias {
    pub head: (Symbol, usize),
    pub body_preds: Vec<(Symbol, usize)>,
    pub max_vars: usize,
    pub max_body: usize,
    pub max_rules: usize,
    /// Total-literal cap on a whole hypothesis. Defaults to the structural
    /// limit `max_rules * (1 + max_body)`; see [`Bias::literal_bound`].
    pub max_literals: usize,
    /// When set, the head predicate may appear in rule bodies.
    pub allow_recursion: bool,
}

pub const DEFAULT_MAX_VARS: usize = 6;
pub const DEFAULT_MAX_BODY: usize = 6;
pub const DEFAULT_MAX_RULES: usize = 2;

impl Bias {
    pub fn new(head: (Symbol, usize), body_preds: Vec<(Symbol, usize)>) -> Self {
        Bias {
            head,
            body_preds,
            max_vars: DEFAULT_MAX_VARS,
            max_body: DEFAULT_MAX_BODY,
            max_rules: DEFAULT_MAX_RULES,
            max_literals: DEFAULT_MAX_RULES * (1 + DEFAULT_MAX_BODY),
            allow_recursion: false,
        }
    }

    /// Effective total-literal cap: the declared `max_literals`, never more
    /// than `max_rules` rules of `1 + max_body` literals can supply.
    pub fn literal_bound(&self) -> usize {
        self.max_literals.min(self.max_rules * (1 + self.max_body))
    }

    pub fn validate(&self) -> Result<(), BiasError> {
        for (name, value) in [
            ("max_vars", self.max_vars),
            ("max_body", self.max_body),
            ("max_rules", self.max_rules),
            ("max_literals", self.max_literals),
        ] {
            if value == 0 {
                return Err(BiasError::BadBound { name });
            }
        }
        if !self.allow_recursion && self.body_preds.iter().any(|&(p, _)| p == self.head.0) {
            return Err(BiasError::HeadInBody);
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BiasError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing head_pred declaration")]
    MissingHead,
    #[error("line {line}: duplicate head_pred declaration")]
    DuplicateHead { line: usize },
    #[error("bias bound {name} must be at least 1")]
    BadBound { name: &'static str },
    #[error("head predicate declared as body predicate without enable_recursion")]
    HeadInBody,
}

fn syntax(line: usize, msg: impl Into<String>) -> BiasError {
    BiasError::Syntax { line, msg: msg.into() }
}

/// Parses bias directives. Recognized forms:
///
/// ```text
/// head_pred(f,1).   body_pred(tail,2).   max_vars(5).
/// max_body(4).      max_rules(2).        enable_recursion.
/// ```
///
/// Unknown directives are rejected. Predicate arities are registered in the
/// store so conflicts with the background knowledge surface here.
pub fn parse_bias(text: &str, store: &mut FactStore) -> Result<Bias, BiasError> {
    let mut head: Option<(Symbol, usize)> = None;
    let mut body_preds: Vec<(Symbol, usize)> = Vec::new();
    let mut max_vars = DEFAULT_MAX_VARS;
    let mut max_body = DEFAULT_MAX_BODY;
    let mut max_rules = DEFAULT_MAX_RULES;
    let mut allow_recursion = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stmt = raw.split('%').next().unwrap_or("").trim();
        if stmt.is_empty() {
            continue;
        }
        let stmt = stmt
            .strip_suffix('.')
            .ok_or_else(|| syntax(line, "expected '.' at end of directive"))?
            .trim();
        if stmt == "enable_recursion" {
            allow_recursion = true;
            continue;
        }
        let (name, rest) = stmt
            .split_once('(')
            .ok_or_else(|| syntax(line, format!("unknown directive '{stmt}'")))?;
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| syntax(line, "expected ')'"))?;
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let pred_arity = |parts: &[&str], store: &mut FactStore| -> Result<(Symbol, usize), BiasError> {
            if parts.len() != 2 {
                return Err(syntax(line, format!("{name} expects (predicate,arity)")));
            }
            if !is_predicate(parts[0]) {
                return Err(syntax(line, format!("bad predicate name '{}'", parts[0])));
            }
            let arity: usize = parts[1]
                .parse()
                .map_err(|_| syntax(line, format!("bad arity '{}'", parts[1])))?;
            if arity == 0 {
                return Err(syntax(line, "arity must be at least 1"));
            }
            let sym = store.intern(parts[0]);
            store
                .declare(sym, arity)
                .map_err(|e| syntax(line, e.to_string()))?;
            Ok((sym, arity))
        };
        let bound = |parts: &[&str]| -> Result<usize, BiasError> {
            if parts.len() != 1 {
                return Err(syntax(line, format!("{name} expects a single integer")));
            }
            parts[0]
                .parse()
                .map_err(|_| syntax(line, format!("bad integer '{}'", parts[0])))
        };
        match name.trim() {
            "head_pred" => {
                if head.is_some() {
                    return Err(BiasError::DuplicateHead { line });
                }
                head = Some(pred_arity(&parts, store)?);
            }
            "body_pred" => {
                let decl = pred_arity(&parts, store)?;
                if !body_preds.contains(&decl) {
                    body_preds.push(decl);
                }
            }
            "max_vars" => max_vars = bound(&parts)?,
            "max_body" => max_body = bound(&parts)?,
            "max_rules" => max_rules = bound(&parts)?,
            other => return Err(syntax(line, format!("unknown directive '{other}'"))),
        }
    }

    let bias = Bias {
        head: head.ok_or(BiasError::MissingHead)?,
        body_preds,
        max_vars,
        max_body,
        max_rules,
        max_literals: max_rules * (1 + max_body),
        allow_recursion,
    };
    bias.validate()?;
    Ok(bias)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_bias() {
        let mut store = FactStore::new();
        let bias = parse_bias(
            "% target\nhead_pred(f,1).\nbody_pred(length,2).\nbody_pred(one,1).\n\
             max_vars(5).\nmax_body(4).\nmax_rules(2).\n",
            &mut store,
        )
        .unwrap();
        assert_eq!(store.symbols().name(bias.head.0), "f");
        assert_eq!(bias.head.1, 1);
        assert_eq!(bias.body_preds.len(), 2);
        assert_eq!((bias.max_vars, bias.max_body, bias.max_rules), (5, 4, 2));
        assert!(!bias.allow_recursion);
        assert_eq!((bias.max_literals, bias.literal_bound()), (10, 10));
    }

    #[test]
    fn defaults_apply() {
        let mut store = FactStore::new();
        let bias = parse_bias("head_pred(f,2).\nbody_pred(edge,2).\n", &mut store).unwrap();
        assert_eq!(bias.max_vars, DEFAULT_MAX_VARS);
        assert_eq!(bias.max_body, DEFAULT_MAX_BODY);
        assert_eq!(bias.max_rules, DEFAULT_MAX_RULES);
    }

    #[test]
    fn rejects_unknown_directive() {
        let mut store = FactStore::new();
        let err = parse_bias("head_pred(f,1).\nmax_size(3).\n", &mut store).unwrap_err();
        assert!(matches!(err, BiasError::Syntax { line: 2, .. }));
    }

    #[test]
    fn rejects_missing_head() {
        let mut store = FactStore::new();
        let err = parse_bias("body_pred(edge,2).\n", &mut store).unwrap_err();
        assert_eq!(err, BiasError::MissingHead);
    }

    #[test]
    fn recursion_gate_for_head_in_body() {
        let mut store = FactStore::new();
        let text = "head_pred(f,2).\nbody_pred(f,2).\nbody_pred(edge,2).\n";
        let err = parse_bias(text, &mut store).unwrap_err();
        assert_eq!(err, BiasError::HeadInBody);
        let mut store = FactStore::new();
        let with = format!("{text}enable_recursion.\n");
        let bias = parse_bias(&with, &mut store).unwrap();
        assert!(bias.allow_recursion);
    }

    #[test]
    fn rejects_zero_bounds_and_arity_conflicts() {
        let mut store = FactStore::new();
        let err = parse_bias("head_pred(f,1).\nmax_rules(0).\n", &mut store).unwrap_err();
        assert_eq!(err, BiasError::BadBound { name: "max_rules" });
        let mut store = FactStore::new();
        let err = parse_bias(
            "head_pred(f,1).\nbody_pred(edge,2).\nbody_pred(edge,3).\n",
            &mut store,
        )
        .unwrap_err();
        assert!(matches!(err, BiasError::Syntax { line: 3, .. }));
    }

    #[test]
    fn duplicate_body_pred_collapses() {
        let mut store = FactStore::new();
        let bias = parse_bias(
            "head_pred(f,1).\nbody_pred(edge,2).\nbody_pred(edge,2).\n",
            &mut store,
        )
        .unwrap();
        assert_eq!(bias.body_preds.len(), 1);
    }
}
