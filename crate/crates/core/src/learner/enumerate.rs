//! Exhaustive enumeration of canonical candidate rules.
//!
//! The generator walks body literal sequences in strictly ascending atom
//! order, introducing fresh variables in ascending order as it goes. Every
//! canonical rule has exactly one such spelling, so emitting a candidate
//! only when it equals its own canonical form yields one representative per
//! renaming class without a dedup table. Constraint violations prune whole
//! subtrees: pattern and count-bound matches are monotone in the body, so
//! a violating prefix cannot be extended into a clean rule.

use crate::constraints::ConstraintSet;
use crate::kb::{Atom, Rule, Symbol, Term, VarId};

use super::bias::Bias;

/// All canonical rules with exactly `size` literals (one head plus
/// `size - 1` body literals) that respect the bias bounds and violate no
/// constraint in `discovered`. Deterministic ascending order.
pub fn enumerate_rules(bias: &Bias, discovered: &ConstraintSet, size: usize) -> Vec<Rule> {
    let Some(body_len) = size.checked_sub(1) else { return Vec::new() };
    if body_len == 0 || body_len > bias.max_body {
        return Vec::new();
    }
    let mut preds: Vec<(Symbol, usize)> = bias.body_preds.clone();
    if bias.allow_recursion && !preds.contains(&bias.head) {
        preds.push(bias.head);
    }
    preds.sort();
    preds.dedup();

    let mut out = Vec::new();
    for head_args in var_tuples(bias.head.1, 0, bias.max_vars) {
        let nvars = next_free_var(&head_args, 0);
        let head = Atom::new(bias.head.0, head_args);
        let mut body: Vec<Atom> = Vec::with_capacity(body_len);
        extend(&head, nvars, &mut body, body_len, &preds, bias, discovered, &mut out);
    }
    out.sort();
    out
}

/// Highest variable index used plus one, at least `floor`.
fn next_free_var(args: &[Term], floor: VarId) -> VarId {
    args.iter()
        .filter_map(|t| t.as_var())
        .map(|v| v + 1)
        .fold(floor, VarId::max)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    head: &Atom,
    nvars: VarId,
    body: &mut Vec<Atom>,
    remaining: usize,
    preds: &[(Symbol, usize)],
    bias: &Bias,
    discovered: &ConstraintSet,
    out: &mut Vec<Rule>,
) {
    if remaining == 0 {
        if let Ok(rule) = Rule::new(head.clone(), body.clone(), Vec::new()) {
            // Keep only the candidates that are their own canonical form;
            // every renaming class surfaces exactly once that way.
            if rule.head() == head && rule.body() == body.as_slice() {
                out.push(rule);
            }
        }
        return;
    }
    let floor = body.last().cloned();
    for &(pred, arity) in preds {
        if let Some(f) = &floor {
            if pred < f.pred {
                continue;
            }
        }
        for args in var_tuples(arity, nvars, bias.max_vars) {
            let atom = Atom::new(pred, args);
            if floor.as_ref().is_some_and(|f| atom <= *f) {
                continue;
            }
            let next = next_free_var(&atom.args, nvars);
            body.push(atom);
            if !discovered.body_violates(body) {
                extend(head, next, body, remaining - 1, preds, bias, discovered, out);
            }
            body.pop();
        }
    }
}

/// Argument tuples over variables: positions may reuse any variable below
/// `nvars` or introduce fresh ones in ascending order, never exceeding
/// `max_vars` distinct variables in the rule.
fn var_tuples(arity: usize, nvars: VarId, max_vars: usize) -> Vec<Vec<Term>> {
    let mut out = Vec::new();
    let mut current: Vec<Term> = Vec::with_capacity(arity);
    fill(arity, nvars, max_vars as VarId, &mut current, &mut out);
    out
}

fn fill(arity: usize, nvars: VarId, max_vars: VarId, current: &mut Vec<Term>, out: &mut Vec<Vec<Term>>) {
    if current.len() == arity {
        out.push(current.clone());
        return;
    }
    let fresh = if nvars < max_vars { nvars + 1 } else { nvars };
    for v in 0..fresh {
        current.push(Term::Var(v));
        let next = if v == nvars { nvars + 1 } else { nvars };
        fill(arity, next, max_vars, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{compile_constraint, ConstraintSet};
    use crate::kb::{parse_facts, FactStore, SymbolTable};
    use crate::miner::{PropertyAssertion, PropertyKind};

    fn micro_bias(store: &mut FactStore) -> Bias {
        let f = store.intern("f");
        let odd = store.intern("odd");
        let even = store.intern("even");
        let mut bias = Bias::new((f, 1), vec![(odd, 1), (even, 1)]);
        bias.max_vars = 1;
        bias.max_body = 2;
        bias
    }

    fn render(rules: &[Rule], syms: &SymbolTable) -> Vec<String> {
        rules.iter().map(|r| r.display(syms).to_string()).collect()
    }

    #[test]
    fn micro_bias_enumerates_three_rules() {
        let mut store = parse_facts("odd(1).\neven(2).").unwrap();
        let bias = micro_bias(&mut store);
        let empty = ConstraintSet::new();
        let mut all = Vec::new();
        for size in 2..=3 {
            all.extend(enumerate_rules(&bias, &empty, size));
        }
        let got = render(&all, store.symbols());
        // Body atoms order by interning sequence: odd precedes even here.
        assert_eq!(
            got,
            vec![
                "f(A):-odd(A).",
                "f(A):-even(A).",
                "f(A):-odd(A),even(A).",
            ]
        );
    }

    #[test]
    fn micro_bias_with_exclusive_prunes_conjunction() {
        let mut store = parse_facts("odd(1).\neven(2).").unwrap();
        let bias = micro_bias(&mut store);
        let odd = store.symbols().lookup("odd").unwrap();
        let even = store.symbols().lookup("even").unwrap();
        let mut set = ConstraintSet::new();
        set.push(compile_constraint(&PropertyAssertion {
            kind: PropertyKind::Exclusive,
            relations: vec![(even, 1), (odd, 1)],
        }));
        let mut all = Vec::new();
        for size in 2..=3 {
            all.extend(enumerate_rules(&bias, &set, size));
        }
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn max_body_zero_like_bounds_exclude_everything() {
        let mut store = FactStore::new();
        let f = store.intern("f");
        let p = store.intern("p");
        let mut bias = Bias::new((f, 1), vec![(p, 1)]);
        bias.max_body = 1;
        assert!(enumerate_rules(&bias, &ConstraintSet::new(), 3).is_empty());
        assert!(enumerate_rules(&bias, &ConstraintSet::new(), 1).is_empty());
    }

    #[test]
    fn no_two_rules_are_renamings() {
        let mut store = FactStore::new();
        let f = store.intern("f");
        let p = store.intern("p");
        let q = store.intern("q");
        let mut bias = Bias::new((f, 2), vec![(p, 2), (q, 1)]);
        bias.max_vars = 3;
        bias.max_body = 2;
        let mut seen = std::collections::HashSet::new();
        for size in 2..=3 {
            for rule in enumerate_rules(&bias, &ConstraintSet::new(), size) {
                assert_eq!(rule.cost(), size);
                assert!(seen.insert(rule.clone()), "duplicate {rule:?}");
            }
        }
        assert!(!seen.is_empty());
    }

    #[test]
    fn recursion_flag_admits_head_predicate_in_bodies() {
        let mut store = FactStore::new();
        let f = store.intern("f");
        let e = store.intern("edge");
        let mut bias = Bias::new((f, 2), vec![(e, 2)]);
        bias.max_vars = 3;
        bias.max_body = 2;
        let without: Vec<Rule> = (2..=3)
            .flat_map(|s| enumerate_rules(&bias, &ConstraintSet::new(), s))
            .collect();
        assert!(without.iter().all(|r| !r.is_recursive()));
        bias.allow_recursion = true;
        let with: Vec<Rule> = (2..=3)
            .flat_map(|s| enumerate_rules(&bias, &ConstraintSet::new(), s))
            .collect();
        assert!(with.len() > without.len());
        assert!(with.iter().any(|r| r.is_recursive()));
        // The non-recursive subset is unchanged by the flag.
        let nonrec: Vec<&Rule> = with.iter().filter(|r| !r.is_recursive()).collect();
        assert_eq!(nonrec.len(), without.len());
    }

    #[test]
    fn respects_max_vars() {
        let mut store = FactStore::new();
        let f = store.intern("f");
        let p = store.intern("p");
        let mut bias = Bias::new((f, 1), vec![(p, 2)]);
        bias.max_vars = 2;
        bias.max_body = 3;
        for size in 2..=4 {
            for rule in enumerate_rules(&bias, &ConstraintSet::new(), size) {
                let vars: std::collections::HashSet<_> = rule
                    .body()
                    .iter()
                    .flat_map(|a| a.vars())
                    .chain(rule.head().vars())
                    .collect();
                assert!(vars.len() <= 2, "{rule:?} uses {vars:?}");
            }
        }
    }
}
