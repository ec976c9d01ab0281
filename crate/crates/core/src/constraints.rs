//! Compiles mined property assertions into hypothesis constraints over the
//! rule meta-language and decides whether candidate rules violate them.
//!
//! Pattern constraints match body-literal shapes homomorphically: two
//! templates may map onto the same body literal, mirroring how the ASP
//! grounding of the same constraints behaves. Count-bound constraints cap
//! the number of provably distinct argument completions per grouping key.
//! Violation means the rule body, together with the disequalities implied
//! by the match, is unsatisfiable over the mined store, so no optimal
//! solution is lost by pruning the rule.

use std::collections::HashMap;

use crate::kb::{sat_body, Atom, FactStore, Rule, Symbol, Term, VarId};
use crate::miner::{PropertyAssertion, PropertyKind};

/// One body-literal shape: predicate plus pattern-variable slots.
/// Slot values index pattern variables and may repeat within a template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralTemplate {
    pub pred: Symbol,
    pub slots: Vec<u32>,
}

impl LiteralTemplate {
    fn as_atom(&self) -> Atom {
        Atom::new(self.pred, self.slots.iter().map(|&s| Term::Var(s)).collect())
    }
}

/// The two constraint mechanisms. `max` is the largest number of distinct
/// completions a grouping key may have; every compiled constraint uses 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintBody {
    PatternMatch {
        templates: Vec<LiteralTemplate>,
        diseqs: Vec<(u32, u32)>,
    },
    CountBound {
        pred: Symbol,
        arity: usize,
        group: Vec<usize>,
        max: usize,
    },
}

/// A compiled pruning constraint with its originating assertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisConstraint {
    pub body: ConstraintBody,
    pub provenance: PropertyAssertion,
}

impl HypothesisConstraint {
    /// Predicates whose presence in a rule body makes this constraint
    /// worth checking.
    pub fn preds(&self) -> Vec<Symbol> {
        match &self.body {
            ConstraintBody::PatternMatch { templates, .. } => {
                let mut ps: Vec<Symbol> = templates.iter().map(|t| t.pred).collect();
                ps.sort();
                ps.dedup();
                ps
            }
            ConstraintBody::CountBound { pred, .. } => vec![*pred],
        }
    }
}

/// Maps a property assertion to its pruning constraint.
pub fn compile_constraint(assertion: &PropertyAssertion) -> HypothesisConstraint {
    let (pred, arity) = assertion.relations[0];
    let body = match &assertion.kind {
        PropertyKind::Irreflexive { arity } => ConstraintBody::PatternMatch {
            templates: vec![LiteralTemplate { pred, slots: vec![0; *arity] }],
            diseqs: Vec::new(),
        },
        PropertyKind::Antitransitive => ConstraintBody::PatternMatch {
            templates: vec![
                LiteralTemplate { pred, slots: vec![0, 1] },
                LiteralTemplate { pred, slots: vec![1, 2] },
                LiteralTemplate { pred, slots: vec![0, 2] },
            ],
            diseqs: Vec::new(),
        },
        PropertyKind::Antitriangular => ConstraintBody::PatternMatch {
            templates: vec![
                LiteralTemplate { pred, slots: vec![0, 1] },
                LiteralTemplate { pred, slots: vec![1, 2] },
                LiteralTemplate { pred, slots: vec![2, 0] },
            ],
            diseqs: Vec::new(),
        },
        PropertyKind::Asymmetric { perm } => ConstraintBody::PatternMatch {
            templates: vec![
                LiteralTemplate { pred, slots: (0..perm.len() as u32).collect() },
                LiteralTemplate { pred, slots: perm.iter().map(|&i| i as u32).collect() },
            ],
            diseqs: Vec::new(),
        },
        PropertyKind::Unique { det, dep } => ConstraintBody::CountBound {
            pred,
            arity: det.len() + dep.len(),
            group: det.clone(),
            max: 1,
        },
        PropertyKind::Singleton => ConstraintBody::CountBound {
            pred,
            arity,
            group: Vec::new(),
            max: 1,
        },
        PropertyKind::Exclusive => {
            let (q, _) = assertion.relations[1];
            let slots: Vec<u32> = (0..arity as u32).collect();
            ConstraintBody::PatternMatch {
                templates: vec![
                    LiteralTemplate { pred, slots: slots.clone() },
                    LiteralTemplate { pred: q, slots },
                ],
                diseqs: Vec::new(),
            }
        }
    };
    HypothesisConstraint { body, provenance: assertion.clone() }
}

/// The body literals and disequalities certifying one violation: their
/// conjunction is unsatisfiable over the store the constraint was mined
/// from (the rule-level reading of optimal soundness).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchWitness {
    pub literals: Vec<Atom>,
    pub diseqs: Vec<(VarId, VarId)>,
}

/// Distinctness of two rule terms as the grounder sees them: distinct
/// variables are distinct meta-terms (recorded as a needed disequality),
/// distinct constants are unconditionally distinct, and a variable never
/// provably differs from anything else.
fn provably_distinct(a: &Term, b: &Term) -> Option<Option<(VarId, VarId)>> {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) if x != y => Some(Some((*x, *y))),
        (Term::Const(x), Term::Const(y)) if x != y => Some(None),
        _ => None,
    }
}

/// True iff the rule violates the constraint. See [`find_violation`].
pub fn violates(rule: &Rule, constraint: &HypothesisConstraint) -> bool {
    find_violation(rule, constraint).is_some()
}

/// Searches the rule body for a constraint violation and returns its
/// witness. Matching ignores the head: constraints are body-only.
pub fn find_violation(rule: &Rule, constraint: &HypothesisConstraint) -> Option<MatchWitness> {
    find_body_violation(rule.body(), constraint)
}

/// [`find_violation`] over a bare literal list. Violations are monotone in
/// the body, so a violating prefix dooms every extension.
pub fn find_body_violation(body: &[Atom], constraint: &HypothesisConstraint) -> Option<MatchWitness> {
    match &constraint.body {
        ConstraintBody::PatternMatch { templates, diseqs } => {
            let mut binding: HashMap<u32, Term> = HashMap::new();
            let mut matched: Vec<Atom> = Vec::new();
            match_templates(templates, 0, body, &mut binding, &mut matched, diseqs)
        }
        ConstraintBody::CountBound { pred, group, max, .. } => {
            debug_assert_eq!(*max, 1, "compiled count bounds always cap at one");
            let lits: Vec<&Atom> = body.iter().filter(|a| a.pred == *pred).collect();
            for (i, l1) in lits.iter().enumerate() {
                for l2 in &lits[i + 1..] {
                    if group.iter().any(|&c| l1.args[c] != l2.args[c]) {
                        continue;
                    }
                    // Same grouping key: find a completion column where the
                    // two literals provably differ.
                    let split = (0..l1.args.len())
                        .filter(|c| !group.contains(c))
                        .find_map(|c| provably_distinct(&l1.args[c], &l2.args[c]));
                    if let Some(diseq) = split {
                        return Some(MatchWitness {
                            literals: vec![(*l1).clone(), (*l2).clone()],
                            diseqs: diseq.into_iter().collect(),
                        });
                    }
                }
            }
            None
        }
    }
}

/// Backtracking assignment of templates to body literals. Homomorphic:
/// distinct templates may claim the same literal.
fn match_templates(
    templates: &[LiteralTemplate],
    depth: usize,
    body: &[Atom],
    binding: &mut HashMap<u32, Term>,
    matched: &mut Vec<Atom>,
    diseqs: &[(u32, u32)],
) -> Option<MatchWitness> {
    if depth == templates.len() {
        // Every constraint diseq must hold between the bound rule terms.
        let mut needed: Vec<(VarId, VarId)> = Vec::new();
        for (x, y) in diseqs {
            match provably_distinct(&binding[x], &binding[y])? {
                Some(pair) => needed.push(pair),
                None => {}
            }
        }
        return Some(MatchWitness { literals: matched.clone(), diseqs: needed });
    }
    let template = &templates[depth];
    for lit in body.iter().filter(|a| a.pred == template.pred) {
        if lit.args.len() != template.slots.len() {
            continue;
        }
        let mut added: Vec<u32> = Vec::new();
        let mut ok = true;
        for (&slot, term) in template.slots.iter().zip(&lit.args) {
            match binding.get(&slot) {
                Some(bound) => {
                    if bound != term {
                        ok = false;
                        break;
                    }
                }
                None => {
                    binding.insert(slot, term.clone());
                    added.push(slot);
                }
            }
        }
        if ok {
            matched.push(lit.clone());
            if let Some(w) = match_templates(templates, depth + 1, body, binding, matched, diseqs)
            {
                return Some(w);
            }
            matched.pop();
        }
        for slot in added {
            binding.remove(&slot);
        }
    }
    None
}

/// The conjunctive queries whose joint unsatisfiability certifies the
/// constraint. Pattern constraints are one query;
/// count bounds expand to a two-literal query per completion column.
fn unsat_queries(constraint: &HypothesisConstraint) -> Vec<(Vec<Atom>, Vec<(VarId, VarId)>)> {
    match &constraint.body {
        ConstraintBody::PatternMatch { templates, diseqs } => {
            let atoms = templates.iter().map(|t| t.as_atom()).collect();
            vec![(atoms, diseqs.iter().map(|&(x, y)| (x, y)).collect())]
        }
        ConstraintBody::CountBound { pred, arity, group, .. } => {
            let a = *arity as u32;
            (0..*arity)
                .filter(|c| !group.contains(c))
                .map(|c| {
                    let first = Atom::new(*pred, (0..a).map(Term::Var).collect());
                    let second = Atom::new(
                        *pred,
                        (0..*arity)
                            .map(|k| {
                                if group.contains(&k) {
                                    Term::Var(k as u32)
                                } else {
                                    Term::Var(a + k as u32)
                                }
                            })
                            .collect(),
                    );
                    (vec![first, second], vec![(c as u32, a + c as u32)])
                })
                .collect()
        }
    }
}

/// True iff every violating body shape of the constraint is unsatisfiable
/// over the store. Holds for every constraint compiled from properties
/// mined on that same store.
pub fn verify_unsat(constraint: &HypothesisConstraint, store: &FactStore) -> bool {
    unsat_queries(constraint)
        .iter()
        .all(|(body, diseqs)| !sat_body(body, diseqs, store))
}

/// Compiled constraints indexed by body predicate.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    items: Vec<HypothesisConstraint>,
    by_pred: HashMap<Symbol, Vec<usize>>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Compiles a mined assertion list in order.
    pub fn compile(assertions: &[PropertyAssertion]) -> Self {
        let mut set = Self::new();
        for a in assertions {
            set.push(compile_constraint(a));
        }
        set
    }

    pub fn push(&mut self, constraint: HypothesisConstraint) {
        let idx = self.items.len();
        for pred in constraint.preds() {
            self.by_pred.entry(pred).or_default().push(idx);
        }
        self.items.push(constraint);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &HypothesisConstraint> {
        self.items.iter()
    }

    /// Constraints mentioning the given predicate.
    pub fn for_pred(&self, pred: Symbol) -> impl Iterator<Item = &HypothesisConstraint> {
        self.by_pred
            .get(&pred)
            .into_iter()
            .flatten()
            .map(|&i| &self.items[i])
    }

    /// True iff the rule violates any constraint. Only constraints indexed
    /// under the rule's body predicates are consulted.
    pub fn rule_violates(&self, rule: &Rule) -> bool {
        self.body_violates(rule.body())
    }

    /// [`ConstraintSet::rule_violates`] over a bare literal list, usable on
    /// partial bodies during enumeration.
    pub fn body_violates(&self, body: &[Atom]) -> bool {
        let mut preds: Vec<Symbol> = body.iter().map(|a| a.pred).collect();
        preds.sort();
        preds.dedup();
        let mut seen: Vec<usize> = Vec::new();
        for pred in preds {
            if let Some(indices) = self.by_pred.get(&pred) {
                for &i in indices {
                    if seen.contains(&i) {
                        continue;
                    }
                    seen.push(i);
                    if find_body_violation(body, &self.items[i]).is_some() {
                        return true;
                    }
                }
            }
        }
        false
    }
}
