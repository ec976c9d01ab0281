//! Bottom-up evaluation: semi-naive least-model computation, entailment
//! under the closed-world assumption, and satisfiability of query bodies.

use std::collections::{HashMap, HashSet};

use super::ast::{Atom, Fact, Rule, Term, VarId};
use super::store::FactStore;
use super::symbol::Symbol;

/// Growable relation used for facts derived during evaluation. Column
/// indexes are maintained incrementally because derived relations are
/// joined against while they grow.
#[derive(Debug)]
pub(crate) struct DynRel {
    arity: usize,
    flat: Vec<Symbol>,
    rows: HashSet<Box<[Symbol]>>,
    cols: Vec<HashMap<Symbol, Vec<u32>>>,
}

impl DynRel {
    fn new(arity: usize) -> Self {
        DynRel {
            arity,
            flat: Vec::new(),
            rows: HashSet::new(),
            cols: vec![HashMap::new(); arity],
        }
    }

    fn insert(&mut self, tuple: &[Symbol]) -> bool {
        if self.rows.contains(tuple) {
            return false;
        }
        let row = (self.rows.len()) as u32;
        self.rows.insert(tuple.into());
        self.flat.extend_from_slice(tuple);
        for (c, &s) in tuple.iter().enumerate() {
            self.cols[c].entry(s).or_default().push(row);
        }
        true
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    fn row(&self, i: u32) -> &[Symbol] {
        &self.flat[i as usize * self.arity..(i as usize + 1) * self.arity]
    }

    fn iter(&self) -> impl Iterator<Item = &[Symbol]> {
        self.flat.chunks_exact(self.arity.max(1))
    }

    fn rows_with(&self, col: usize, value: Symbol) -> &[u32] {
        static EMPTY: [u32; 0] = [];
        self.cols[col].get(&value).map(|v| v.as_slice()).unwrap_or(&EMPTY)
    }

    fn contains(&self, tuple: &[Symbol]) -> bool {
        tuple.len() == self.arity && self.rows.contains(tuple)
    }
}

/// Facts derived on top of a base store, without copying the base.
#[derive(Debug, Default)]
pub(crate) struct Derived {
    pub(crate) rels: HashMap<Symbol, DynRel>,
}

impl Derived {
    pub(crate) fn contains(&self, fact: &Fact) -> bool {
        self.rels.get(&fact.pred).is_some_and(|r| r.contains(&fact.args))
    }
}

/// Computes all facts derivable from `rules` over `store` by semi-naive
/// iteration: after the seeding round, each joined derivation must use at
/// least one fact that became known in the previous round.
pub(crate) fn derive(rules: &[Rule], store: &FactStore) -> Derived {
    let mut derived = Derived::default();
    if rules.is_empty() {
        return derived;
    }

    // Seeding round: plain evaluation over the base store.
    let mut delta: HashMap<Symbol, Vec<Box<[Symbol]>>> = HashMap::new();
    let mut round: Vec<Fact> = Vec::new();
    for rule in rules {
        eval_rule(rule, None, store, &derived, &mut round);
    }
    absorb(&mut derived, &mut delta, store, round);

    while !delta.is_empty() {
        let mut round: Vec<Fact> = Vec::new();
        for rule in rules {
            for (i, atom) in rule.body().iter().enumerate() {
                if let Some(dl) = delta.get(&atom.pred) {
                    eval_rule(rule, Some((i, dl.as_slice())), store, &derived, &mut round);
                }
            }
        }
        delta.clear();
        absorb(&mut derived, &mut delta, store, round);
    }
    derived
}

/// Moves genuinely new facts of one round into the overlay and the delta.
fn absorb(
    derived: &mut Derived,
    delta: &mut HashMap<Symbol, Vec<Box<[Symbol]>>>,
    store: &FactStore,
    round: Vec<Fact>,
) {
    for fact in round {
        if store.contains(&fact) {
            continue;
        }
        let rel = derived
            .rels
            .entry(fact.pred)
            .or_insert_with(|| DynRel::new(fact.args.len()));
        if rel.insert(&fact.args) {
            delta.entry(fact.pred).or_default().push(fact.args.into());
        }
    }
}

/// Evaluates one rule, optionally restricting body position `i` to the
/// delta list, appending every head instantiation to `out`.
fn eval_rule(
    rule: &Rule,
    delta: Option<(usize, &[Box<[Symbol]>])>,
    store: &FactStore,
    derived: &Derived,
    out: &mut Vec<Fact>,
) {
    let body = rule.body();
    let plan = plan_order(body, delta.map(|(i, _)| i), store, derived);
    let nvars = var_count(rule);
    let mut bindings: Vec<Option<Symbol>> = vec![None; nvars];
    let head = rule.head();
    join(
        body,
        rule.diseqs(),
        &plan,
        0,
        delta,
        store,
        derived,
        &mut bindings,
        &mut |bindings| {
            let args = head
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => bindings[*v as usize].expect("head variable bound"),
                    Term::Const(c) => *c,
                })
                .collect();
            out.push(Fact::new(head.pred, args));
            false
        },
    );
}

fn var_count(rule: &Rule) -> usize {
    rule.body()
        .iter()
        .chain(std::iter::once(rule.head()))
        .flat_map(|a| a.vars())
        .map(|v| v as usize + 1)
        .max()
        .unwrap_or(0)
}

/// Greedy join order: prefer atoms with the most already-bound variables,
/// breaking ties by ascending relation size, then by body position. An atom
/// restricted to the delta goes first.
fn plan_order(
    body: &[Atom],
    delta_pos: Option<usize>,
    store: &FactStore,
    derived: &Derived,
) -> Vec<usize> {
    let size = |a: &Atom| -> usize {
        let base = store.relation(a.pred).map_or(0, |r| r.len());
        let dynn = derived.rels.get(&a.pred).map_or(0, |r| r.len());
        base + dynn
    };
    let mut order = Vec::with_capacity(body.len());
    let mut bound: HashSet<VarId> = HashSet::new();
    let mut used = vec![false; body.len()];
    if let Some(i) = delta_pos {
        order.push(i);
        used[i] = true;
        bound.extend(body[i].vars());
    }
    while order.len() < body.len() {
        let next = (0..body.len())
            .filter(|&i| !used[i])
            .min_by_key(|&i| {
                let b = body[i].vars().filter(|v| bound.contains(v)).count();
                (usize::MAX - b, size(&body[i]), i)
            })
            .unwrap();
        order.push(next);
        used[next] = true;
        bound.extend(body[next].vars());
    }
    order
}

/// Depth-first index-backed join. Calls `on_solution` for every satisfying
/// assignment; a `true` return aborts the search (used for early
/// termination on the first witness). Returns the abort flag.
#[allow(clippy::too_many_arguments)]
fn join(
    body: &[Atom],
    diseqs: &[(VarId, VarId)],
    plan: &[usize],
    depth: usize,
    delta: Option<(usize, &[Box<[Symbol]>])>,
    store: &FactStore,
    derived: &Derived,
    bindings: &mut Vec<Option<Symbol>>,
    on_solution: &mut dyn FnMut(&[Option<Symbol>]) -> bool,
) -> bool {
    if depth == plan.len() {
        return on_solution(bindings);
    }
    let ai = plan[depth];
    let atom = &body[ai];
    // Probe on the first column whose value is already fixed.
    let probe = atom.args.iter().enumerate().find_map(|(c, t)| match t {
        Term::Const(s) => Some((c, *s)),
        Term::Var(v) => bindings[*v as usize].map(|s| (c, s)),
    });
    let mut step = |row: &[Symbol]| -> bool {
        let mut trail: Vec<VarId> = Vec::new();
        if bind_row(&atom.args, row, bindings, &mut trail) && diseqs_ok(diseqs, bindings) {
            if join(
                body, diseqs, plan, depth + 1, delta, store, derived, bindings, on_solution,
            ) {
                for v in trail {
                    bindings[v as usize] = None;
                }
                return true;
            }
        }
        for v in trail {
            bindings[v as usize] = None;
        }
        false
    };

    if let Some((dpos, list)) = delta {
        if dpos == ai {
            for row in list {
                if row.len() == atom.args.len() && step(row) {
                    return true;
                }
            }
            return false;
        }
    }

    let base = store.relation(atom.pred).filter(|r| r.arity() == atom.args.len());
    let dynn = derived
        .rels
        .get(&atom.pred)
        .filter(|r| r.arity == atom.args.len());

    match probe {
        Some((c, val)) => {
            if let Some(r) = base {
                for &i in r.rows_with(c, val) {
                    if step(r.row(i)) {
                        return true;
                    }
                }
            }
            if let Some(r) = dynn {
                for &i in r.rows_with(c, val) {
                    if step(r.row(i)) {
                        return true;
                    }
                }
            }
        }
        None => {
            if let Some(r) = base {
                for row in r.iter() {
                    if step(row) {
                        return true;
                    }
                }
            }
            if let Some(r) = dynn {
                for row in r.iter() {
                    if step(row) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn bind_row(
    args: &[Term],
    row: &[Symbol],
    bindings: &mut [Option<Symbol>],
    trail: &mut Vec<VarId>,
) -> bool {
    debug_assert_eq!(args.len(), row.len());
    for (t, &val) in args.iter().zip(row) {
        match t {
            Term::Const(c) => {
                if *c != val {
                    return false;
                }
            }
            Term::Var(v) => match bindings[*v as usize] {
                Some(b) => {
                    if b != val {
                        return false;
                    }
                }
                None => {
                    bindings[*v as usize] = Some(val);
                    trail.push(*v);
                }
            },
        }
    }
    true
}

/// Disequalities hold unless both sides are bound to the same constant, so
/// checking after every binding step stays sound.
fn diseqs_ok(diseqs: &[(VarId, VarId)], bindings: &[Option<Symbol>]) -> bool {
    diseqs.iter().all(|&(x, y)| {
        match (bindings[x as usize], bindings[y as usize]) {
            (Some(a), Some(b)) => a != b,
            _ => true,
        }
    })
}

/// Returns the least Herbrand model of `rules` over `store` as a new store.
/// The result is a pure function of the inputs; rule order never changes
/// the fact set.
pub fn ground_model(rules: &[Rule], store: &FactStore) -> FactStore {
    let derived = derive(rules, store);
    let mut model = store.clone();
    let mut preds: Vec<Symbol> = derived.rels.keys().copied().collect();
    preds.sort();
    for pred in preds {
        let rel = &derived.rels[&pred];
        for row in rel.iter() {
            model.insert(pred, row).expect("arity fixed during derivation");
        }
    }
    model
}

/// True iff `goal` is in the least model of `rules` over `store`. Unknown
/// goal predicates are simply false under the closed-world assumption.
pub fn entails(rules: &[Rule], store: &FactStore, goal: &Fact) -> bool {
    if store.contains(goal) {
        return true;
    }
    if rules.is_empty() {
        return false;
    }
    derive(rules, store).contains(goal)
}

/// True iff some assignment of constants to variables makes every body atom
/// a fact of `store` and satisfies all disequalities. Atoms over unknown
/// predicates make the body unsatisfiable.
pub fn sat_body(body: &[Atom], diseqs: &[(VarId, VarId)], store: &FactStore) -> bool {
    find_body_witness(body, diseqs, store).is_some()
}

/// Like [`sat_body`] but returns the witness assignment, sorted by
/// variable index. Search stops at the first witness.
pub fn find_body_witness(
    body: &[Atom],
    diseqs: &[(VarId, VarId)],
    store: &FactStore,
) -> Option<Vec<(VarId, Symbol)>> {
    let derived = Derived::default();
    let plan = plan_order(body, None, store, &derived);
    let nvars = body
        .iter()
        .flat_map(|a| a.vars())
        .chain(diseqs.iter().flat_map(|&(a, b)| [a, b]))
        .map(|v| v as usize + 1)
        .max()
        .unwrap_or(0);
    let mut bindings: Vec<Option<Symbol>> = vec![None; nvars];
    let mut witness = None;
    join(
        body,
        diseqs,
        &plan,
        0,
        None,
        store,
        &derived,
        &mut bindings,
        &mut |bindings| {
            witness = Some(
                bindings
                    .iter()
                    .enumerate()
                    .filter_map(|(v, s)| s.map(|s| (v as VarId, s)))
                    .collect(),
            );
            true
        },
    );
    witness
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse::{parse_facts, parse_program};

    fn intro_store() -> FactStore {
        parse_facts(
            "head(ijcai,i).\nhead(ecai,e).\nhead(cai,c).\n\
             tail(ijcai,jcai).\ntail(ecai,cai).\ntail(jcai,cai).\ntail(ai,i).\ntail(cai,ai).\n\
             even(2).\neven(4).\nodd(1).\nodd(3).\n",
        )
        .unwrap()
    }

    #[test]
    fn ground_model_transitive_path() {
        let mut store = parse_facts("edge(1,2).\nedge(2,3).").unwrap();
        let rules = parse_program(
            "path(A,B) :- edge(A,B).\npath(A,C) :- edge(A,B), path(B,C).",
            &mut store,
        )
        .unwrap();
        let model = ground_model(&rules, &store);
        let path = model.symbols().lookup("path").unwrap();
        let rel = model.relation(path).unwrap();
        let t = |s: &str| model.symbols().lookup(s).unwrap();
        assert_eq!(rel.len(), 3);
        assert!(rel.contains(&[t("1"), t("2")]));
        assert!(rel.contains(&[t("2"), t("3")]));
        assert!(rel.contains(&[t("1"), t("3")]));
    }

    #[test]
    fn ground_model_no_rules_is_store() {
        let store = intro_store();
        let model = ground_model(&[], &store);
        assert!(model.same_facts(&store));
    }

    #[test]
    fn ground_model_unproductive_self_recursion() {
        let mut store = parse_facts("p(a).").unwrap();
        let rules = parse_program("f(A) :- f(A).", &mut store).unwrap();
        let model = ground_model(&rules, &store);
        assert!(model.same_facts(&store));
    }

    #[test]
    fn ground_model_rule_order_irrelevant() {
        let mut store = parse_facts("edge(1,2).\nedge(2,3).\nedge(3,4).").unwrap();
        let rules = parse_program(
            "path(A,B) :- edge(A,B).\npath(A,C) :- edge(A,B), path(B,C).",
            &mut store,
        )
        .unwrap();
        let fwd = ground_model(&rules, &store);
        let rev: Vec<_> = rules.iter().rev().cloned().collect();
        let bwd = ground_model(&rev, &store);
        assert!(fwd.same_facts(&bwd));
    }

    #[test]
    fn entails_facts_and_derived() {
        let mut store = parse_facts("length(l1,1).\none(1).").unwrap();
        let rules = parse_program("f(A) :- length(A,B), one(B).", &mut store).unwrap();
        let l1 = store.symbols().lookup("l1").unwrap();
        let one = store.symbols().lookup("one").unwrap();
        let n1 = store.symbols().lookup("1").unwrap();
        let f = store.symbols().lookup("f").unwrap();
        // A stored fact entails itself even with no rules.
        assert!(entails(&[], &store, &Fact::new(one, vec![n1])));
        assert!(entails(&rules, &store, &Fact::new(f, vec![l1])));
        // Unknown predicate: false, not an error.
        let mut s2 = store.clone();
        let ghost = s2.intern("ghost");
        assert!(!entails(&rules, &store, &Fact::new(ghost, vec![l1])));
    }

    #[test]
    fn sat_body_intro_examples() {
        let store = intro_store();
        let t = |s: &str| store.symbols().lookup(s).unwrap();
        let v = |i: u32| Term::Var(i);
        // tail(A,A) has no witness.
        assert!(!sat_body(&[Atom::new(t("tail"), vec![v(0), v(0)])], &[], &store));
        // odd(A), even(A) has no witness.
        assert!(!sat_body(
            &[Atom::new(t("odd"), vec![v(0)]), Atom::new(t("even"), vec![v(0)])],
            &[],
            &store
        ));
        // head(A,B) has a witness.
        let w = find_body_witness(&[Atom::new(t("head"), vec![v(0), v(1)])], &[], &store);
        let w = w.unwrap();
        assert_eq!(w.len(), 2);
        // The witness is a real fact.
        let rel = store.relation(t("head")).unwrap();
        assert!(rel.contains(&[w[0].1, w[1].1]));
    }

    #[test]
    fn sat_body_respects_diseqs() {
        let store = parse_facts("num(1).\nnum(2).").unwrap();
        let num = store.symbols().lookup("num").unwrap();
        let v = |i: u32| Term::Var(i);
        let body = [Atom::new(num, vec![v(0)]), Atom::new(num, vec![v(1)])];
        assert!(sat_body(&body, &[(0, 1)], &store));
        let single = parse_facts("num(1).").unwrap();
        let num1 = single.symbols().lookup("num").unwrap();
        let body1 = [Atom::new(num1, vec![v(0)]), Atom::new(num1, vec![v(1)])];
        assert!(sat_body(&body1, &[], &single));
        assert!(!sat_body(&body1, &[(0, 1)], &single));
    }

    #[test]
    fn sat_body_unknown_predicate_false() {
        let mut store = parse_facts("p(a).").unwrap();
        let ghost = store.intern("ghost");
        assert!(!sat_body(&[Atom::new(ghost, vec![Term::Var(0)])], &[], &store));
    }

    #[test]
    fn sat_body_with_constants() {
        let store = parse_facts("edge(a,b).\nedge(b,c).").unwrap();
        let t = |s: &str| store.symbols().lookup(s).unwrap();
        let body = [Atom::new(t("edge"), vec![Term::Const(t("a")), Term::Var(0)])];
        let w = find_body_witness(&body, &[], &store).unwrap();
        assert_eq!(w, vec![(0, t("b"))]);
        let none = [Atom::new(t("edge"), vec![Term::Const(t("c")), Term::Var(0)])];
        assert!(!sat_body(&none, &[], &store));
    }

    #[test]
    fn entails_monotone_under_fact_addition() {
        let mut store = parse_facts("edge(1,2).").unwrap();
        let rules = parse_program("path(A,B) :- edge(A,B).", &mut store).unwrap();
        let path = store.symbols().lookup("path").unwrap();
        let n1 = store.symbols().lookup("1").unwrap();
        let n2 = store.symbols().lookup("2").unwrap();
        let goal = Fact::new(path, vec![n1, n2]);
        assert!(entails(&rules, &store, &goal));
        let mut bigger = store.clone();
        let n3 = bigger.intern("3");
        let edge = bigger.symbols().lookup("edge").unwrap();
        bigger.insert(edge, &[n2, n3]).unwrap();
        assert!(entails(&rules, &bigger, &goal));
    }
}
