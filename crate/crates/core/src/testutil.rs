//! Test support: shared fixtures, seeded random instance generators, and
//! slow reference oracles kept deliberately independent of the production
//! evaluation paths they are used to check.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{violates, ConstraintSet};
use crate::kb::{parse_facts, Atom, Fact, FactStore, Rule, Term, VarId};
use crate::learner::{Bias, Hypothesis, Task};

/// The worked introductory knowledge base: conference-acronym string
/// structure plus parity facts. Twelve facts.
pub const INTRO_BK: &str = "\
head(ijcai,i).
head(ecai,e).
head(cai,c).
tail(ijcai,jcai).
tail(ecai,cai).
tail(jcai,cai).
tail(ai,i).
tail(cai,ai).
even(2).
even(4).
odd(1).
odd(3).
";

pub fn intro_store() -> FactStore {
    parse_facts(INTRO_BK).expect("fixture parses")
}

/// Seeded random ground store: up to `max_rels` relations of arity 1..=3,
/// up to `max_facts` facts over a small constant pool. Deterministic in the
/// seed.
pub fn random_store(seed: u64, max_rels: usize, max_facts: usize) -> FactStore {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = FactStore::new();
    let nrels = rng.random_range(1..=max_rels);
    let rels: Vec<_> = (0..nrels)
        .map(|i| {
            let pred = store.intern(&format!("p{i}"));
            let arity = rng.random_range(1..=3);
            (pred, arity)
        })
        .collect();
    let nconsts = rng.random_range(2..=12);
    let consts: Vec<_> = (0..nconsts).map(|i| store.intern(&format!("c{i}"))).collect();
    let nfacts = rng.random_range(0..=max_facts);
    for _ in 0..nfacts {
        let (pred, arity) = rels[rng.random_range(0..rels.len())];
        let args: Vec<_> = (0..arity)
            .map(|_| consts[rng.random_range(0..consts.len())])
            .collect();
        store.insert(pred, &args).expect("consistent arity by construction");
    }
    store
}

/// Seeded random Datalog program: a base store plus derivation rules, some
/// possibly recursive. Rules are built to satisfy the `Rule` invariants by
/// construction and retried otherwise.
pub fn random_program(seed: u64) -> (FactStore, Vec<Rule>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = random_store(seed.wrapping_mul(31).wrapping_add(7), 4, 50);
    let base: Vec<_> = store
        .relations_by_name()
        .iter()
        .map(|r| (r.name(), r.arity()))
        .collect();
    if base.is_empty() {
        return (store, Vec::new());
    }
    let idb: Vec<_> = (0..rng.random_range(1..=2usize))
        .map(|i| {
            let pred = store.intern(&format!("q{i}"));
            let arity = rng.random_range(1..=2);
            (pred, arity)
        })
        .collect();
    let nrules = rng.random_range(1..=6);
    let mut rules = Vec::new();
    let mut guard = 0;
    while rules.len() < nrules && guard < 200 {
        guard += 1;
        let (hp, ha) = idb[rng.random_range(0..idb.len())];
        let nbody = rng.random_range(1..=3usize);
        let nvars = rng.random_range(1..=4) as VarId;
        let mut body = Vec::new();
        for _ in 0..nbody {
            // Mix base and derived predicates so recursion can appear.
            let (bp, ba) = if rng.random_bool(0.8) {
                base[rng.random_range(0..base.len())]
            } else {
                idb[rng.random_range(0..idb.len())]
            };
            let args: Vec<_> = (0..ba)
                .map(|_| Term::Var(rng.random_range(0..nvars)))
                .collect();
            body.push(crate::kb::Atom::new(bp, args));
        }
        let head_args: Vec<_> = (0..ha)
            .map(|_| Term::Var(rng.random_range(0..nvars)))
            .collect();
        let head = crate::kb::Atom::new(hp, head_args);
        if let Ok(rule) = Rule::new(head, body, Vec::new()) {
            rules.push(rule);
        }
    }
    (store, rules)
}

/// Naive bottom-up fixpoint: every round re-derives every rule over the
/// whole current fact set with a plain nested-loop join, until nothing new
/// appears. Slow on purpose; the reference for the semi-naive engine.
pub fn naive_ground_model(rules: &[Rule], store: &FactStore) -> FactStore {
    let mut facts: HashMap<crate::kb::Symbol, Vec<Vec<crate::kb::Symbol>>> = HashMap::new();
    for rel in store.relations_by_name() {
        facts.insert(rel.name(), rel.iter().map(|t| t.to_vec()).collect());
    }
    loop {
        let mut new_facts = Vec::new();
        for rule in rules {
            let mut subst: HashMap<VarId, crate::kb::Symbol> = HashMap::new();
            naive_match(rule, 0, &facts, &mut subst, &mut new_facts);
        }
        let mut grew = false;
        for (pred, tuple) in new_facts {
            let list = facts.entry(pred).or_default();
            if !list.contains(&tuple) {
                list.push(tuple);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let mut model = store.clone();
    for (pred, tuples) in facts {
        for t in tuples {
            model.insert(pred, &t).expect("arities consistent");
        }
    }
    model
}

fn naive_match(
    rule: &Rule,
    depth: usize,
    facts: &HashMap<crate::kb::Symbol, Vec<Vec<crate::kb::Symbol>>>,
    subst: &mut HashMap<VarId, crate::kb::Symbol>,
    out: &mut Vec<(crate::kb::Symbol, Vec<crate::kb::Symbol>)>,
) {
    if depth == rule.body().len() {
        let ok = rule
            .diseqs()
            .iter()
            .all(|&(x, y)| subst.get(&x) != subst.get(&y));
        if ok {
            let args = rule
                .head()
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => *subst.get(v).expect("head var bound"),
                    Term::Const(c) => *c,
                })
                .collect();
            out.push((rule.head().pred, args));
        }
        return;
    }
    let atom = &rule.body()[depth];
    let Some(tuples) = facts.get(&atom.pred) else { return };
    for tuple in tuples {
        if tuple.len() != atom.args.len() {
            continue;
        }
        let mut added: Vec<VarId> = Vec::new();
        let mut ok = true;
        for (term, &val) in atom.args.iter().zip(tuple) {
            match term {
                Term::Const(c) => {
                    if *c != val {
                        ok = false;
                        break;
                    }
                }
                Term::Var(v) => match subst.get(v) {
                    Some(&b) => {
                        if b != val {
                            ok = false;
                            break;
                        }
                    }
                    None => {
                        subst.insert(*v, val);
                        added.push(*v);
                    }
                },
            }
        }
        if ok {
            naive_match(rule, depth + 1, facts, subst, out);
        }
        for v in added {
            subst.remove(&v);
        }
    }
}

/// All facts entailed for a goal predicate, via the naive oracle.
pub fn naive_entailed(rules: &[Rule], store: &FactStore, goal: &Fact) -> bool {
    let model = naive_ground_model(rules, store);
    model.contains(goal)
}

/// Seeded random learning task with a hidden target rule. BK relations have
/// arity at most 2 and the target uses at most 3 variables and 2 body
/// literals, so the fixed bias bounds (max_vars 3, max_body 2, max_rules 2)
/// always admit it. Positives are sampled from the target's derived head
/// facts, negatives from head tuples outside the model. `None` when the
/// sampled target derives nothing.
pub fn random_task(seed: u64) -> Option<Task> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut store = FactStore::new();
    let nrels = rng.random_range(1..=3);
    let rels: Vec<(crate::kb::Symbol, usize)> = (0..nrels)
        .map(|i| (store.intern(&format!("p{i}")), rng.random_range(1..=2)))
        .collect();
    let nconsts = rng.random_range(3..=8);
    let consts: Vec<_> = (0..nconsts).map(|i| store.intern(&format!("c{i}"))).collect();
    for _ in 0..rng.random_range(4..=20) {
        let (pred, arity) = rels[rng.random_range(0..rels.len())];
        let args: Vec<_> = (0..arity)
            .map(|_| consts[rng.random_range(0..consts.len())])
            .collect();
        store.insert(pred, &args).expect("consistent arity by construction");
    }

    // Target: first body atom over fresh variables, optional second atom
    // forced to reuse one of them (keeps the body connected), head drawn
    // from the body variables.
    let (p1, a1) = rels[rng.random_range(0..rels.len())];
    let mut body = vec![Atom::new(p1, (0..a1).map(|v| Term::Var(v as VarId)).collect())];
    let mut nvars = a1;
    if rng.random_bool(0.6) {
        let (p2, a2) = rels[rng.random_range(0..rels.len())];
        let reuse = rng.random_range(0..a2);
        let args: Vec<Term> = (0..a2)
            .map(|i| {
                if i != reuse && nvars < 3 && rng.random_bool(0.3) {
                    nvars += 1;
                    Term::Var((nvars - 1) as VarId)
                } else {
                    Term::Var(rng.random_range(0..a1) as VarId)
                }
            })
            .collect();
        body.push(Atom::new(p2, args));
    }
    let head_pred = store.intern("f");
    let head_arity = rng.random_range(1..=2).min(nvars);
    let head_args: Vec<Term> = (0..head_arity)
        .map(|_| Term::Var(rng.random_range(0..nvars) as VarId))
        .collect();
    let target = Rule::new(Atom::new(head_pred, head_args), body, Vec::new())
        .expect("target is safe and connected by construction");

    let model = naive_ground_model(std::slice::from_ref(&target), &store);
    let derived: Vec<Vec<crate::kb::Symbol>> = model
        .relation(head_pred)
        .map(|rel| rel.iter().map(|t| t.to_vec()).collect())
        .unwrap_or_default();
    if derived.is_empty() {
        return None;
    }
    let npos = rng.random_range(1..=derived.len().min(3));
    let pos: Vec<Fact> = derived[..npos]
        .iter()
        .map(|t| Fact::new(head_pred, t.clone()))
        .collect();
    let mut neg = Vec::new();
    for _ in 0..20 {
        let args: Vec<_> = (0..head_arity)
            .map(|_| consts[rng.random_range(0..consts.len())])
            .collect();
        let fact = Fact::new(head_pred, args);
        if !model.contains(&fact) && !neg.contains(&fact) {
            neg.push(fact);
            if neg.len() == 3 {
                break;
            }
        }
    }

    let mut bias = Bias::new((head_pred, head_arity), rels);
    bias.max_vars = 3;
    bias.max_body = 2;
    bias.max_rules = 2;
    bias.max_literals = bias.max_rules * (1 + bias.max_body);
    Some(Task::new(store, &[], pos, neg, bias).expect("task construction is valid"))
}

/// Brute-force rule-space oracle: builds every head and body combination
/// over the variable universe, canonicalizes through `Rule::new`, filters
/// with whole-rule `violates` checks, and keeps each survivor once.
/// Exponential in the bias bounds; small biases only.
pub fn oracle_enumerate(bias: &Bias, discovered: &ConstraintSet, size: usize) -> Vec<Rule> {
    let Some(body_len) = size.checked_sub(1) else { return Vec::new() };
    if body_len == 0 || body_len > bias.max_body {
        return Vec::new();
    }
    let mut preds = bias.body_preds.clone();
    if bias.allow_recursion && !preds.contains(&bias.head) {
        preds.push(bias.head);
    }
    let mut universe = Vec::new();
    for &(pred, arity) in &preds {
        for args in all_tuples(arity, bias.max_vars) {
            universe.push(Atom::new(pred, args));
        }
    }
    universe.sort();
    universe.dedup();
    // Any rule drawn from vars 0..max_vars has at most max_vars distinct
    // variables, and every canonical rule within that bound is reachable
    // because canonical numbering is contiguous from zero.
    let mut found = BTreeSet::new();
    for head_args in all_tuples(bias.head.1, bias.max_vars) {
        let head = Atom::new(bias.head.0, head_args);
        let mut combo = Vec::with_capacity(body_len);
        pick_atoms(&universe, 0, body_len, &mut combo, &mut |body| {
            if let Ok(rule) = Rule::new(head.clone(), body.to_vec(), Vec::new()) {
                if rule.body().len() == body_len
                    && !discovered.iter().any(|c| violates(&rule, c))
                {
                    found.insert(rule);
                }
            }
        });
    }
    found.into_iter().collect()
}

fn all_tuples(arity: usize, max_vars: usize) -> Vec<Vec<Term>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(arity);
    fn step(arity: usize, max_vars: usize, current: &mut Vec<Term>, out: &mut Vec<Vec<Term>>) {
        if current.len() == arity {
            out.push(current.clone());
            return;
        }
        for v in 0..max_vars {
            current.push(Term::Var(v as VarId));
            step(arity, max_vars, current, out);
            current.pop();
        }
    }
    step(arity, max_vars, &mut current, &mut out);
    out
}

fn pick_atoms(
    universe: &[Atom],
    from: usize,
    want: usize,
    combo: &mut Vec<Atom>,
    emit: &mut impl FnMut(&[Atom]),
) {
    if want == 0 {
        emit(combo);
        return;
    }
    for i in from..universe.len() {
        combo.push(universe[i].clone());
        pick_atoms(universe, i + 1, want - 1, combo, emit);
        combo.pop();
    }
}

/// Brute-force optimal learner: materializes every hypothesis in the bias
/// space, sorts by (cost, canonical order), and tests each with the naive
/// evaluator until one is complete and consistent. No discovered
/// constraints, no learned pruning. Exponential; desk tasks only.
pub fn oracle_learn(task: &Task) -> Option<Hypothesis> {
    if task.pos().is_empty() {
        return Some(Hypothesis::empty());
    }
    let bias = task.bias();
    let none = ConstraintSet::new();
    let mut pool = Vec::new();
    for size in 2..=(1 + bias.max_body) {
        pool.extend(oracle_enumerate(bias, &none, size));
    }
    pool.sort();
    let mut candidates = Vec::new();
    let mut picked = Vec::new();
    collect_subsets(&pool, 0, bias.max_rules, &mut picked, &mut candidates);
    candidates.retain(|rules| {
        rules.iter().map(Rule::cost).sum::<usize>() <= bias.literal_bound()
    });
    candidates.sort_by_key(|rules| {
        (rules.iter().map(Rule::cost).sum::<usize>(), rules.clone())
    });
    for rules in &candidates {
        // Recursion without a base case derives nothing; such programs are
        // outside the hypothesis space, matching the learner.
        if rules.iter().all(|r| r.is_recursive()) {
            continue;
        }
        let model = naive_ground_model(rules, task.bk());
        if task.pos().iter().all(|e| model.contains(e))
            && task.neg().iter().all(|e| !model.contains(e))
        {
            return Some(Hypothesis::new(rules.clone()));
        }
    }
    None
}

fn collect_subsets(
    pool: &[Rule],
    from: usize,
    slots: usize,
    picked: &mut Vec<Rule>,
    out: &mut Vec<Vec<Rule>>,
) {
    if !picked.is_empty() {
        out.push(picked.clone());
    }
    if slots == 0 {
        return;
    }
    for i in from..pool.len() {
        picked.push(pool[i].clone());
        collect_subsets(pool, i + 1, slots - 1, picked, out);
        picked.pop();
    }
}
