//! Generate-test-constrain search for minimum-cost hypotheses.
//!
//! The learner enumerates candidate rules by literal count, assembles them
//! into hypotheses by iterative deepening on total literal count, tests each
//! hypothesis by bottom-up evaluation against the background knowledge, and
//! records anchors from failures so later candidates that provably share the
//! failure are skipped without testing. Discovered constraints (from mined
//! properties) prune rules before they ever enter the pool.
//!
//! Cost is the total literal count of a hypothesis, heads included. The
//! search returns the first complete and consistent hypothesis found, which
//! by construction is minimum-cost and least in canonical hypothesis order
//! among the minimum-cost solutions.

mod bias;
mod enumerate;
mod examples;

pub use bias::{
    parse_bias, Bias, BiasError, DEFAULT_MAX_BODY, DEFAULT_MAX_RULES, DEFAULT_MAX_VARS,
};
pub use enumerate::enumerate_rules;
pub use examples::{parse_examples, ExampleError};

use std::collections::HashSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::constraints::ConstraintSet;
use crate::kb::{derive, ground_model, Fact, FactStore, Rule, SymbolTable};

/// A learning problem: ground background knowledge, labelled examples, and
/// the bias bounding the hypothesis space.
#[derive(Debug, Clone)]
pub struct Task {
    bk: FactStore,
    pos: Vec<Fact>,
    neg: Vec<Fact>,
    bias: Bias,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaskError {
    #[error("example {fact} is both positive and negative")]
    Overlap { fact: String },
    #[error("example {fact} does not match the declared head predicate")]
    ExampleShape { fact: String },
    #[error(transparent)]
    Bias(#[from] BiasError),
}

impl Task {
    /// Background rules are grounded up-front so hypothesis testing only
    /// ever evaluates the candidate rules themselves.
    pub fn new(
        bk: FactStore,
        bk_rules: &[Rule],
        pos: Vec<Fact>,
        neg: Vec<Fact>,
        bias: Bias,
    ) -> Result<Task, TaskError> {
        bias.validate()?;
        let bk = if bk_rules.is_empty() { bk } else { ground_model(bk_rules, &bk) };
        let pos = dedup_facts(pos);
        let neg = dedup_facts(neg);
        for fact in pos.iter().chain(&neg) {
            if fact.pred != bias.head.0 || fact.args.len() != bias.head.1 {
                return Err(TaskError::ExampleShape {
                    fact: fact.display(bk.symbols()).to_string(),
                });
            }
        }
        let negset: HashSet<&Fact> = neg.iter().collect();
        if let Some(fact) = pos.iter().find(|f| negset.contains(f)) {
            return Err(TaskError::Overlap { fact: fact.display(bk.symbols()).to_string() });
        }
        drop(negset);
        Ok(Task { bk, pos, neg, bias })
    }

    pub fn bk(&self) -> &FactStore {
        &self.bk
    }

    pub fn pos(&self) -> &[Fact] {
        &self.pos
    }

    pub fn neg(&self) -> &[Fact] {
        &self.neg
    }

    pub fn bias(&self) -> &Bias {
        &self.bias
    }
}

fn dedup_facts(facts: Vec<Fact>) -> Vec<Fact> {
    let mut seen = HashSet::new();
    facts.into_iter().filter(|f| seen.insert(f.clone())).collect()
}

/// A set of canonical rules. Construction sorts and deduplicates, so two
/// hypotheses with the same rules compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hypothesis {
    rules: Vec<Rule>,
}

impl Hypothesis {
    pub fn new(mut rules: Vec<Rule>) -> Self {
        rules.sort();
        rules.dedup();
        Hypothesis { rules }
    }

    pub fn empty() -> Self {
        Hypothesis { rules: Vec::new() }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Total literal count over all rules, heads included.
    pub fn cost(&self) -> usize {
        self.rules.iter().map(Rule::cost).sum()
    }

    pub fn display(&self, syms: &SymbolTable) -> String {
        let lines: Vec<String> = self.rules.iter().map(|r| r.display(syms).to_string()).collect();
        lines.join("\n")
    }
}

/// Per-example entailment under `BK ∪ h`, plus the two aggregate flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub pos_entailed: Vec<bool>,
    pub neg_entailed: Vec<bool>,
    pub complete: bool,
    pub consistent: bool,
}

impl CoverageReport {
    pub fn pos_count(&self) -> usize {
        self.pos_entailed.iter().filter(|&&b| b).count()
    }
}

/// Evaluates `h` once over the task's background knowledge and checks every
/// example against the resulting model.
pub fn test_hypothesis(h: &Hypothesis, task: &Task) -> CoverageReport {
    let derived = derive(h.rules(), &task.bk);
    let entailed = |f: &Fact| task.bk.contains(f) || derived.contains(f);
    let pos_entailed: Vec<bool> = task.pos.iter().map(&entailed).collect();
    let neg_entailed: Vec<bool> = task.neg.iter().map(&entailed).collect();
    CoverageReport {
        complete: pos_entailed.iter().all(|&b| b),
        consistent: !neg_entailed.iter().any(|&b| b),
        pos_entailed,
        neg_entailed,
    }
}

/// An anchor recorded from a failed hypothesis. Generalisation anchors come
/// from inconsistent hypotheses and exclude every superset; specialisation
/// anchors come from incomplete hypotheses and exclude hypotheses whose
/// rules all body-extend an anchor rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LearnedConstraint {
    Generalisation { anchor: Vec<Rule> },
    Specialisation { anchor: Vec<Rule> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SkipKind {
    Generalisation,
    Specialisation,
}

/// Anchors accumulated during a search.
#[derive(Debug, Clone, Default)]
pub struct LearnedConstraints {
    items: Vec<LearnedConstraint>,
}

impl LearnedConstraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn items(&self) -> &[LearnedConstraint] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn push(&mut self, constraint: LearnedConstraint) {
        let (LearnedConstraint::Generalisation { anchor }
        | LearnedConstraint::Specialisation { anchor }) = &constraint;
        debug_assert!(!anchor.is_empty(), "anchors come from nonempty hypotheses");
        self.items.push(constraint);
    }

    /// True iff some anchor excludes the rule set. `rules` must be sorted.
    pub fn skips(&self, rules: &[Rule]) -> bool {
        self.skip_reason(rules).is_some()
    }

    fn skip_reason(&self, rules: &[Rule]) -> Option<SkipKind> {
        for item in &self.items {
            match item {
                LearnedConstraint::Generalisation { anchor } => {
                    // A superset derives a superset of the model, so it
                    // still entails the anchor's covered negative.
                    if contains_sorted(rules, anchor) {
                        return Some(SkipKind::Generalisation);
                    }
                }
                LearnedConstraint::Specialisation { anchor } => {
                    // If every rule body-extends an anchor rule, the model
                    // is contained in the anchor's, which missed a positive.
                    if !rules.is_empty()
                        && rules.iter().all(|r| anchor.iter().any(|a| r.body_extends(a)))
                    {
                        return Some(SkipKind::Specialisation);
                    }
                }
            }
        }
        None
    }
}

/// Both `sup` and `sub` sorted ascending; true iff `sub ⊆ sup`.
fn contains_sorted(sup: &[Rule], sub: &[Rule]) -> bool {
    let mut it = sup.iter();
    'outer: for want in sub {
        for have in it.by_ref() {
            match have.cmp(want) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Folds a coverage report into the anchor set: incomplete hypotheses
/// anchor a specialisation constraint, inconsistent ones a generalisation
/// constraint; a hypothesis failing both ways records both.
pub fn constrain_update(state: &mut LearnedConstraints, h: &Hypothesis, report: &CoverageReport) {
    if h.rules().is_empty() {
        return;
    }
    if !report.complete {
        state.push(LearnedConstraint::Specialisation { anchor: h.rules().to_vec() });
    }
    if !report.consistent {
        state.push(LearnedConstraint::Generalisation { anchor: h.rules().to_vec() });
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Rules admitted to the candidate pool across all sizes reached.
    pub rules_enumerated: usize,
    /// Hypotheses actually evaluated against the examples.
    pub programs_tested: usize,
}

/// Wall-clock time spent in each search phase.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimes {
    /// Enumerating candidate rules into the pool.
    pub generate: Duration,
    /// Evaluating hypotheses against the examples.
    pub test: Duration,
    /// Checking learned anchors and recording new ones.
    pub constrain: Duration,
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub solution: Option<Hypothesis>,
    pub stats: SearchStats,
    pub times: PhaseTimes,
}

/// Candidates rejected by learned anchors, recorded for soundness replay
/// in tests. Grows with the search; only use on small tasks.
#[derive(Debug, Clone, Default)]
pub struct SearchTrace {
    pub skipped_generalisation: Vec<Hypothesis>,
    pub skipped_specialisation: Vec<Hypothesis>,
}

/// Searches for a minimum-cost complete and consistent hypothesis.
///
/// Iterative deepening on total literal count `k`: at each level the search
/// walks every set of pool rules whose costs sum to `k`, in lexicographic
/// canonical order, so the first solution is optimal and deterministic.
/// `None` means the bias bounds were exhausted without a solution.
pub fn learn(task: &Task, discovered: &ConstraintSet) -> LearnOutcome {
    Search::new(task, discovered, None).run()
}

/// [`learn`] with a record of every anchor-skipped candidate.
pub fn learn_traced(task: &Task, discovered: &ConstraintSet) -> (LearnOutcome, SearchTrace) {
    let mut trace = SearchTrace::default();
    let outcome = Search::new(task, discovered, Some(&mut trace)).run();
    (outcome, trace)
}

struct PoolEntry {
    rule: Rule,
    cost: usize,
    alive: bool,
}

struct Search<'a> {
    task: &'a Task,
    working: ConstraintSet,
    pool: Vec<PoolEntry>,
    learned: LearnedConstraints,
    dead: Vec<Rule>,
    stats: SearchStats,
    times: PhaseTimes,
    trace: Option<&'a mut SearchTrace>,
}

impl<'a> Search<'a> {
    fn new(task: &'a Task, discovered: &ConstraintSet, trace: Option<&'a mut SearchTrace>) -> Self {
        // Under recursion the head predicate's body literals range over the
        // derived model, not just the background facts any property was
        // mined from, so constraints on the head predicate are dropped.
        let working = if task.bias.allow_recursion {
            let mut kept = ConstraintSet::new();
            for c in discovered.iter() {
                if !c.preds().contains(&task.bias.head.0) {
                    kept.push(c.clone());
                }
            }
            kept
        } else {
            discovered.clone()
        };
        Search {
            task,
            working,
            pool: Vec::new(),
            learned: LearnedConstraints::new(),
            dead: Vec::new(),
            stats: SearchStats::default(),
            times: PhaseTimes::default(),
            trace,
        }
    }

    fn run(mut self) -> LearnOutcome {
        if self.task.pos.is_empty() {
            // The empty hypothesis is vacuously complete and consistent.
            return LearnOutcome {
                solution: Some(Hypothesis::empty()),
                stats: self.stats,
                times: self.times,
            };
        }
        let max_rule_size = 1 + self.task.bias.max_body;
        let mut next_size = 2usize;
        let mut solution = None;
        'levels: for k in 2..=self.task.bias.literal_bound() {
            while next_size <= max_rule_size.min(k) {
                self.grow_pool(next_size);
                next_size += 1;
            }
            let mut picked = Vec::new();
            if let Some(h) = self.dfs(0, k, self.task.bias.max_rules, &mut picked) {
                solution = Some(h);
                break 'levels;
            }
        }
        LearnOutcome { solution, stats: self.stats, times: self.times }
    }

    fn grow_pool(&mut self, size: usize) {
        let started = Instant::now();
        let batch = enumerate_rules(&self.task.bias, &self.working, size);
        self.stats.rules_enumerated += batch.len();
        for rule in batch {
            let alive = !self.dead.iter().any(|a| rule.body_extends(a));
            self.pool.push(PoolEntry { cost: rule.cost(), rule, alive });
        }
        // Pool stays sorted by rule so index-ascending subsets enumerate
        // hypotheses in canonical order within each cost level.
        self.pool.sort_by(|x, y| x.rule.cmp(&y.rule));
        self.times.generate += started.elapsed();
    }

    fn dfs(
        &mut self,
        start: usize,
        remaining: usize,
        slots: usize,
        picked: &mut Vec<usize>,
    ) -> Option<Hypothesis> {
        for i in start..self.pool.len() {
            if !self.pool[i].alive {
                continue;
            }
            let cost = self.pool[i].cost;
            if cost == remaining {
                picked.push(i);
                let found = self.consider(picked);
                picked.pop();
                if found.is_some() {
                    return found;
                }
            } else if cost < remaining && slots >= 2 && remaining - cost >= 2 {
                picked.push(i);
                let found = self.dfs(i + 1, remaining - cost, slots - 1, picked);
                picked.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }

    fn consider(&mut self, picked: &[usize]) -> Option<Hypothesis> {
        let rules: Vec<Rule> = picked.iter().map(|&i| self.pool[i].rule.clone()).collect();
        // Base-case requirement: recursion without a non-recursive rule
        // never derives anything, so such programs are outside the space.
        if rules.iter().any(|r| r.is_recursive()) && rules.iter().all(|r| r.is_recursive()) {
            return None;
        }
        let checked = Instant::now();
        let skip = self.learned.skip_reason(&rules);
        self.times.constrain += checked.elapsed();
        if let Some(kind) = skip {
            if let Some(t) = self.trace.as_deref_mut() {
                let h = Hypothesis::new(rules);
                match kind {
                    SkipKind::Generalisation => t.skipped_generalisation.push(h),
                    SkipKind::Specialisation => t.skipped_specialisation.push(h),
                }
            }
            return None;
        }
        let h = Hypothesis::new(rules);
        let tested = Instant::now();
        let report = test_hypothesis(&h, self.task);
        self.times.test += tested.elapsed();
        self.stats.programs_tested += 1;
        if report.complete && report.consistent {
            return Some(h);
        }
        let recorded = Instant::now();
        constrain_update(&mut self.learned, &h, &report);
        // A rule that alone covers no positive example is dead weight in a
        // non-recursive program: dropping it from any solution leaves a
        // cheaper solution. Retire it and every body-extension of it.
        if !self.task.bias.allow_recursion && h.rules().len() == 1 && report.pos_count() == 0 {
            let anchor = h.rules()[0].clone();
            for entry in &mut self.pool {
                if entry.alive && entry.rule.body_extends(&anchor) {
                    entry.alive = false;
                }
            }
            self.dead.push(anchor);
        }
        self.times.constrain += recorded.elapsed();
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_facts;
    use crate::miner::{mine_properties, MinerConfig};

    fn toy_task() -> Task {
        let mut store = parse_facts("length(l1,1).\nlength(l2,2).\none(1).\ntwo(2).").unwrap();
        let bias_text = "head_pred(f,1).\nbody_pred(length,2).\nbody_pred(one,1).\nbody_pred(two,1).\nmax_vars(3).\nmax_body(3).\nmax_rules(2).";
        let bias = parse_bias(bias_text, &mut store).unwrap();
        let (pos, neg) = parse_examples("pos(f(l1)).\nneg(f(l2)).", &mut store).unwrap();
        Task::new(store, &[], pos, neg, bias).unwrap()
    }

    fn solve(task: &Task) -> (LearnOutcome, LearnOutcome) {
        let unmined = learn(task, &ConstraintSet::new());
        let config = MinerConfig::all_relations(task.bk());
        let mined = ConstraintSet::compile(&mine_properties(task.bk(), &config));
        (unmined, learn(task, &mined))
    }

    #[test]
    fn toy_task_learns_the_cost_three_program() {
        let task = toy_task();
        let out = learn(&task, &ConstraintSet::new());
        let h = out.solution.expect("solvable");
        assert_eq!(h.cost(), 3);
        assert_eq!(h.display(task.bk().symbols()), "f(A):-length(A,B),one(B).");
        let report = test_hypothesis(&h, &task);
        assert!(report.complete && report.consistent);
        assert_eq!(report.pos_entailed, vec![true]);
        assert_eq!(report.neg_entailed, vec![false]);
    }

    #[test]
    fn mined_constraints_preserve_cost_and_save_tests() {
        let task = toy_task();
        let (unmined, mined) = solve(&task);
        let base = unmined.solution.expect("solvable");
        let pruned = mined.solution.expect("solvable");
        assert_eq!(base.cost(), pruned.cost());
        assert!(mined.stats.rules_enumerated < unmined.stats.rules_enumerated);
        // length is functional and one/two are exclusive, so the unmined
        // run tests candidates the mined run never generates.
        assert!(mined.stats.programs_tested < unmined.stats.programs_tested);
    }

    #[test]
    fn smallest_rule_wins() {
        let mut store = parse_facts("q(a).\nq(b).\nr(c).").unwrap();
        let bias = parse_bias("head_pred(f,1).\nbody_pred(q,1).\nbody_pred(r,1).", &mut store)
            .unwrap();
        let (pos, neg) =
            parse_examples("pos(f(a)).\npos(f(b)).\nneg(f(c)).", &mut store).unwrap();
        let task = Task::new(store, &[], pos, neg, bias).unwrap();
        let out = learn(&task, &ConstraintSet::new());
        let h = out.solution.expect("solvable");
        assert_eq!(h.cost(), 2);
        assert_eq!(h.display(task.bk().symbols()), "f(A):-q(A).");
    }

    #[test]
    fn empty_hypothesis_report() {
        let task = toy_task();
        let report = test_hypothesis(&Hypothesis::empty(), &task);
        assert!(!report.complete, "positives exist, nothing derived");
        assert!(report.consistent);

        let mut store = parse_facts("q(a).").unwrap();
        let bias = parse_bias("head_pred(f,1).\nbody_pred(q,1).", &mut store).unwrap();
        let task = Task::new(store, &[], Vec::new(), Vec::new(), bias).unwrap();
        let out = learn(&task, &ConstraintSet::new());
        assert_eq!(out.solution, Some(Hypothesis::empty()));
        assert_eq!(out.stats.programs_tested, 0);
    }

    #[test]
    fn redundant_rule_changes_nothing_but_cost() {
        let task = toy_task();
        let parse_rule = |text: &str| {
            let mut store = task.bk().clone();
            let rules = crate::kb::parse_program(text, &mut store).unwrap();
            rules.into_iter().next().unwrap()
        };
        let optimum = parse_rule("f(A) :- length(A,B), one(B).");
        let redundant = parse_rule("f(A) :- length(A,B), one(B), two(B).");
        let lean = Hypothesis::new(vec![optimum.clone()]);
        let padded = Hypothesis::new(vec![optimum, redundant]);
        let lean_report = test_hypothesis(&lean, &task);
        let padded_report = test_hypothesis(&padded, &task);
        assert_eq!(lean_report, padded_report);
        assert!(padded.cost() > lean.cost());
    }

    #[test]
    fn overlapping_examples_rejected() {
        let mut store = parse_facts("q(a).").unwrap();
        let bias = parse_bias("head_pred(f,1).\nbody_pred(q,1).", &mut store).unwrap();
        let (pos, neg) = parse_examples("pos(f(a)).\nneg(f(a)).", &mut store).unwrap();
        let err = Task::new(store, &[], pos, neg, bias).unwrap_err();
        assert_eq!(err, TaskError::Overlap { fact: "f(a)".into() });
    }

    #[test]
    fn example_shape_checked_against_head() {
        let mut store = parse_facts("q(a).").unwrap();
        let bias = parse_bias("head_pred(f,1).\nbody_pred(q,1).", &mut store).unwrap();
        let (pos, _) = parse_examples("pos(g(a)).", &mut store).unwrap();
        let err = Task::new(store, &[], pos, Vec::new(), bias).unwrap_err();
        assert!(matches!(err, TaskError::ExampleShape { .. }));
    }

    #[test]
    fn both_anchor_kinds_recorded() {
        let task = toy_task();
        let mut scratch = task.bk().clone();
        // f(A):-length(A,B) covers both examples: complete and inconsistent.
        let rules = crate::kb::parse_program("f(A) :- length(A,B).", &mut scratch).unwrap();
        let h = Hypothesis::new(rules);
        let report = test_hypothesis(&h, &task);
        assert!(report.complete && !report.consistent);
        let mut state = LearnedConstraints::new();
        constrain_update(&mut state, &h, &report);
        assert_eq!(state.len(), 1);
        assert!(matches!(state.items()[0], LearnedConstraint::Generalisation { .. }));

        // f(A):-two(A) covers nothing: incomplete and consistent.
        let rules = crate::kb::parse_program("f(A) :- two(A).", &mut scratch).unwrap();
        let h2 = Hypothesis::new(rules);
        let report2 = test_hypothesis(&h2, &task);
        assert!(!report2.complete && report2.consistent);
        constrain_update(&mut state, &h2, &report2);
        assert_eq!(state.len(), 2);

        // A hypothesis failing both ways records both anchors.
        let mut fresh = LearnedConstraints::new();
        let fail_both = CoverageReport {
            pos_entailed: vec![false],
            neg_entailed: vec![true],
            complete: false,
            consistent: false,
        };
        constrain_update(&mut fresh, &h, &fail_both);
        assert_eq!(fresh.len(), 2);
    }

    #[test]
    fn anchors_skip_supersets_and_extensions() {
        let task = toy_task();
        let parse = |text: &str| {
            let mut scratch = task.bk().clone();
            crate::kb::parse_program(text, &mut scratch).unwrap()
        };
        let broad = parse("f(A) :- length(A,B).");
        let narrow = parse("f(A) :- length(A,B), two(B).");
        let other = parse("f(A) :- one(A).");

        let mut state = LearnedConstraints::new();
        state.push(LearnedConstraint::Generalisation { anchor: broad.clone() });
        let mut superset = broad.clone();
        superset.extend(other.clone());
        superset.sort();
        assert!(state.skips(&superset));
        assert!(!state.skips(&other));
        // Body-extension is not set containment: the narrow rule alone is
        // not skipped by a generalisation anchor on the broad rule.
        assert!(!state.skips(&narrow));

        let mut state = LearnedConstraints::new();
        state.push(LearnedConstraint::Specialisation { anchor: broad.clone() });
        assert!(state.skips(&narrow), "body extension of the anchor");
        assert!(state.skips(&broad), "anchor extends itself");
        assert!(!state.skips(&other));
        let mut mixed = narrow.clone();
        mixed.extend(other);
        mixed.sort();
        assert!(!mixed.iter().all(|r| broad.iter().any(|a| r.body_extends(a))));
        assert!(!state.skips(&mixed), "added rule may add coverage");
    }

    #[test]
    fn recursion_learned_with_base_case() {
        let mut store = parse_facts("edge(a,b).\nedge(b,c).\nedge(c,d).").unwrap();
        let bias_text = "head_pred(reach,2).\nbody_pred(edge,2).\nmax_vars(3).\nmax_body(2).\nmax_rules(2).\nenable_recursion.";
        let bias = parse_bias(bias_text, &mut store).unwrap();
        let (pos, neg) = parse_examples(
            "pos(reach(a,b)).\npos(reach(a,c)).\npos(reach(a,d)).\nneg(reach(b,a)).\nneg(reach(d,a)).",
            &mut store,
        )
        .unwrap();
        let task = Task::new(store, &[], pos, neg, bias).unwrap();
        let out = learn(&task, &ConstraintSet::new());
        let h = out.solution.expect("solvable with recursion");
        assert_eq!(h.cost(), 5);
        assert!(h.rules().iter().any(|r| r.is_recursive()));
        assert!(h.rules().iter().any(|r| !r.is_recursive()));
        let report = test_hypothesis(&h, &task);
        assert!(report.complete && report.consistent);
    }

    #[test]
    fn unsolvable_task_returns_none() {
        let mut store = parse_facts("q(a).").unwrap();
        let bias = parse_bias(
            "head_pred(f,1).\nbody_pred(q,1).\nmax_vars(2).\nmax_body(2).\nmax_rules(1).",
            &mut store,
        )
        .unwrap();
        let (pos, _) = parse_examples("pos(f(c)).", &mut store).unwrap();
        let task = Task::new(store, &[], pos, Vec::new(), bias).unwrap();
        let out = learn(&task, &ConstraintSet::new());
        assert_eq!(out.solution, None);
        assert!(out.stats.programs_tested > 0);
    }

    #[test]
    fn skipped_candidates_replay_as_failures() {
        // amb covers a positive and a negative, so it survives as a live
        // anchored rule; red/blue form the two-rule optimum at cost 4.
        let mut store = parse_facts("amb(a).\namb(c).\nred(a).\nblue(b).").unwrap();
        let bias = parse_bias(
            "head_pred(f,1).\nbody_pred(amb,1).\nbody_pred(red,1).\nbody_pred(blue,1).\nmax_vars(2).\nmax_body(2).\nmax_rules(2).",
            &mut store,
        )
        .unwrap();
        let (pos, neg) =
            parse_examples("pos(f(a)).\npos(f(b)).\nneg(f(c)).", &mut store).unwrap();
        let task = Task::new(store, &[], pos, neg, bias).unwrap();
        let (out, trace) = learn_traced(&task, &ConstraintSet::new());
        let h = out.solution.expect("solvable");
        assert_eq!(h.cost(), 4);
        assert!(!trace.skipped_generalisation.is_empty());
        assert!(!trace.skipped_specialisation.is_empty());
        for h in &trace.skipped_generalisation {
            assert!(!test_hypothesis(h, &task).consistent, "{h:?}");
        }
        for h in &trace.skipped_specialisation {
            assert!(!test_hypothesis(h, &task).complete, "{h:?}");
        }
    }

    #[test]
    fn deterministic_outcome_and_counters() {
        let task = toy_task();
        let first = learn(&task, &ConstraintSet::new());
        let second = learn(&task, &ConstraintSet::new());
        assert_eq!(first.solution, second.solution);
        assert_eq!(first.stats, second.stats);
    }

    #[test]
    fn grounds_background_rules_up_front() {
        let mut store = FactStore::new();
        let rules = crate::kb::parse_program(
            "edge(a,b).\nedge(b,c).\nconn(A,B) :- edge(A,B).\nconn(A,B) :- edge(A,C), conn(C,B).",
            &mut store,
        )
        .unwrap();
        let bias = parse_bias("head_pred(f,2).\nbody_pred(conn,2).", &mut store).unwrap();
        let (pos, neg) = parse_examples("pos(f(a,c)).\nneg(f(c,a)).", &mut store).unwrap();
        let task = Task::new(store, &rules, pos, neg, bias).unwrap();
        let conn = task.bk().symbols().lookup("conn").unwrap();
        assert!(task.bk().relation(conn).is_some());
        let out = learn(&task, &ConstraintSet::new());
        assert_eq!(
            out.solution.unwrap().display(task.bk().symbols()),
            "f(A,B):-conn(A,B)."
        );
    }
}
