use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::symbol::{Symbol, SymbolTable};

/// Variable index inside a rule. Index 0 renders as `A`, 1 as `B`, and so on.
pub type VarId = u32;

/// A term is either a rule variable or an interned constant.
///
/// Variant order matters: variables sort before constants, and both sort by
/// index, which fixes the canonical literal order used everywhere.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Var(VarId),
    Const(Symbol),
}

impl Term {
    pub fn as_var(self) -> Option<VarId> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

/// A predicate applied to terms, e.g. `tail(A,C)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: Symbol, args: Vec<Term>) -> Self {
        Atom { pred, args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.args.iter().filter_map(|t| t.as_var())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn display<'a>(&'a self, syms: &'a SymbolTable) -> AtomDisplay<'a> {
        AtomDisplay { atom: self, syms }
    }
}

/// A ground fact: predicate applied to constants only.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fact {
    pub pred: Symbol,
    pub args: Vec<Symbol>,
}

impl Fact {
    pub fn new(pred: Symbol, args: Vec<Symbol>) -> Self {
        Fact { pred, args }
    }

    pub fn display<'a>(&'a self, syms: &'a SymbolTable) -> FactDisplay<'a> {
        FactDisplay { fact: self, syms }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule body is empty")]
    EmptyBody,
    #[error("head variable {0} does not occur in the body")]
    UnsafeHeadVar(String),
    #[error("body literal {0} is not connected to the head")]
    DisconnectedBody(usize),
}

/// A definite rule in canonical form.
///
/// Canonical form means: body literals sorted and deduplicated, disequality
/// pairs normalized (low variable first) and sorted, and variables numbered
/// by first occurrence scanning the head left-to-right and then the sorted
/// body, choosing the numbering of body-only variables that minimizes the
/// sorted body lexicographically. Two rules are variable renamings of each
/// other iff their canonical forms are equal, so `Eq`/`Hash` give renaming
/// equivalence for free.
///
/// Disequalities are not part of the surface rule syntax; they carry the
/// `B != C` side conditions of compiled constraints when a rule is used as a
/// query body.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Rule {
    head: Atom,
    body: Vec<Atom>,
    diseqs: Vec<(VarId, VarId)>,
}

impl Rule {
    /// Validates and canonicalizes a rule.
    pub fn new(head: Atom, body: Vec<Atom>, diseqs: Vec<(VarId, VarId)>) -> Result<Rule, RuleError> {
        if body.is_empty() {
            return Err(RuleError::EmptyBody);
        }
        let body_vars: HashSet<VarId> = body.iter().flat_map(|a| a.vars()).collect();
        for v in head.vars() {
            if !body_vars.contains(&v) {
                return Err(RuleError::UnsafeHeadVar(var_name(v)));
            }
        }
        check_connected(&head, &body)?;
        let (head, body, diseqs) = canonical_parts(head, body, diseqs);
        Ok(Rule { head, body, diseqs })
    }

    pub fn head(&self) -> &Atom {
        &self.head
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn diseqs(&self) -> &[(VarId, VarId)] {
        &self.diseqs
    }

    /// Literal count including the head; the learner's cost measure.
    pub fn cost(&self) -> usize {
        1 + self.body.len()
    }

    /// True when the body mentions the rule's own head predicate.
    pub fn is_recursive(&self) -> bool {
        self.body.iter().any(|a| a.pred == self.head.pred)
    }

    /// True when every literal of `other`'s body also occurs in this body
    /// and the heads agree. Used for specialisation pruning: a body superset
    /// derives a subset of the facts the smaller rule derives.
    pub fn body_extends(&self, other: &Rule) -> bool {
        self.head == other.head && other.body.iter().all(|a| self.body.contains(a))
    }

    pub fn display<'a>(&'a self, syms: &'a SymbolTable) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, syms }
    }
}

/// Every body literal must be reachable from the head through shared
/// variables. Ground literals act as self-contained guards and count as
/// connected.
fn check_connected(head: &Atom, body: &[Atom]) -> Result<(), RuleError> {
    let mut reached: Vec<bool> = body.iter().map(|a| a.is_ground()).collect();
    let mut frontier: HashSet<VarId> = head.vars().collect();
    loop {
        let mut grew = false;
        for (i, atom) in body.iter().enumerate() {
            if reached[i] {
                continue;
            }
            if atom.vars().any(|v| frontier.contains(&v)) {
                reached[i] = true;
                frontier.extend(atom.vars());
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    match reached.iter().position(|r| !r) {
        Some(i) => Err(RuleError::DisconnectedBody(i)),
        None => Ok(()),
    }
}

/// Renumbers variables and sorts the body, minimizing over all numberings of
/// body-only variables. Head variables are forced by their first occurrence
/// in the head, so only the body-only variables are permuted; candidate
/// counts stay tiny for the variable budgets used in practice.
fn canonical_parts(
    head: Atom,
    body: Vec<Atom>,
    diseqs: Vec<(VarId, VarId)>,
) -> (Atom, Vec<Atom>, Vec<(VarId, VarId)>) {
    let mut base: HashMap<VarId, VarId> = HashMap::new();
    let mut next: VarId = 0;
    for v in head.vars() {
        base.entry(v).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
    }
    let mut free: Vec<VarId> = Vec::new();
    for v in body
        .iter()
        .flat_map(|a| a.vars())
        .chain(diseqs.iter().flat_map(|&(a, b)| [a, b]))
    {
        if !base.contains_key(&v) && !free.contains(&v) {
            free.push(v);
        }
    }

    let rename = |map: &HashMap<VarId, VarId>| {
        let mut b: Vec<Atom> = body
            .iter()
            .map(|a| Atom {
                pred: a.pred,
                args: a
                    .args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) => Term::Var(map[v]),
                        c => *c,
                    })
                    .collect(),
            })
            .collect();
        b.sort();
        b.dedup();
        let mut d: Vec<(VarId, VarId)> = diseqs
            .iter()
            .map(|&(x, y)| {
                let (x, y) = (map[&x], map[&y]);
                if x <= y {
                    (x, y)
                } else {
                    (y, x)
                }
            })
            .collect();
        d.sort();
        d.dedup();
        (b, d)
    };

    let (best_body, best_diseqs) = if free.is_empty() {
        rename(&base)
    } else {
        let mut best: Option<(Vec<Atom>, Vec<(VarId, VarId)>)> = None;
        let k = free.len();
        let mut perm: Vec<usize> = (0..k).collect();
        loop {
            let mut map = base.clone();
            for (i, &slot) in perm.iter().enumerate() {
                map.insert(free[i], next + slot as VarId);
            }
            let cand = rename(&map);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.unwrap()
    };

    let new_head = Atom {
        pred: head.pred,
        args: head
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::Var(base[v]),
                c => *c,
            })
            .collect(),
    };
    (new_head, best_body, best_diseqs)
}

/// Advances `perm` to the next lexicographic permutation, false at the last.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Render a variable index: `A`..`Z`, then `V26`, `V27`, ...
pub fn var_name(v: VarId) -> String {
    if v < 26 {
        ((b'A' + v as u8) as char).to_string()
    } else {
        format!("V{v}")
    }
}

pub struct AtomDisplay<'a> {
    atom: &'a Atom,
    syms: &'a SymbolTable,
}

impl fmt::Display for AtomDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.syms.name(self.atom.pred))?;
        for (i, t) in self.atom.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match t {
                Term::Var(v) => write!(f, "{}", var_name(*v))?,
                Term::Const(c) => write!(f, "{}", self.syms.name(*c))?,
            }
        }
        write!(f, ")")
    }
}

pub struct FactDisplay<'a> {
    fact: &'a Fact,
    syms: &'a SymbolTable,
}

impl fmt::Display for FactDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.syms.name(self.fact.pred))?;
        for (i, c) in self.fact.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.syms.name(*c))?;
        }
        write!(f, ")")
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a Rule,
    syms: &'a SymbolTable,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:-", self.rule.head.display(self.syms))?;
        for (i, a) in self.rule.body.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a.display(self.syms))?;
        }
        for &(x, y) in &self.rule.diseqs {
            write!(f, ",{}!={}", var_name(x), var_name(y))?;
        }
        write!(f, ".")
    }
}
