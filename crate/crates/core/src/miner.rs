//! Closed-world property mining: decide which relational properties and
//! functional dependencies hold for each candidate background relation by
//! searching for counter-examples. A property is asserted exactly when the
//! relation is nonempty and no counter-example exists.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::kb::{FactStore, Relation, Symbol};

/// One property from the mining library. `Asymmetric` carries the column
/// permutation π as target-position source indices, so `perm = [1,0]` is
/// the binary swap. `Unique` carries determinant and dependent column sets,
/// which together partition the columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyKind {
    Irreflexive { arity: usize },
    Antitransitive,
    Antitriangular,
    Asymmetric { perm: Vec<usize> },
    Unique { det: Vec<usize>, dep: Vec<usize> },
    Exclusive,
    Singleton,
}

fn cols_as_letters(cols: &[usize]) -> String {
    cols.iter().map(|&c| (b'a' + c as u8) as char).collect()
}

impl PropertyKind {
    /// Family name used in human-facing output.
    pub fn family(&self) -> &'static str {
        match self {
            PropertyKind::Irreflexive { .. } => "irreflexive",
            PropertyKind::Antitransitive => "antitransitive",
            PropertyKind::Antitriangular => "antitriangular",
            PropertyKind::Asymmetric { .. } => "asymmetric",
            PropertyKind::Unique { .. } => "unique",
            PropertyKind::Exclusive => "exclusive",
            PropertyKind::Singleton => "singleton",
        }
    }

    /// Variant detail within the family: the permutation or column-set
    /// suffix, empty for parameterless kinds.
    pub fn detail(&self) -> String {
        match self {
            PropertyKind::Irreflexive { arity } => "a".repeat(*arity),
            PropertyKind::Asymmetric { perm } => {
                let identity: Vec<usize> = (0..perm.len()).collect();
                format!("{}_{}", cols_as_letters(&identity), cols_as_letters(perm))
            }
            PropertyKind::Unique { det, dep } => {
                format!("{}_{}", cols_as_letters(det), cols_as_letters(dep))
            }
            _ => String::new(),
        }
    }

    /// Name matching the ASP discovery encodings: `asymmetric_ab_ba`,
    /// `unique_bc_a`, `unsat_pair`, `singleton`, and so on. Irreflexive
    /// names extend the scheme (`irreflexive_aa`, `irreflexive_aaa`).
    pub fn asp_name(&self) -> String {
        match self {
            PropertyKind::Exclusive => "unsat_pair".to_string(),
            PropertyKind::Antitransitive
            | PropertyKind::Antitriangular
            | PropertyKind::Singleton => self.family().to_string(),
            _ => format!("{}_{}", self.family(), self.detail()),
        }
    }

    /// Relation arity this kind applies to, when fixed by the kind itself.
    fn expected_arity(&self) -> Option<usize> {
        match self {
            PropertyKind::Irreflexive { arity } => Some(*arity),
            PropertyKind::Antitransitive | PropertyKind::Antitriangular => Some(2),
            PropertyKind::Asymmetric { perm } => Some(perm.len()),
            PropertyKind::Unique { det, dep } => Some(det.len() + dep.len()),
            PropertyKind::Exclusive | PropertyKind::Singleton => None,
        }
    }

    /// The asymmetry permutations checked at a given arity: the swap for
    /// binary relations, every non-identity permutation for ternary ones.
    pub fn asymmetric_family(arity: usize) -> Vec<PropertyKind> {
        match arity {
            2 => vec![PropertyKind::Asymmetric { perm: vec![1, 0] }],
            3 => [
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ]
            .into_iter()
            .map(|perm| PropertyKind::Asymmetric { perm })
            .collect(),
            _ => Vec::new(),
        }
    }

    /// The functional dependencies checked at a given arity: every proper
    /// nonempty determinant column set, with the complement as dependent.
    pub fn unique_family(arity: usize) -> Vec<PropertyKind> {
        if !(2..=3).contains(&arity) {
            return Vec::new();
        }
        let mut out = Vec::new();
        for mask in 1u32..(1 << arity) - 1 {
            let det: Vec<usize> = (0..arity).filter(|c| mask & (1 << c) != 0).collect();
            let dep: Vec<usize> = (0..arity).filter(|c| mask & (1 << c) == 0).collect();
            out.push(PropertyKind::Unique { det, dep });
        }
        out
    }
}

/// A discovered property instance over one or two nonempty relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PropertyAssertion {
    pub kind: PropertyKind,
    /// Relation symbols with their arities; two entries only for Exclusive,
    /// kept in ascending name order.
    pub relations: Vec<(Symbol, usize)>,
}

impl PropertyAssertion {
    fn sort_key(&self, store: &FactStore) -> (String, String, String) {
        let name = |i: usize| {
            self.relations
                .get(i)
                .map(|&(s, _)| store.symbols().name(s).to_string())
                .unwrap_or_default()
        };
        (name(0), self.kind.asp_name(), name(1))
    }
}

/// Which relations to mine and how far up the arity ladder to go.
///
/// `candidates` is the user-facing body-predicate set; head predicates must
/// not be listed. `max_family_arity` caps the Unique and Asymmetric
/// families (and the binary-only antitransitive/antitriangular checks),
/// which in any case stop at arity 3. Irreflexive, Exclusive, and Singleton
/// are cheap and run at every arity unless the arity is disabled outright.
#[derive(Debug, Clone)]
pub struct MinerConfig {
    pub candidates: Vec<Symbol>,
    pub max_family_arity: usize,
    pub disabled_arities: BTreeSet<usize>,
}

impl MinerConfig {
    pub fn new(candidates: Vec<Symbol>) -> Self {
        MinerConfig {
            candidates,
            max_family_arity: 3,
            disabled_arities: BTreeSet::new(),
        }
    }

    /// Convenience config: every nonempty relation of the store.
    pub fn all_relations(store: &FactStore) -> Self {
        MinerConfig::new(store.relations_by_name().iter().map(|r| r.name()).collect())
    }

    fn arity_enabled(&self, arity: usize) -> bool {
        !self.disabled_arities.contains(&arity)
    }

    /// The single-relation property kinds checked at a given arity.
    fn kinds_for(&self, arity: usize) -> Vec<PropertyKind> {
        let mut kinds = vec![PropertyKind::Singleton];
        if arity >= 2 {
            kinds.push(PropertyKind::Irreflexive { arity });
        }
        if arity <= self.max_family_arity {
            if arity == 2 {
                kinds.push(PropertyKind::Antitransitive);
                kinds.push(PropertyKind::Antitriangular);
            }
            kinds.extend(PropertyKind::asymmetric_family(arity));
            kinds.extend(PropertyKind::unique_family(arity));
        }
        kinds
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinerError {
    #[error("property {property} expects arity {expected} but {relation} has arity {found}")]
    ArityMismatch {
        property: String,
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("property {property} expects {expected} relation(s), got {found}")]
    RelationCount {
        property: String,
        expected: usize,
        found: usize,
    },
    #[error("relation {0} is unknown or empty")]
    MissingRelation(String),
}

/// The facts jointly refuting a property: one tuple for Irreflexive and
/// Exclusive, two for Asymmetric/Unique/Singleton, three for the
/// transitivity-shaped checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterExample {
    pub tuples: Vec<Vec<Symbol>>,
}

/// True iff the property holds (no counter-example). See
/// [`find_counter_example`] for the witness-producing form.
pub fn check_property(
    store: &FactStore,
    kind: &PropertyKind,
    relations: &[Symbol],
) -> Result<bool, MinerError> {
    find_counter_example(store, kind, relations).map(|cx| cx.is_none())
}

/// Searches the store for a concrete refutation of `kind` over
/// `relations`. `Ok(None)` means the property holds.
pub fn find_counter_example(
    store: &FactStore,
    kind: &PropertyKind,
    relations: &[Symbol],
) -> Result<Option<CounterExample>, MinerError> {
    let expected_rels = if *kind == PropertyKind::Exclusive { 2 } else { 1 };
    if relations.len() != expected_rels {
        return Err(MinerError::RelationCount {
            property: kind.asp_name(),
            expected: expected_rels,
            found: relations.len(),
        });
    }
    let rel_of = |sym: Symbol| {
        store
            .relation(sym)
            .ok_or_else(|| MinerError::MissingRelation(store.symbols().name(sym).to_string()))
    };
    let first = rel_of(relations[0])?;
    if let Some(expected) = kind.expected_arity() {
        if first.arity() != expected {
            return Err(MinerError::ArityMismatch {
                property: kind.asp_name(),
                relation: store.symbols().name(relations[0]).to_string(),
                expected,
                found: first.arity(),
            });
        }
    }
    Ok(match kind {
        PropertyKind::Irreflexive { .. } => cx_irreflexive(first),
        PropertyKind::Antitransitive => cx_chain(first, false),
        PropertyKind::Antitriangular => cx_chain(first, true),
        PropertyKind::Asymmetric { perm } => cx_asymmetric(first, perm),
        PropertyKind::Unique { det, .. } => cx_unique(first, det),
        PropertyKind::Singleton => cx_singleton(first),
        PropertyKind::Exclusive => {
            let second = rel_of(relations[1])?;
            if second.arity() != first.arity() {
                return Err(MinerError::ArityMismatch {
                    property: kind.asp_name(),
                    relation: store.symbols().name(relations[1]).to_string(),
                    expected: first.arity(),
                    found: second.arity(),
                });
            }
            cx_exclusive(first, second)
        }
    })
}

fn cx_irreflexive(rel: &Relation) -> Option<CounterExample> {
    rel.iter()
        .find(|t| t.iter().all(|&s| s == t[0]))
        .map(|t| CounterExample { tuples: vec![t.to_vec()] })
}

/// Shared shape of antitransitive and antitriangular: two chained pairs
/// plus a closing pair, which for the triangular case is reversed.
fn cx_chain(rel: &Relation, triangular: bool) -> Option<CounterExample> {
    for t1 in rel.iter() {
        let (a, b) = (t1[0], t1[1]);
        for &i in rel.rows_with(0, b) {
            let c = rel.row(i)[1];
            let closing = if triangular { [c, a] } else { [a, c] };
            if rel.contains(&closing) {
                return Some(CounterExample {
                    tuples: vec![t1.to_vec(), vec![b, c], closing.to_vec()],
                });
            }
        }
    }
    None
}

fn cx_asymmetric(rel: &Relation, perm: &[usize]) -> Option<CounterExample> {
    for t in rel.iter() {
        let image: Vec<Symbol> = perm.iter().map(|&i| t[i]).collect();
        // A self-symmetric tuple (image == t) is itself a counter-example.
        if rel.contains(&image) {
            return Some(CounterExample { tuples: vec![t.to_vec(), image] });
        }
    }
    None
}

fn cx_unique(rel: &Relation, det: &[usize]) -> Option<CounterExample> {
    // Tuples are distinct, so two sharing the determinant columns must
    // differ on the dependent ones.
    let mut groups: HashMap<Vec<Symbol>, &[Symbol]> = HashMap::new();
    for t in rel.iter() {
        let key: Vec<Symbol> = det.iter().map(|&c| t[c]).collect();
        if let Some(prev) = groups.insert(key, t) {
            return Some(CounterExample { tuples: vec![prev.to_vec(), t.to_vec()] });
        }
    }
    None
}

fn cx_singleton(rel: &Relation) -> Option<CounterExample> {
    if rel.len() == 1 {
        None
    } else {
        Some(CounterExample {
            tuples: rel.iter().take(2).map(|t| t.to_vec()).collect(),
        })
    }
}

fn cx_exclusive(p: &Relation, q: &Relation) -> Option<CounterExample> {
    let (probe, scan) = if p.len() <= q.len() { (q, p) } else { (p, q) };
    scan.iter()
        .find(|t| probe.contains(t))
        .map(|t| CounterExample { tuples: vec![t.to_vec()] })
}

/// Mines every enabled property over the candidate relations. Missing and
/// empty relations are skipped (the nonemptiness guard). Checks run in
/// parallel per relation; the result is sorted by relation name, then
/// property name, so output is deterministic regardless of thread count.
pub fn mine_properties(store: &FactStore, config: &MinerConfig) -> Vec<PropertyAssertion> {
    let mut cands: Vec<(Symbol, usize)> = config
        .candidates
        .iter()
        .filter_map(|&p| store.relation(p).filter(|r| !r.is_empty()).map(|r| (p, r.arity())))
        .filter(|&(_, a)| config.arity_enabled(a))
        .collect();
    cands.sort_by(|a, b| store.symbols().name(a.0).cmp(store.symbols().name(b.0)));
    cands.dedup();

    let mut out: Vec<PropertyAssertion> = cands
        .par_iter()
        .flat_map_iter(|&(pred, arity)| {
            config.kinds_for(arity).into_iter().filter_map(move |kind| {
                let holds = check_property(store, &kind, &[pred]).expect("kind fits arity");
                holds.then(|| PropertyAssertion {
                    kind,
                    relations: vec![(pred, arity)],
                })
            })
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..cands.len())
        .flat_map(|i| (i + 1..cands.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| cands[i].1 == cands[j].1)
        .collect();
    out.par_extend(pairs.par_iter().filter_map(|&(i, j)| {
        let (p, arity) = cands[i];
        let (q, _) = cands[j];
        let holds =
            check_property(store, &PropertyKind::Exclusive, &[p, q]).expect("arities equal");
        holds.then(|| PropertyAssertion {
            kind: PropertyKind::Exclusive,
            relations: vec![(p, arity), (q, arity)],
        })
    }));

    out.sort_by(|a, b| a.sort_key(store).cmp(&b.sort_key(store)));
    out
}

/// Brute-force reference miner: same contract as [`mine_properties`], but
/// every check is a plain nested loop over materialized tuple vectors with
/// no indexes and no parallelism. Test use only; quadratic to cubic.
pub fn oracle_mine(store: &FactStore, config: &MinerConfig) -> Vec<PropertyAssertion> {
    let mut cands: Vec<(Symbol, usize, Vec<Vec<Symbol>>)> = config
        .candidates
        .iter()
        .filter_map(|&p| {
            store
                .relation(p)
                .filter(|r| !r.is_empty())
                .map(|r| (p, r.arity(), r.iter().map(|t| t.to_vec()).collect()))
        })
        .filter(|&(_, a, _)| config.arity_enabled(a))
        .collect();
    cands.sort_by(|a, b| store.symbols().name(a.0).cmp(store.symbols().name(b.0)));
    cands.dedup_by(|a, b| a.0 == b.0);

    let mut out = Vec::new();
    for (pred, arity, tuples) in &cands {
        for kind in config.kinds_for(*arity) {
            let holds = match &kind {
                PropertyKind::Irreflexive { .. } => {
                    !tuples.iter().any(|t| t.iter().all(|&s| s == t[0]))
                }
                PropertyKind::Antitransitive => !tuples.iter().any(|t1| {
                    tuples.iter().any(|t2| {
                        t1[1] == t2[0]
                            && tuples.iter().any(|t3| t3[0] == t1[0] && t3[1] == t2[1])
                    })
                }),
                PropertyKind::Antitriangular => !tuples.iter().any(|t1| {
                    tuples.iter().any(|t2| {
                        t1[1] == t2[0]
                            && tuples.iter().any(|t3| t3[0] == t2[1] && t3[1] == t1[0])
                    })
                }),
                PropertyKind::Asymmetric { perm } => !tuples.iter().any(|t| {
                    let image: Vec<Symbol> = perm.iter().map(|&i| t[i]).collect();
                    tuples.contains(&image)
                }),
                PropertyKind::Unique { det, .. } => {
                    let key = |t: &[Symbol]| -> Vec<Symbol> {
                        det.iter().map(|&c| t[c]).collect()
                    };
                    !tuples.iter().enumerate().any(|(i, t1)| {
                        tuples[i + 1..].iter().any(|t2| key(t1) == key(t2))
                    })
                }
                PropertyKind::Singleton => tuples.len() == 1,
                PropertyKind::Exclusive => unreachable!("pairs handled below"),
            };
            if holds {
                out.push(PropertyAssertion {
                    kind,
                    relations: vec![(*pred, *arity)],
                });
            }
        }
    }
    for (i, (p, pa, pt)) in cands.iter().enumerate() {
        for (q, qa, qt) in &cands[i + 1..] {
            if pa != qa {
                continue;
            }
            if !pt.iter().any(|t| qt.contains(t)) {
                out.push(PropertyAssertion {
                    kind: PropertyKind::Exclusive,
                    relations: vec![(*p, *pa), (*q, *qa)],
                });
            }
        }
    }
    out.sort_by(|a, b| a.sort_key(store).cmp(&b.sort_key(store)));
    out
}
