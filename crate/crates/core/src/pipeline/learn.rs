//! Rule learning: generalize each training row, expand condition subsets,
//! keep the Best candidates on the training split, then the Simplest.
//!
//! Candidates are never materialized as [`Rule`] values. Each distinct atom
//! gets a row bitset over the training split; a depth-first walk over each
//! row's condition subsets intersects bitsets along the path. Support only
//! shrinks as conditions are added, so a prefix at or below the support
//! threshold cuts its whole subtree without changing the result.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::dataset::{DataError, Dataset};
use crate::generalize::{multi_way_gen, pre_gen, two_way_gen};
use crate::language::{atom_holds, EpistemicAtom, Rule};
use crate::metrics::{ConfidenceMode, Thresholds};
use crate::model::{InfluenceTuple, RelationSet};
use crate::rationality::RelationProfile;
use crate::Error;

use super::{ExperimentConfig, Pipeline};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnOutcome {
    pub rules: BTreeSet<Rule>,
    /// Training rows whose generalized rule entered expansion.
    pub generalized_rows: usize,
    /// Condition-subset instantiations before deduplication.
    pub candidates: u128,
}

/// Full generalized rule of every training row that enters expansion.
///
/// Multi-way drops rows whose exact values meet a principle, and also
/// generalized rules that meet one: a neutral 0.5 becomes `<= 0.5`, which
/// reads as disbelieved after generalization.
pub fn generalize_rows(
    train: &Dataset,
    tuple: &InfluenceTuple,
    rel: &RelationSet,
    cfg: &ExperimentConfig,
) -> Result<Vec<Rule>, Error> {
    let mut out = Vec::with_capacity(train.len());
    match cfg.pipeline {
        Pipeline::TwoWay => {
            for item in train.items() {
                out.push(two_way_gen(item, tuple)?);
            }
        }
        Pipeline::MultiWay => {
            let profile = RelationProfile::new(tuple, rel)?;
            for item in train.items() {
                let exact = pre_gen(item, tuple)?;
                if profile.check_exact(&exact).is_some() {
                    continue;
                }
                let rule = multi_way_gen(&exact, &cfg.value_set)?;
                if profile.check_rule(&rule).is_none() {
                    out.push(rule);
                }
            }
        }
    }
    Ok(out)
}

pub fn learn(
    train: &Dataset,
    tuple: &InfluenceTuple,
    rel: &RelationSet,
    cfg: &ExperimentConfig,
) -> Result<BTreeSet<Rule>, Error> {
    Ok(learn_detailed(train, tuple, rel, cfg)?.rules)
}

pub fn learn_detailed(
    train: &Dataset,
    tuple: &InfluenceTuple,
    rel: &RelationSet,
    cfg: &ExperimentConfig,
) -> Result<LearnOutcome, Error> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(DataError::EmptyDataset.into());
    }
    let full = generalize_rows(train, tuple, rel, cfg)?;
    let per_row: u128 = (1..=cfg.max_conditions.min(tuple.influencers().len()))
        .map(|k| binomial(tuple.influencers().len() as u128, k as u128))
        .sum();
    let candidates = per_row * full.len() as u128;
    let generalized_rows = full.len();
    let unique: BTreeSet<Rule> = full.into_iter().collect();
    let rules = select_rules(unique.iter(), train, cfg.max_conditions, &cfg.thresholds())?;
    Ok(LearnOutcome {
        rules,
        generalized_rows,
        candidates,
    })
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

type Bits = Vec<u64>;

fn popcount(bits: &[u64]) -> u64 {
    bits.iter().map(|w| u64::from(w.count_ones())).sum()
}

fn and_count(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| u64::from((x & y).count_ones())).sum()
}

struct AtomTable<'d> {
    data: &'d Dataset,
    ids: HashMap<EpistemicAtom, u32>,
    atoms: Vec<EpistemicAtom>,
    bits: Vec<Bits>,
    counts: Vec<u64>,
}

impl<'d> AtomTable<'d> {
    fn new(data: &'d Dataset) -> Self {
        AtomTable {
            data,
            ids: HashMap::new(),
            atoms: Vec::new(),
            bits: Vec::new(),
            counts: Vec::new(),
        }
    }

    fn intern(&mut self, atom: &EpistemicAtom) -> Result<u32, DataError> {
        if let Some(&id) = self.ids.get(atom) {
            return Ok(id);
        }
        let mut bits = vec![0u64; self.data.len().div_ceil(64)];
        for (row, item) in self.data.items().iter().enumerate() {
            if atom_holds(atom, item.value(&atom.arg)?) {
                bits[row / 64] |= 1 << (row % 64);
            }
        }
        let id = self.atoms.len() as u32;
        self.counts.push(popcount(&bits));
        self.bits.push(bits);
        self.atoms.push(atom.clone());
        self.ids.insert(atom.clone(), id);
        Ok(id)
    }
}

/// Exact threshold tests in integer arithmetic.
struct Gate {
    n: u128,
    support: (u128, u128),
    confidence: (u128, u128),
    mode: ConfidenceMode,
}

impl Gate {
    fn new(n: usize, t: &Thresholds) -> Gate {
        Gate {
            n: n as u128,
            support: (u128::from(*t.support.numer()), u128::from(*t.support.denom())),
            confidence: (u128::from(*t.confidence.numer()), u128::from(*t.confidence.denom())),
            mode: t.mode,
        }
    }

    fn support_ok(&self, fired: u64) -> bool {
        u128::from(fired) * self.support.1 > self.support.0 * self.n
    }

    fn best_ok(&self, fired: u64, agrees: u64, correct: u64) -> bool {
        let (f, a, c) = (u128::from(fired), u128::from(agrees), u128::from(correct));
        if f == 0 || a == 0 {
            return false;
        }
        let denom = match self.mode {
            ConfidenceMode::Fired => f,
            ConfidenceMode::Dataset => self.n,
        };
        c * self.confidence.1 > self.confidence.0 * denom && c * self.n > f * a
    }
}

struct Entry {
    passes: bool,
    heads: Vec<u32>,
}

struct Walk<'a> {
    table: &'a AtomTable<'a>,
    gate: &'a Gate,
    cap: usize,
    memo: HashMap<Box<[u32]>, Entry>,
    best: HashSet<(Box<[u32]>, u32)>,
}

impl Walk<'_> {
    fn row(&mut self, conds: &[u32], head: u32) {
        let words = self.table.bits.first().map_or(0, Vec::len);
        let mut levels: Vec<Bits> = vec![vec![0; words]; self.cap.min(conds.len())];
        let mut path = Vec::with_capacity(self.cap);
        self.descend(conds, head, 0, &mut path, &mut levels);
    }

    fn descend(&mut self, conds: &[u32], head: u32, start: usize, path: &mut Vec<u32>, levels: &mut [Bits]) {
        let depth = path.len();
        for i in start..conds.len() {
            let atom = conds[i];
            {
                let atom_bits = &self.table.bits[atom as usize];
                let (done, rest) = levels.split_at_mut(depth);
                let level = &mut rest[0];
                match done.last() {
                    Some(parent) => {
                        for ((dst, p), a) in level.iter_mut().zip(parent).zip(atom_bits) {
                            *dst = p & a;
                        }
                    }
                    None => level.copy_from_slice(atom_bits),
                }
            }
            path.push(atom);
            let fired = popcount(&levels[depth]);
            if !self.memo.contains_key(path.as_slice()) {
                let entry = Entry {
                    passes: self.gate.support_ok(fired),
                    heads: Vec::new(),
                };
                self.memo.insert(path.clone().into_boxed_slice(), entry);
            }
            let entry = self.memo.get_mut(path.as_slice()).expect("inserted above");
            if entry.passes {
                if !entry.heads.contains(&head) {
                    entry.heads.push(head);
                    let correct = and_count(&levels[depth], &self.table.bits[head as usize]);
                    if self.gate.best_ok(fired, self.table.counts[head as usize], correct) {
                        self.best.insert((path.clone().into_boxed_slice(), head));
                    }
                }
                if depth + 1 < self.cap {
                    self.descend(conds, head, i + 1, path, levels);
                }
            }
            path.pop();
        }
    }
}

fn has_best_proper_subset(best: &HashSet<(Box<[u32]>, u32)>, key: &[u32], head: u32) -> bool {
    let n = key.len();
    let mut probe: (Box<[u32]>, u32) = (Box::from([]), head);
    (1u64..(1u64 << n) - 1).any(|mask| {
        probe.0 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| key[i]).collect();
        best.contains(&probe)
    })
}

/// `simplest(best(expand(r, cap) for r in full_rules, data))`.
pub fn select_rules<'a>(
    full_rules: impl IntoIterator<Item = &'a Rule>,
    data: &Dataset,
    cap: usize,
    thresholds: &Thresholds,
) -> Result<BTreeSet<Rule>, DataError> {
    if data.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let mut table = AtomTable::new(data);
    let mut rows = Vec::new();
    for rule in full_rules {
        let mut conds = rule
            .conditions()
            .iter()
            .map(|c| table.intern(c))
            .collect::<Result<Vec<_>, _>>()?;
        conds.sort_unstable();
        rows.push((conds, table.intern(rule.head())?));
    }
    let gate = Gate::new(data.len(), thresholds);
    let mut walk = Walk {
        table: &table,
        gate: &gate,
        cap,
        memo: HashMap::new(),
        best: HashSet::new(),
    };
    for (conds, head) in &rows {
        walk.row(conds, *head);
    }
    let best = walk.best;
    Ok(best
        .iter()
        .filter(|(key, head)| !has_best_proper_subset(&best, key, *head))
        .map(|(key, head)| {
            let conds = key.iter().map(|&id| table.atoms[id as usize].clone()).collect();
            Rule::new(conds, table.atoms[*head as usize].clone()).expect("subset of a generalized rule")
        })
        .collect())
}
