//! Brute-force reference implementations shared by the integration tests
//! and the acceptance runner. Nothing here calls the production
//! generalization, rationality or metric code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::Ratio;
use rand::Rng;

use epirules::dataset::{DataItem, Dataset};
use epirules::language::{Comparator, EpistemicAtom, Rule};
use epirules::metrics::ConfidenceMode;
use epirules::model::{InfluenceTuple, RelationSet};
use epirules::pipeline::{ExperimentConfig, Pipeline};
use epirules::value::{validate_value_set, RestrictedValueSet, Value};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum St {
    B,
    D,
    N,
}

fn holds(op: Comparator, lhs: u32, rhs: u32) -> bool {
    match op {
        Comparator::Eq => lhs == rhs,
        Comparator::Ne => lhs != rhs,
        Comparator::Ge => lhs >= rhs,
        Comparator::Le => lhs <= rhs,
        Comparator::Gt => lhs > rhs,
        Comparator::Lt => lhs < rhs,
    }
}

fn atom_true(atom: &EpistemicAtom, item: &DataItem) -> bool {
    holds(
        atom.op,
        item.get(&atom.arg).expect("value present").numerator(),
        atom.val.numerator(),
    )
}

fn value_stance(hundredths: u32) -> St {
    match hundredths {
        h if h > 50 => St::B,
        h if h < 50 => St::D,
        _ => St::N,
    }
}

/// Stance shared by every hundredth the atom admits; an atom admitting 0.5
/// together with values below it reads as disbelieved.
fn atom_stance(atom: &EpistemicAtom) -> Option<St> {
    let admitted: Vec<u32> = (0..=100).filter(|&h| holds(atom.op, h, atom.val.numerator())).collect();
    if admitted.is_empty() {
        return None;
    }
    if admitted.iter().all(|&h| h > 50) {
        Some(St::B)
    } else if admitted == [50] {
        Some(St::N)
    } else if admitted.iter().all(|&h| h <= 50) {
        Some(St::D)
    } else {
        None
    }
}

/// True when the stance pattern meets one of C1..C6 for the given tags.
fn irrational(infl: &[Option<St>], tags: &[u8], target: Option<St>) -> bool {
    let att: Vec<Option<St>> = infl
        .iter()
        .zip(tags)
        .filter(|(_, &t)| t == 0)
        .map(|(s, _)| *s)
        .collect();
    let sup: Vec<Option<St>> = infl
        .iter()
        .zip(tags)
        .filter(|(_, &t)| t == 1)
        .map(|(s, _)| *s)
        .collect();
    let any_b = |xs: &[Option<St>]| xs.contains(&Some(St::B));
    let all_d = |xs: &[Option<St>]| xs.iter().all(|s| *s == Some(St::D));
    let tb = target == Some(St::B);
    let td = target == Some(St::D);
    if sup.is_empty() {
        (any_b(&att) && tb) || (all_d(&att) && td)
    } else if att.is_empty() {
        (any_b(&sup) && td) || (all_d(&sup) && tb)
    } else {
        (all_d(&att) && any_b(&sup) && td) || (all_d(&sup) && any_b(&att) && tb)
    }
}

fn oracle_nearest(v: u32, set: &[u32]) -> u32 {
    let (lo, hi) = if v <= 50 { (v, 50) } else { (50, v) };
    *set.iter()
        .filter(|&&c| lo <= c && c <= hi)
        .min_by_key(|&&c| c.abs_diff(v))
        .expect("0.5 in set")
}

fn multi_atom(arg: &str, v: u32, set: &[u32]) -> EpistemicAtom {
    let n = oracle_nearest(v, set);
    let op = if v > n {
        Comparator::Gt
    } else if v < n {
        Comparator::Lt
    } else if v > 50 {
        Comparator::Ge
    } else {
        Comparator::Le
    };
    EpistemicAtom::new(arg, op, Value::hundredths(n))
}

fn two_atom(arg: &str, v: u32) -> EpistemicAtom {
    let op = if v > 50 { Comparator::Gt } else { Comparator::Le };
    EpistemicAtom::new(arg, op, Value::HALF)
}

fn subsets_up_to<T: Clone>(items: &[T], cap: usize) -> Vec<Vec<T>> {
    let n = items.len();
    (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize <= cap)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| items[i].clone()).collect())
        .collect()
}

/// Exhaustive learner: every surviving row's generalized rule and all its
/// condition subsets, scored by full row scans.
pub fn oracle_learn(
    train: &Dataset,
    tuple: &InfluenceTuple,
    rel: &RelationSet,
    cfg: &ExperimentConfig,
) -> BTreeSet<Rule> {
    let set: Vec<u32> = cfg.value_set.iter().map(Value::numerator).collect();
    let tags: Vec<u8> = rel.tags().iter().map(|r| r.tag()).collect();
    let target = tuple.target();
    let mut candidates = BTreeSet::new();
    for item in train.items() {
        let raw: Vec<u32> = tuple
            .influencers()
            .iter()
            .map(|a| item.get(a).unwrap().numerator())
            .collect();
        let raw_t = item.get(target).unwrap().numerator();
        let (conds, head) = match cfg.pipeline {
            Pipeline::TwoWay => (
                tuple
                    .influencers()
                    .iter()
                    .zip(&raw)
                    .map(|(a, &v)| two_atom(a, v))
                    .collect::<Vec<_>>(),
                two_atom(target, raw_t),
            ),
            Pipeline::MultiWay => {
                let exact: Vec<Option<St>> = raw.iter().map(|&v| Some(value_stance(v))).collect();
                if irrational(&exact, &tags, Some(value_stance(raw_t))) {
                    continue;
                }
                let conds: Vec<_> = tuple
                    .influencers()
                    .iter()
                    .zip(&raw)
                    .map(|(a, &v)| multi_atom(a, v, &set))
                    .collect();
                let head = multi_atom(target, raw_t, &set);
                let general: Vec<Option<St>> = conds.iter().map(atom_stance).collect();
                if irrational(&general, &tags, atom_stance(&head)) {
                    continue;
                }
                (conds, head)
            }
        };
        for sub in subsets_up_to(&conds, cfg.max_conditions) {
            candidates.insert(Rule::new(sub, head.clone()).unwrap());
        }
    }

    let n = train.len() as u64;
    let best: Vec<Rule> = candidates
        .into_iter()
        .filter(|r| {
            let mut fired = 0u64;
            let mut agrees = 0u64;
            let mut correct = 0u64;
            for item in train.items() {
                let f = r.conditions().iter().all(|c| atom_true(c, item));
                let a = atom_true(r.head(), item);
                fired += f as u64;
                agrees += a as u64;
                correct += (f && a) as u64;
            }
            if fired == 0 || agrees == 0 {
                return false;
            }
            let support = Ratio::new(fired, n);
            let confidence = match cfg.confidence_mode {
                ConfidenceMode::Fired => Ratio::new(correct, fired),
                ConfidenceMode::Dataset => Ratio::new(correct, n),
            };
            let lift = Ratio::new(correct * n, fired * agrees);
            support > cfg.tau_support && confidence > cfg.tau_confidence && lift > Ratio::from_integer(1)
        })
        .collect();

    best.iter()
        .filter(|r| {
            let mine: BTreeSet<&EpistemicAtom> = r.conditions().iter().collect();
            !best.iter().any(|o| {
                let theirs: BTreeSet<&EpistemicAtom> = o.conditions().iter().collect();
                o.head() == r.head() && theirs.len() < mine.len() && theirs.is_subset(&mine)
            })
        })
        .cloned()
        .collect()
}

/// Independent stance audit of a learnt rule set: counts rules whose atom
/// stances meet a principle.
pub fn oracle_audit(rules: &BTreeSet<Rule>, tuple: &InfluenceTuple, rel: &RelationSet) -> usize {
    let tags: Vec<u8> = rel.tags().iter().map(|r| r.tag()).collect();
    rules
        .iter()
        .filter(|r| r.head().arg == tuple.target())
        .filter(|r| {
            let stances: Vec<Option<St>> = tuple
                .influencers()
                .iter()
                .map(|a| r.condition_for(a).and_then(atom_stance))
                .collect();
            irrational(&stances, &tags, atom_stance(r.head()))
        })
        .count()
}

/// Pairwise closure check over hundredths, straight from the definition.
pub fn closure_oracle(values: &[u32]) -> bool {
    let set: BTreeSet<u32> = values.iter().copied().collect();
    if !set.contains(&100) {
        return false;
    }
    set.iter().all(|&x| {
        set.iter()
            .all(|&y| (x + y > 100 || set.contains(&(x + y))) && (x < y || set.contains(&(x - y))))
    })
}

pub fn three() -> RestrictedValueSet {
    RestrictedValueSet::two_way()
}

pub fn five() -> RestrictedValueSet {
    RestrictedValueSet::uniform(4).unwrap()
}

pub fn eleven() -> RestrictedValueSet {
    RestrictedValueSet::uniform(10).unwrap()
}

pub fn set_of(items: &[&str]) -> RestrictedValueSet {
    validate_value_set(&items.iter().map(|s| s.parse().unwrap()).collect::<Vec<Value>>()).unwrap()
}

/// A small random instance: up to `max_infl` influencers over the 11-point
/// grid, values skewed towards 0, 0.5 and 1 so that boundary cases show up.
pub fn random_instance(rng: &mut impl Rng, max_rows: usize, max_infl: usize) -> (Dataset, InfluenceTuple, RelationSet) {
    let n_infl = rng.gen_range(1..=max_infl);
    let rows = rng.gen_range(1..=max_rows);
    let names: Vec<String> = (0..n_infl).map(|i| format!("X{i}")).collect();
    let tags: Vec<u8> = (0..n_infl).map(|_| rng.gen_range(0..=1)).collect();
    let mut args = names.clone();
    args.push("Y".into());
    let items = (0..rows)
        .map(|r| {
            let values = args.iter().map(|a| {
                let t = match rng.gen_range(0..6) {
                    0 => 5,
                    1 => *[0, 10].get(rng.gen_range(0..2)).unwrap(),
                    _ => rng.gen_range(0..=10),
                };
                (a.clone(), Value::hundredths(t * 10))
            });
            DataItem::new(format!("r{r}"), values.collect::<Vec<_>>())
        })
        .collect();
    (
        Dataset::new(args, items).unwrap(),
        InfluenceTuple::new(names, "Y").unwrap(),
        RelationSet::from_tags(&tags).unwrap(),
    )
}

pub fn random_thresholds(rng: &mut impl Rng, cfg: &mut ExperimentConfig) {
    let supports = [(0, 1), (1, 10), (1, 5), (2, 5)];
    let confidences = [(0, 1), (1, 2), (4, 5)];
    let (n, d) = supports[rng.gen_range(0..supports.len())];
    cfg.tau_support = Ratio::new(n, d);
    let (n, d) = confidences[rng.gen_range(0..confidences.len())];
    cfg.tau_confidence = Ratio::new(n, d);
    cfg.confidence_mode = if rng.gen_bool(0.8) {
        ConfidenceMode::Fired
    } else {
        ConfidenceMode::Dataset
    };
}
