//! Rule quality on a dataset: fired / agrees / correct counts, Support,
//! Confidence and Lift, and the Best and Simplest selections.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{DataError, DataItem, Dataset};
use crate::decimal::Rational;
use crate::language::{atom_holds, EpistemicAtom, Rule};

/// Denominator used for Confidence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfidenceMode {
    /// correct / fired
    #[default]
    Fired,
    /// correct / |D|
    Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub fired: bool,
    pub agrees: bool,
    pub correct: bool,
}

fn holds_on(atom: &EpistemicAtom, item: &DataItem) -> Result<bool, DataError> {
    Ok(atom_holds(atom, item.value(&atom.arg)?))
}

/// Conditions and head are compared numerically against the item's values.
pub fn classify(rule: &Rule, item: &DataItem) -> Result<Classification, DataError> {
    let mut fired = true;
    for c in rule.conditions() {
        // evaluate every condition so missing values are always reported
        fired &= holds_on(c, item)?;
    }
    let agrees = holds_on(rule.head(), item)?;
    Ok(Classification {
        fired,
        agrees,
        correct: fired && agrees,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleStats {
    pub fired_count: u64,
    pub agrees_count: u64,
    pub correct_count: u64,
    pub dataset_size: u64,
    pub support: Rational,
    pub confidence: Rational,
    /// `None` when nothing fires or nothing agrees.
    pub lift: Option<Rational>,
}

impl RuleStats {
    /// Builds the rationals from raw counts. `dataset_size` must be positive.
    pub fn from_counts(fired: u64, agrees: u64, correct: u64, size: u64, mode: ConfidenceMode) -> RuleStats {
        let confidence = match mode {
            ConfidenceMode::Fired if fired == 0 => Rational::from_integer(0),
            ConfidenceMode::Fired => Rational::new(correct, fired),
            ConfidenceMode::Dataset => Rational::new(correct, size),
        };
        let lift = (fired > 0 && agrees > 0).then(|| Rational::new(correct * size, fired * agrees));
        RuleStats {
            fired_count: fired,
            agrees_count: agrees,
            correct_count: correct,
            dataset_size: size,
            support: Rational::new(fired, size),
            confidence,
            lift,
        }
    }

    /// The three strict thresholds of Best.
    pub fn is_best(&self, thresholds: &Thresholds) -> bool {
        self.support > thresholds.support
            && self.confidence > thresholds.confidence
            && self.lift.is_some_and(|l| l > Rational::from_integer(1))
    }
}

pub fn stats(rule: &Rule, dataset: &Dataset, mode: ConfidenceMode) -> Result<RuleStats, DataError> {
    if dataset.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let (mut fired, mut agrees, mut correct) = (0, 0, 0);
    for item in dataset.items() {
        let c = classify(rule, item)?;
        fired += u64::from(c.fired);
        agrees += u64::from(c.agrees);
        correct += u64::from(c.correct);
    }
    Ok(RuleStats::from_counts(
        fired,
        agrees,
        correct,
        dataset.len() as u64,
        mode,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thresholds {
    pub support: Rational,
    pub confidence: Rational,
    pub mode: ConfidenceMode,
}

pub fn best<'a>(
    rules: impl IntoIterator<Item = &'a Rule>,
    dataset: &Dataset,
    thresholds: &Thresholds,
) -> Result<BTreeSet<Rule>, DataError> {
    let mut out = BTreeSet::new();
    for rule in rules {
        if stats(rule, dataset, thresholds.mode)?.is_best(thresholds) {
            out.insert(rule.clone());
        }
    }
    Ok(out)
}

/// Keeps a rule unless another rule with the same head has a strictly
/// smaller condition set.
pub fn simplest(rules: &BTreeSet<Rule>) -> BTreeSet<Rule> {
    let mut by_head: BTreeMap<&EpistemicAtom, Vec<&Rule>> = BTreeMap::new();
    for rule in rules {
        by_head.entry(rule.head()).or_default().push(rule);
    }
    rules
        .iter()
        .filter(|r| {
            !by_head[r.head()]
                .iter()
                .any(|other| other.conditions().len() < r.conditions().len() && other.conditions_subset_of(r))
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::read_csv;
    use crate::language::parse_rule;
    use proptest::prelude::*;

    const DW_ROWS: &str = "id,Dw6,Dw2,Dw5,Dw3\n004,0.2,0.3,0.3,0.3\n026,0.4,0.6,0.3,0.6\n111,0.6,0.1,0.6,0.2\n";

    fn dw_rows() -> Dataset {
        read_csv(DW_ROWS.as_bytes(), None).unwrap()
    }

    fn rule(s: &str) -> Rule {
        parse_rule(s).unwrap()
    }

    fn rows_where(d: &Dataset, r: &Rule, f: impl Fn(Classification) -> bool) -> Vec<String> {
        d.items()
            .iter()
            .filter(|i| f(classify(r, i).unwrap()))
            .map(|i| i.id.clone())
            .collect()
    }

    #[test]
    fn classify_example() {
        let d = dw_rows();
        let r = rule("p(Dw2) > 0.5 -> p(Dw6) < 0.5");
        assert_eq!(rows_where(&d, &r, |c| c.fired), ["026"]);
        assert_eq!(rows_where(&d, &r, |c| c.agrees), ["004", "026"]);
        assert_eq!(rows_where(&d, &r, |c| c.correct), ["026"]);
    }

    #[test]
    fn classify_boundary_and_missing() {
        let r = rule("p(A) <= 0.5 -> p(B) > 0.5");
        let item = DataItem::new("x", [("A", "0.5".parse().unwrap()), ("B", "0.7".parse().unwrap())]);
        assert!(classify(&r, &item).unwrap().correct);
        let partial = DataItem::new("y", [("A", "0.5".parse().unwrap())]);
        assert!(matches!(classify(&r, &partial), Err(DataError::MissingValue { .. })));
    }

    #[test]
    fn stats_example() {
        let d = dw_rows();
        let r = rule("p(Dw2) > 0.5 -> p(Dw6) < 0.5");
        let s = stats(&r, &d, ConfidenceMode::Fired).unwrap();
        assert_eq!(s.support, Rational::new(1, 3));
        assert_eq!(s.confidence, Rational::from_integer(1));
        assert_eq!(s.lift, Some(Rational::new(3, 2)));
        let s = stats(&r, &d, ConfidenceMode::Dataset).unwrap();
        assert_eq!(s.confidence, Rational::new(1, 3));
        let empty = Dataset::new(d.arguments().to_vec(), vec![]).unwrap();
        assert!(matches!(
            stats(&r, &empty, ConfidenceMode::Fired),
            Err(DataError::EmptyDataset)
        ));
    }

    #[test]
    fn undefined_lift() {
        let d = dw_rows();
        let never = rule("p(Dw2) > 0.9 -> p(Dw6) < 0.5");
        let s = stats(&never, &d, ConfidenceMode::Fired).unwrap();
        assert_eq!(s.fired_count, 0);
        assert_eq!(s.lift, None);
        assert_eq!(s.confidence, Rational::from_integer(0));
    }

    fn thresholds(s: (u64, u64), c: (u64, u64)) -> Thresholds {
        Thresholds {
            support: Rational::new(s.0, s.1),
            confidence: Rational::new(c.0, c.1),
            mode: ConfidenceMode::Fired,
        }
    }

    #[test]
    fn best_examples() {
        let d = dw_rows();
        let r = rule("p(Dw2) > 0.5 -> p(Dw6) < 0.5");
        let rules = [r.clone()];
        assert_eq!(
            best(&rules, &d, &thresholds((3, 10), (8, 10))).unwrap(),
            BTreeSet::from([r.clone()])
        );
        // support 1/3 is not above 1/3
        assert!(best(&rules, &d, &thresholds((1, 3), (0, 1))).unwrap().is_empty());

        let at_boundary = RuleStats::from_counts(4, 5, 4, 10, ConfidenceMode::Fired);
        assert_eq!(at_boundary.support, Rational::new(2, 5));
        assert!(!at_boundary.is_best(&thresholds((2, 5), (0, 1))));
        // lift exactly 1: correct * |D| == fired * agrees
        let flat = RuleStats::from_counts(5, 4, 2, 10, ConfidenceMode::Fired);
        assert_eq!(flat.lift, Some(Rational::from_integer(1)));
        assert!(!flat.is_best(&thresholds((0, 1), (0, 1))));
    }

    #[test]
    fn simplest_examples() {
        let ab = rule("p(A) > 0.5 & p(B) > 0.5 -> p(H) > 0.5");
        let a = rule("p(A) > 0.5 -> p(H) > 0.5");
        assert_eq!(
            simplest(&BTreeSet::from([ab.clone(), a.clone()])),
            BTreeSet::from([a.clone()])
        );
        let other_heads = BTreeSet::from([rule("p(A) > 0.5 -> p(H1) > 0.5"), rule("p(B) > 0.5 -> p(H2) > 0.5")]);
        assert_eq!(simplest(&other_heads), other_heads);
        let incomparable = BTreeSet::from([
            rule("p(A) > 0.5 & p(B) > 0.5 -> p(H) > 0.5"),
            rule("p(B) > 0.5 & p(C) > 0.5 -> p(H) > 0.5"),
        ]);
        assert_eq!(simplest(&incomparable), incomparable);
        // same argument, different atom: not a subset
        let different_atom = BTreeSet::from([
            rule("p(A) > 0.5 & p(B) > 0.5 -> p(H) > 0.5"),
            rule("p(A) <= 0.5 -> p(H) > 0.5"),
        ]);
        assert_eq!(simplest(&different_atom), different_atom);
    }

    fn arb_rule() -> impl Strategy<Value = Rule> {
        let atom = |arg: &'static str| {
            (
                prop::sample::select(crate::language::Comparator::ALL.to_vec()),
                0u32..=10,
            )
                .prop_map(move |(op, t)| EpistemicAtom::new(arg, op, crate::value::Value::hundredths(t * 10)))
        };
        (
            prop::option::of(atom("A")),
            prop::option::of(atom("B")),
            atom("C"),
            prop::sample::select(vec!["H1", "H2"]),
            prop::sample::select(crate::language::Comparator::ALL.to_vec()),
        )
            .prop_map(|(a, b, c, h, op)| {
                let conds: Vec<_> = [a, b, Some(c)].into_iter().flatten().collect();
                Rule::new(conds, EpistemicAtom::new(h, op, crate::value::Value::HALF)).unwrap()
            })
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        prop::collection::vec(prop::collection::vec(0u32..=10, 5), 1..15).prop_map(|rows| {
            let args: Vec<String> = ["A", "B", "C", "H1", "H2"].iter().map(|s| s.to_string()).collect();
            let items = rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    DataItem::new(
                        i.to_string(),
                        args.iter()
                            .cloned()
                            .zip(r.iter().map(|t| crate::value::Value::hundredths(t * 10))),
                    )
                })
                .collect();
            Dataset::new(args, items).unwrap()
        })
    }

    proptest! {
        #[test]
        fn stats_invariants(r in arb_rule(), d in arb_dataset()) {
            let s = stats(&r, &d, ConfidenceMode::Fired).unwrap();
            prop_assert!(s.correct_count <= s.fired_count);
            prop_assert!(s.correct_count <= s.agrees_count);
            prop_assert_eq!(s.support, Rational::new(s.fired_count, d.len() as u64));
            prop_assert!(s.confidence <= Rational::from_integer(1));
            let literal = stats(&r, &d, ConfidenceMode::Dataset).unwrap();
            prop_assert!(literal.confidence <= literal.support);
            if let Some(lift) = s.lift {
                let agree_rate = Rational::new(s.agrees_count, d.len() as u64);
                prop_assert_eq!(lift, s.confidence / agree_rate);
            }
            for item in d.items() {
                let c = classify(&r, item).unwrap();
                prop_assert!(!c.correct || (c.fired && c.agrees));
            }
        }

        #[test]
        fn simplest_idempotent(rules in prop::collection::btree_set(arb_rule(), 0..12)) {
            let once = simplest(&rules);
            prop_assert_eq!(simplest(&once), once.clone());
            let mut heads: BTreeMap<&EpistemicAtom, usize> = BTreeMap::new();
            for r in &rules {
                *heads.entry(r.head()).or_default() += 1;
            }
            for r in &rules {
                if heads[r.head()] == 1 {
                    prop_assert!(once.contains(r));
                }
            }
        }
    }
}
