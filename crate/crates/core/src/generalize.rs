//! From data items to candidate rules.
//!
//! The 2-way step compares every value against 0.5. The multi-way step first
//! records the raw values as an equality rule ([`pre_gen`]) and then re-states
//! each atom against its Nearest value in a restricted value set
//! ([`multi_way_gen`]).

use std::collections::BTreeSet;

use crate::dataset::{DataError, DataItem};
use crate::language::{Comparator, EpistemicAtom, Rule};
use crate::model::InfluenceTuple;
use crate::value::{nearest, RestrictedValueSet, Value, ValueError};

/// A rule of equality atoms over raw data values, one condition per
/// influencer in tuple order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactRule {
    conditions: Vec<(String, Value)>,
    head: (String, Value),
}

impl ExactRule {
    pub fn conditions(&self) -> &[(String, Value)] {
        &self.conditions
    }

    pub fn head(&self) -> (&str, Value) {
        (&self.head.0, self.head.1)
    }

    pub fn to_rule(&self) -> Rule {
        let atom = |(arg, v): &(String, Value)| EpistemicAtom::new(arg.clone(), Comparator::Eq, *v);
        Rule::new(self.conditions.iter().map(atom).collect(), atom(&self.head))
            .expect("influence tuples satisfy the rule invariants")
    }
}

/// Comparator of the 2-way step: `>` above 0.5, `<=` otherwise.
fn two_way_atom(arg: &str, v: Value) -> EpistemicAtom {
    let op = if v > Value::HALF {
        Comparator::Gt
    } else {
        Comparator::Le
    };
    EpistemicAtom::new(arg, op, Value::HALF)
}

pub fn two_way_gen(item: &DataItem, tuple: &InfluenceTuple) -> Result<Rule, DataError> {
    let conditions = tuple
        .influencers()
        .iter()
        .map(|a| Ok(two_way_atom(a, item.value(a)?)))
        .collect::<Result<Vec<_>, DataError>>()?;
    let head = two_way_atom(tuple.target(), item.value(tuple.target())?);
    Ok(Rule::new(conditions, head).expect("influence tuples satisfy the rule invariants"))
}

pub fn pre_gen(item: &DataItem, tuple: &InfluenceTuple) -> Result<ExactRule, DataError> {
    let conditions = tuple
        .influencers()
        .iter()
        .map(|a| Ok((a.clone(), item.value(a)?)))
        .collect::<Result<Vec<_>, DataError>>()?;
    let head = (tuple.target().to_string(), item.value(tuple.target())?);
    Ok(ExactRule { conditions, head })
}

/// The atom the multi-way step emits for a raw value `v`.
///
/// `v = N(v) = 0.5` becomes `<= 0.5`, matching the 2-way step's treatment of
/// 0.5 as not believed.
pub fn multi_way_atom(arg: &str, v: Value, set: &RestrictedValueSet) -> Result<EpistemicAtom, ValueError> {
    let n = nearest(v, set)?;
    let op = if v > n {
        Comparator::Gt
    } else if v < n {
        Comparator::Lt
    } else if v > Value::HALF {
        Comparator::Ge
    } else {
        Comparator::Le
    };
    Ok(EpistemicAtom::new(arg, op, n))
}

pub fn multi_way_gen(rule: &ExactRule, set: &RestrictedValueSet) -> Result<Rule, ValueError> {
    let conditions = rule
        .conditions
        .iter()
        .map(|(a, v)| multi_way_atom(a, *v, set))
        .collect::<Result<Vec<_>, _>>()?;
    let head = multi_way_atom(&rule.head.0, rule.head.1, set)?;
    Ok(Rule::new(conditions, head).expect("exact rules satisfy the rule invariants"))
}

/// Every rule with the same head and a nonempty subset of at most
/// `max_conditions` of the conditions.
pub fn expand_subrules(rule: &Rule, max_conditions: usize) -> BTreeSet<Rule> {
    let conditions = rule.conditions();
    let n = conditions.len();
    let mut out = BTreeSet::new();
    let mut chosen = Vec::with_capacity(max_conditions.min(n));
    subsets(n, max_conditions, 0, &mut chosen, &mut |idx| {
        let subset = idx.iter().map(|&i| conditions[i].clone()).collect();
        out.insert(Rule::new(subset, rule.head().clone()).expect("subset of a valid rule"));
    });
    out
}

fn subsets(n: usize, cap: usize, start: usize, chosen: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    for i in start..n {
        chosen.push(i);
        emit(chosen);
        if chosen.len() < cap {
            subsets(n, cap, i + 1, chosen, emit);
        }
        chosen.pop();
    }
}
