//! Stances and the six rationality principles.
//!
//! Which pair of principles applies depends on the relation profile of the
//! influence tuple: attack-only tuples use C1/C2, support-only tuples C3/C4
//! and mixed tuples C5/C6.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::generalize::ExactRule;
use crate::language::{Comparator, EpistemicAtom, Rule};
use crate::model::{attackers, supporters, InfluenceTuple, ModelError, RelationSet};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stance {
    Believed,
    Disbelieved,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrincipleId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl PrincipleId {
    pub const ALL: [PrincipleId; 6] = [
        PrincipleId::C1,
        PrincipleId::C2,
        PrincipleId::C3,
        PrincipleId::C4,
        PrincipleId::C5,
        PrincipleId::C6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrincipleId::C1 => "incoherent",
            PrincipleId::C2 => "non-reinstated",
            PrincipleId::C3 => "non-conclusive",
            PrincipleId::C4 => "non-grounded",
            PrincipleId::C5 => "gen-nonconclusive",
            PrincipleId::C6 => "gen-nongrounded",
        }
    }
}

impl fmt::Display for PrincipleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl Serialize for PrincipleId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalityError {
    #[error("tuple has neither attackers nor supporters")]
    EmptyRelationSet,
    #[error("{0} is both an attacker and a supporter")]
    OverlappingRelations(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub fn stance_of_value(v: Value) -> Stance {
    match v.cmp(&Value::HALF) {
        std::cmp::Ordering::Greater => Stance::Believed,
        std::cmp::Ordering::Less => Stance::Disbelieved,
        std::cmp::Ordering::Equal => Stance::Neutral,
    }
}

/// The stance every belief satisfying the atom shares, or `None` when the
/// atom admits beliefs with different stances. `<= 0.5` counts as
/// disbelieved, matching the 2-way step.
pub fn stance_of_atom(atom: &EpistemicAtom) -> Option<Stance> {
    let v = atom.val;
    match atom.op {
        Comparator::Eq => Some(stance_of_value(v)),
        Comparator::Ne => None,
        Comparator::Gt if v >= Value::HALF => Some(Stance::Believed),
        Comparator::Ge if v > Value::HALF => Some(Stance::Believed),
        Comparator::Lt if v <= Value::HALF => Some(Stance::Disbelieved),
        Comparator::Le if v <= Value::HALF => Some(Stance::Disbelieved),
        _ => None,
    }
}

/// Stances of influencers and target; `None` (or a missing entry) is
/// indeterminate.
pub type StanceMap = BTreeMap<String, Option<Stance>>;

/// The principle the stance assignment meets, if any. Universal premises
/// need every member strictly disbelieved; existential ones need a member
/// believed.
pub fn check_principles(
    stances: &StanceMap,
    target: &str,
    att: &BTreeSet<String>,
    sup: &BTreeSet<String>,
) -> Result<Option<PrincipleId>, RationalityError> {
    if att.is_empty() && sup.is_empty() {
        return Err(RationalityError::EmptyRelationSet);
    }
    if let Some(both) = att.intersection(sup).next() {
        return Err(RationalityError::OverlappingRelations(both.clone()));
    }
    let stance = |arg: &str| stances.get(arg).copied().flatten();
    let some_believed = |set: &BTreeSet<String>| set.iter().any(|a| stance(a) == Some(Stance::Believed));
    let all_disbelieved = |set: &BTreeSet<String>| set.iter().all(|a| stance(a) == Some(Stance::Disbelieved));
    let target = stance(target);
    let believed = target == Some(Stance::Believed);
    let disbelieved = target == Some(Stance::Disbelieved);

    let found = if sup.is_empty() {
        if some_believed(att) && believed {
            Some(PrincipleId::C1)
        } else if all_disbelieved(att) && disbelieved {
            Some(PrincipleId::C2)
        } else {
            None
        }
    } else if att.is_empty() {
        if some_believed(sup) && disbelieved {
            Some(PrincipleId::C3)
        } else if all_disbelieved(sup) && believed {
            Some(PrincipleId::C4)
        } else {
            None
        }
    } else if all_disbelieved(att) && some_believed(sup) && disbelieved {
        Some(PrincipleId::C5)
    } else if all_disbelieved(sup) && some_believed(att) && believed {
        Some(PrincipleId::C6)
    } else {
        None
    };
    Ok(found)
}

/// Attackers and supporters of a tuple, resolved once.
#[derive(Debug, Clone)]
pub struct RelationProfile {
    target: String,
    att: BTreeSet<String>,
    sup: BTreeSet<String>,
}

impl RelationProfile {
    pub fn new(tuple: &InfluenceTuple, rel: &RelationSet) -> Result<RelationProfile, RationalityError> {
        Ok(RelationProfile {
            target: tuple.target().to_string(),
            att: attackers(tuple, rel)?,
            sup: supporters(tuple, rel)?,
        })
    }

    pub fn check(&self, stances: &StanceMap) -> Option<PrincipleId> {
        check_principles(stances, &self.target, &self.att, &self.sup)
            .expect("profile built from an aligned, nonempty relation set")
    }

    /// Principle met by an exact rule, judging stances of the raw values.
    pub fn check_exact(&self, rule: &ExactRule) -> Option<PrincipleId> {
        let (head, head_value) = rule.head();
        let mut stances: StanceMap = rule
            .conditions()
            .iter()
            .map(|(a, v)| (a.clone(), Some(stance_of_value(*v))))
            .collect();
        stances.insert(head.to_string(), Some(stance_of_value(head_value)));
        self.check(&stances)
    }

    /// Principle whose premise a generalized rule entails. Rules for a
    /// different target never match.
    pub fn check_rule(&self, rule: &Rule) -> Option<PrincipleId> {
        if rule.head().arg != self.target {
            return None;
        }
        let mut stances: StanceMap = rule
            .conditions()
            .iter()
            .map(|c| (c.arg.clone(), stance_of_atom(c)))
            .collect();
        stances.insert(self.target.clone(), stance_of_atom(rule.head()));
        self.check(&stances)
    }
}

/// Exact rules meeting no principle.
pub fn rational_filter(
    rules: &[ExactRule],
    tuple: &InfluenceTuple,
    rel: &RelationSet,
) -> Result<Vec<ExactRule>, RationalityError> {
    let profile = RelationProfile::new(tuple, rel)?;
    Ok(rules
        .iter()
        .filter(|r| profile.check_exact(r).is_none())
        .cloned()
        .collect())
}

/// Irrational rule counts, overall and per principle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub irrational: usize,
    pub by_principle: BTreeMap<PrincipleId, usize>,
}

impl Default for AuditReport {
    fn default() -> Self {
        AuditReport {
            irrational: 0,
            by_principle: PrincipleId::ALL.iter().map(|&p| (p, 0)).collect(),
        }
    }
}

impl AuditReport {
    pub fn record(&mut self, principle: PrincipleId) {
        self.irrational += 1;
        *self.by_principle.entry(principle).or_default() += 1;
    }

    pub fn merge(&mut self, other: &AuditReport) {
        self.irrational += other.irrational;
        for (p, n) in &other.by_principle {
            *self.by_principle.entry(*p).or_default() += n;
        }
    }
}

pub fn audit_report<'a>(
    rules: impl IntoIterator<Item = &'a Rule>,
    tuple: &InfluenceTuple,
    rel: &RelationSet,
) -> Result<AuditReport, RationalityError> {
    let profile = RelationProfile::new(tuple, rel)?;
    let mut report = AuditReport::default();
    for rule in rules {
        if let Some(p) = profile.check_rule(rule) {
            report.record(p);
        }
    }
    Ok(report)
}

pub fn audit_irrational<'a>(
    rules: impl IntoIterator<Item = &'a Rule>,
    tuple: &InfluenceTuple,
    rel: &RelationSet,
) -> Result<usize, RationalityError> {
    Ok(audit_report(rules, tuple, rel)?.irrational)
}
