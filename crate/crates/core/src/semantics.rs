//! Belief distributions over possible worlds and the satisfaction relation
//! for epistemic formulae.
//!
//! A world is a subset of the arguments, encoded as a bitmask over the
//! distribution's sorted argument list. Worlds not listed have probability 0.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::language::{atom_holds, EpistemicAtom, Rule};
use crate::model::BipolarGraph;
use crate::value::{RestrictedValueSet, Value, DENOMINATOR};

const MAX_ARGUMENTS: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("argument {0} is not part of the distribution")]
    UnknownArgument(String),
    #[error("world {0:?} is listed twice")]
    DuplicateWorld(Vec<String>),
    #[error("world probabilities sum to {0}/{DENOMINATOR}, not 1")]
    NotNormalized(u64),
    #[error("{0} arguments exceed the supported maximum")]
    TooManyArguments(usize),
    #[error("enumeration bound on {bound} exceeded: {actual} > {limit}")]
    CapExceeded {
        bound: &'static str,
        limit: usize,
        actual: usize,
    },
}

/// Boolean combination of epistemic atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EpistemicFormula {
    Atom(EpistemicAtom),
    Not(Box<EpistemicFormula>),
    And(Box<EpistemicFormula>, Box<EpistemicFormula>),
    Or(Box<EpistemicFormula>, Box<EpistemicFormula>),
    /// Sugar for `¬φ ∨ ψ`.
    Implies(Box<EpistemicFormula>, Box<EpistemicFormula>),
}

impl EpistemicFormula {
    pub fn atom(atom: EpistemicAtom) -> Self {
        EpistemicFormula::Atom(atom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        EpistemicFormula::Not(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        EpistemicFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Self) -> Self {
        EpistemicFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Self) -> Self {
        EpistemicFormula::Implies(Box::new(self), Box::new(other))
    }

    pub fn arguments(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_arguments(&mut out);
        out
    }

    fn collect_arguments<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            EpistemicFormula::Atom(a) => {
                out.insert(a.arg.as_str());
            }
            EpistemicFormula::Not(f) => f.collect_arguments(out),
            EpistemicFormula::And(a, b) | EpistemicFormula::Or(a, b) | EpistemicFormula::Implies(a, b) => {
                a.collect_arguments(out);
                b.collect_arguments(out);
            }
        }
    }
}

impl From<EpistemicAtom> for EpistemicFormula {
    fn from(atom: EpistemicAtom) -> Self {
        EpistemicFormula::Atom(atom)
    }
}

impl From<&Rule> for EpistemicFormula {
    fn from(rule: &Rule) -> Self {
        let mut conditions = rule.conditions().iter().cloned().map(EpistemicFormula::Atom);
        let first = conditions.next().expect("rules have at least one condition");
        let body = conditions.fold(first, EpistemicFormula::and);
        body.implies(EpistemicFormula::Atom(rule.head().clone()))
    }
}

/// A probability function over the subsets of a fixed argument set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefDistribution {
    arguments: Vec<String>,
    worlds: BTreeMap<u64, Value>,
}

impl BeliefDistribution {
    pub fn new<A, W, S>(arguments: A, worlds: W) -> Result<BeliefDistribution, SemanticsError>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        W: IntoIterator<Item = (S, Value)>,
        S: IntoIterator,
        S::Item: AsRef<str>,
    {
        let arguments: BTreeSet<String> = arguments.into_iter().map(Into::into).collect();
        let arguments: Vec<String> = arguments.into_iter().collect();
        if arguments.len() > MAX_ARGUMENTS {
            return Err(SemanticsError::TooManyArguments(arguments.len()));
        }
        let mut dist = BeliefDistribution {
            arguments,
            worlds: BTreeMap::new(),
        };
        let mut total = 0u64;
        for (world, p) in worlds {
            let names: Vec<String> = world.into_iter().map(|s| s.as_ref().to_string()).collect();
            let mask = dist.mask_of(&names)?;
            if dist.worlds.contains_key(&mask) {
                return Err(SemanticsError::DuplicateWorld(names));
            }
            total += u64::from(p.numerator());
            // zero worlds stay until the end so duplicates are still caught
            dist.worlds.insert(mask, p);
        }
        dist.worlds.retain(|_, p| *p != Value::ZERO);
        if total != u64::from(DENOMINATOR) {
            return Err(SemanticsError::NotNormalized(total));
        }
        Ok(dist)
    }

    fn index_of(&self, arg: &str) -> Option<usize> {
        self.arguments.binary_search_by(|a| a.as_str().cmp(arg)).ok()
    }

    fn mask_of(&self, names: &[String]) -> Result<u64, SemanticsError> {
        let mut mask = 0u64;
        for name in names {
            let i = self
                .index_of(name)
                .ok_or_else(|| SemanticsError::UnknownArgument(name.clone()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub fn arguments(&self) -> &[String] {
        &self.arguments
    }

    /// Nonzero worlds with their probabilities.
    pub fn worlds(&self) -> impl Iterator<Item = (Vec<&str>, Value)> + '_ {
        self.worlds.iter().map(move |(&mask, &p)| {
            let members = self
                .arguments
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| a.as_str())
                .collect();
            (members, p)
        })
    }

    pub fn probability_of<S: AsRef<str>>(&self, world: &[S]) -> Result<Value, SemanticsError> {
        let names: Vec<String> = world.iter().map(|s| s.as_ref().to_string()).collect();
        let mask = self.mask_of(&names)?;
        Ok(self.worlds.get(&mask).copied().unwrap_or(Value::ZERO))
    }
}

/// `P(α)`: the total probability of the worlds containing `α`.
pub fn marginal(dist: &BeliefDistribution, arg: &str) -> Result<Value, SemanticsError> {
    let i = dist
        .index_of(arg)
        .ok_or_else(|| SemanticsError::UnknownArgument(arg.to_string()))?;
    let sum: u32 = dist
        .worlds
        .iter()
        .filter(|(&mask, _)| mask & (1 << i) != 0)
        .map(|(_, p)| p.numerator())
        .sum();
    Ok(Value::new(sum).expect("marginal of a normalized distribution"))
}

pub fn satisfies(dist: &BeliefDistribution, formula: &EpistemicFormula) -> Result<bool, SemanticsError> {
    if let Some(unknown) = formula.arguments().into_iter().find(|a| dist.index_of(a).is_none()) {
        return Err(SemanticsError::UnknownArgument(unknown.to_string()));
    }
    eval(dist, formula)
}

fn eval(dist: &BeliefDistribution, formula: &EpistemicFormula) -> Result<bool, SemanticsError> {
    Ok(match formula {
        EpistemicFormula::Atom(atom) => atom_holds(atom, marginal(dist, &atom.arg)?),
        EpistemicFormula::Not(f) => !eval(dist, f)?,
        EpistemicFormula::And(a, b) => eval(dist, a)? && eval(dist, b)?,
        EpistemicFormula::Or(a, b) => eval(dist, a)? || eval(dist, b)?,
        EpistemicFormula::Implies(a, b) => !eval(dist, a)? || eval(dist, b)?,
    })
}

/// Coherence: every attack `(a, b)` has `P(a) <= 1 - P(b)`. Graph arguments
/// outside the distribution have belief 0.
pub fn is_coherent(dist: &BeliefDistribution, graph: &BipolarGraph) -> bool {
    let belief = |arg: &str| marginal(dist, arg).unwrap_or(Value::ZERO);
    graph.attacks().iter().all(|(a, b)| belief(a) <= belief(b).complement())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCaps {
    pub max_arguments: usize,
    pub max_values: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        EnumerationCaps {
            max_arguments: 4,
            max_values: 5,
        }
    }
}

/// Every distribution over the graph's arguments whose world probabilities
/// all lie in `set`, each produced once.
pub fn enumerate_restricted(
    graph: &BipolarGraph,
    set: &RestrictedValueSet,
    caps: EnumerationCaps,
) -> Result<RestrictedDistributions, SemanticsError> {
    enumerate_restricted_over(graph.arguments().iter().cloned(), set, caps)
}

pub fn enumerate_restricted_over(
    arguments: impl IntoIterator<Item = String>,
    set: &RestrictedValueSet,
    caps: EnumerationCaps,
) -> Result<RestrictedDistributions, SemanticsError> {
    let arguments: Vec<String> = arguments.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    if arguments.len() > caps.max_arguments {
        return Err(SemanticsError::CapExceeded {
            bound: "arguments",
            limit: caps.max_arguments,
            actual: arguments.len(),
        });
    }
    if set.len() > caps.max_values {
        return Err(SemanticsError::CapExceeded {
            bound: "values",
            limit: caps.max_values,
            actual: set.len(),
        });
    }
    Ok(RestrictedDistributions::new(arguments, set))
}

/// Lazy depth-first walk over the compositions of 1 into `2^n` parts drawn
/// from a restricted value set.
#[derive(Debug, Clone)]
pub struct RestrictedDistributions {
    arguments: Vec<String>,
    values: Vec<Value>,
    /// index into `values` for every world but the last
    choice: Vec<usize>,
    /// mass left before assigning world `i`
    remaining: Vec<u32>,
    done: bool,
}

impl RestrictedDistributions {
    fn new(arguments: Vec<String>, set: &RestrictedValueSet) -> Self {
        let worlds = 1usize << arguments.len();
        let mut walk = RestrictedDistributions {
            arguments,
            values: set.values().to_vec(),
            choice: vec![0; worlds - 1],
            remaining: vec![0; worlds],
            done: false,
        };
        walk.remaining[0] = DENOMINATOR;
        walk.descend(0);
        walk
    }

    fn descend(&mut self, from: usize) {
        // values[0] is 0 in every valid set
        for d in from..self.choice.len() {
            self.choice[d] = 0;
            self.remaining[d + 1] = self.remaining[d] - self.values[0].numerator();
        }
    }

    fn advance(&mut self) {
        for d in (0..self.choice.len()).rev() {
            let next = self.choice[d] + 1;
            if next < self.values.len() && self.values[next].numerator() <= self.remaining[d] {
                self.choice[d] = next;
                self.remaining[d + 1] = self.remaining[d] - self.values[next].numerator();
                self.descend(d + 1);
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for RestrictedDistributions {
    type Item = BeliefDistribution;

    fn next(&mut self) -> Option<BeliefDistribution> {
        while !self.done {
            let last = *self.remaining.last().expect("at least one world");
            let leaf = Value::new(last).ok().filter(|v| self.values.contains(v));
            let mut worlds = BTreeMap::new();
            if let Some(last_value) = leaf {
                for (mask, &c) in self.choice.iter().enumerate() {
                    if self.values[c] != Value::ZERO {
                        worlds.insert(mask as u64, self.values[c]);
                    }
                }
                if last_value != Value::ZERO {
                    worlds.insert(self.choice.len() as u64, last_value);
                }
            }
            self.advance();
            if leaf.is_some() {
                return Some(BeliefDistribution {
                    arguments: self.arguments.clone(),
                    worlds,
                });
            }
        }
        None
    }
}

#[derive(Serialize, Deserialize)]
struct WorldRepr {
    set: Vec<String>,
    p: Value,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arguments: Option<Vec<String>>,
    worlds: Vec<WorldRepr>,
}

impl Serialize for BeliefDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DistributionRepr {
            arguments: Some(self.arguments.clone()),
            worlds: self
                .worlds()
                .map(|(set, p)| WorldRepr {
                    set: set.into_iter().map(String::from).collect(),
                    p,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BeliefDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = DistributionRepr::deserialize(deserializer)?;
        let arguments = repr
            .arguments
            .unwrap_or_else(|| repr.worlds.iter().flat_map(|w| w.set.iter().cloned()).collect());
        BeliefDistribution::new(arguments, repr.worlds.into_iter().map(|w| (w.set, w.p)))
            .map_err(serde::de::Error::custom)
    }
}
