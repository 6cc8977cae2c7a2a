//! Hand-built domain model: influence tuples, their attack/support tags and
//! the bipolar graph they induce.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("influence tuple for {0} has no influencers")]
    NoInfluencers(String),
    #[error("target {0} is listed among its own influencers")]
    TargetIsInfluencer(String),
    #[error("influencer {0} is listed twice")]
    DuplicateInfluencer(String),
    #[error("relation set is empty")]
    EmptyRelationSet,
    #[error("relation tag {0} is neither 0 (attack) nor 1 (support)")]
    BadTag(u8),
    #[error("{tags} relation tags for {influencers} influencers")]
    LengthMismatch { tags: usize, influencers: usize },
    #[error("relation map has no entry for influencer {0}")]
    MissingRelation(String),
    #[error("relation map names {0}, which is not an influencer")]
    UnknownRelation(String),
    #[error("edge {from} -> {to} is tagged both attack and support")]
    ConflictingRelation { from: String, to: String },
    #[error("edge {from} -> {to} references an argument outside the graph")]
    DanglingEdge { from: String, to: String },
}

/// Attack (0) or support (1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Attack,
    Support,
}

impl Relation {
    pub fn from_tag(tag: u8) -> Result<Relation, ModelError> {
        match tag {
            0 => Ok(Relation::Attack),
            1 => Ok(Relation::Support),
            other => Err(ModelError::BadTag(other)),
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Relation::Attack => 0,
            Relation::Support => 1,
        }
    }
}

/// Influencers bearing on a single target argument.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfluenceTuple {
    influencers: Vec<String>,
    target: String,
}

impl InfluenceTuple {
    pub fn new<S: Into<String>>(
        influencers: impl IntoIterator<Item = S>,
        target: impl Into<String>,
    ) -> Result<InfluenceTuple, ModelError> {
        let influencers: Vec<String> = influencers.into_iter().map(Into::into).collect();
        let target = target.into();
        if influencers.is_empty() {
            return Err(ModelError::NoInfluencers(target));
        }
        let mut seen = BTreeSet::new();
        for name in &influencers {
            if *name == target {
                return Err(ModelError::TargetIsInfluencer(target));
            }
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateInfluencer(name.clone()));
            }
        }
        Ok(InfluenceTuple { influencers, target })
    }

    pub fn influencers(&self) -> &[String] {
        &self.influencers
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn position(&self, arg: &str) -> Option<usize> {
        self.influencers.iter().position(|a| a == arg)
    }
}

/// Positional relation tags, aligned with an influence tuple's influencers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationSet {
    tags: Vec<Relation>,
}

impl RelationSet {
    pub fn new(tags: Vec<Relation>) -> Result<RelationSet, ModelError> {
        if tags.is_empty() {
            return Err(ModelError::EmptyRelationSet);
        }
        Ok(RelationSet { tags })
    }

    pub fn from_tags(tags: &[u8]) -> Result<RelationSet, ModelError> {
        RelationSet::new(tags.iter().map(|&t| Relation::from_tag(t)).collect::<Result<_, _>>()?)
    }

    pub fn tags(&self) -> &[Relation] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn check_aligned(&self, tuple: &InfluenceTuple) -> Result<(), ModelError> {
        if self.tags.len() != tuple.influencers.len() {
            return Err(ModelError::LengthMismatch {
                tags: self.tags.len(),
                influencers: tuple.influencers.len(),
            });
        }
        Ok(())
    }

    /// Comma-separated tag list, e.g. `1,1,0`.
    pub fn label(&self) -> String {
        self.tags
            .iter()
            .map(|r| r.tag().to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn with_relation(tuple: &InfluenceTuple, rel: &RelationSet, wanted: Relation) -> Result<BTreeSet<String>, ModelError> {
    rel.check_aligned(tuple)?;
    Ok(tuple
        .influencers
        .iter()
        .zip(&rel.tags)
        .filter(|(_, &r)| r == wanted)
        .map(|(a, _)| a.clone())
        .collect())
}

pub fn attackers(tuple: &InfluenceTuple, rel: &RelationSet) -> Result<BTreeSet<String>, ModelError> {
    with_relation(tuple, rel, Relation::Attack)
}

pub fn supporters(tuple: &InfluenceTuple, rel: &RelationSet) -> Result<BTreeSet<String>, ModelError> {
    with_relation(tuple, rel, Relation::Support)
}

/// `⟨A, R_att, R_sup⟩` with disjoint edge sets over known arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipolarGraph {
    arguments: BTreeSet<String>,
    attacks: BTreeSet<(String, String)>,
    supports: BTreeSet<(String, String)>,
}

impl BipolarGraph {
    pub fn new(
        arguments: BTreeSet<String>,
        attacks: BTreeSet<(String, String)>,
        supports: BTreeSet<(String, String)>,
    ) -> Result<BipolarGraph, ModelError> {
        for (from, to) in attacks.iter().chain(&supports) {
            if !arguments.contains(from) || !arguments.contains(to) {
                return Err(ModelError::DanglingEdge {
                    from: from.clone(),
                    to: to.clone(),
                });
            }
        }
        if let Some((from, to)) = attacks.intersection(&supports).next() {
            return Err(ModelError::ConflictingRelation {
                from: from.clone(),
                to: to.clone(),
            });
        }
        Ok(BipolarGraph {
            arguments,
            attacks,
            supports,
        })
    }

    pub fn arguments(&self) -> &BTreeSet<String> {
        &self.arguments
    }

    pub fn attacks(&self) -> &BTreeSet<(String, String)> {
        &self.attacks
    }

    pub fn supports(&self) -> &BTreeSet<(String, String)> {
        &self.supports
    }
}

/// Union of the edges named by each tuple.
pub fn to_graph(tuples: &[(InfluenceTuple, RelationSet)]) -> Result<BipolarGraph, ModelError> {
    let mut edges: BTreeMap<(String, String), Relation> = BTreeMap::new();
    let mut arguments = BTreeSet::new();
    for (tuple, rel) in tuples {
        rel.check_aligned(tuple)?;
        arguments.insert(tuple.target.clone());
        for (from, &relation) in tuple.influencers.iter().zip(&rel.tags) {
            arguments.insert(from.clone());
            let key = (from.clone(), tuple.target.clone());
            match edges.get(&key) {
                Some(&existing) if existing != relation => {
                    return Err(ModelError::ConflictingRelation { from: key.0, to: key.1 })
                }
                _ => {
                    edges.insert(key, relation);
                }
            }
        }
    }
    let (mut attacks, mut supports) = (BTreeSet::new(), BTreeSet::new());
    for (edge, relation) in edges {
        match relation {
            Relation::Attack => attacks.insert(edge),
            Relation::Support => supports.insert(edge),
        };
    }
    BipolarGraph::new(arguments, attacks, supports)
}

/// Relations as written in configuration files: positional tags or a map
/// from influencer name to tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationSpec {
    Positional(Vec<u8>),
    Named(BTreeMap<String, u8>),
}

/// One entry of the `tuples` array in an experiment configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleSpec {
    pub target: String,
    pub influencers: Vec<String>,
    pub relations: RelationSpec,
}

impl TupleSpec {
    pub fn resolve(&self) -> Result<(InfluenceTuple, RelationSet), ModelError> {
        let tuple = InfluenceTuple::new(self.influencers.iter().cloned(), self.target.clone())?;
        let rel = match &self.relations {
            RelationSpec::Positional(tags) => RelationSet::from_tags(tags)?,
            RelationSpec::Named(map) => {
                if let Some(extra) = map.keys().find(|k| tuple.position(k).is_none()) {
                    return Err(ModelError::UnknownRelation(extra.clone()));
                }
                let tags = tuple
                    .influencers
                    .iter()
                    .map(|a| {
                        map.get(a)
                            .copied()
                            .ok_or_else(|| ModelError::MissingRelation(a.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                RelationSet::from_tags(&tags)?
            }
        };
        rel.check_aligned(&tuple)?;
        Ok((tuple, rel))
    }

    pub fn from_model(tuple: &InfluenceTuple, rel: &RelationSet) -> TupleSpec {
        TupleSpec {
            target: tuple.target.clone(),
            influencers: tuple.influencers.clone(),
            relations: RelationSpec::Positional(rel.tags.iter().map(|r| r.tag()).collect()),
        }
    }
}
