//! Experiment configuration and the learn / evaluate / report stages.

mod evaluate;
mod experiment;
mod learn;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal::{format_rational, parse_rational, Rational};
use crate::language::Rule;
use crate::metrics::{ConfidenceMode, Thresholds};
use crate::model::{InfluenceTuple, ModelError, RelationSet, TupleSpec};
use crate::rationality::{AuditReport, RelationProfile};
use crate::value::{RestrictedValueSet, Value};

pub use evaluate::{evaluate, EvaluationReport};
pub use experiment::{
    baseline_instantiations, benchmark, run_experiment, write_outputs, write_timings, ExperimentResult, GridSpec,
    ReportRow, RuleSetRecord, StatsRecord, TimingRow,
};
pub use learn::{generalize_rows, learn, learn_detailed, select_rules, LearnOutcome};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// 2-way generalization, no rationality filter.
    TwoWay,
    #[default]
    MultiWay,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::TwoWay => "two_way",
            Pipeline::MultiWay => "multi_way",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pipeline {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Pipeline, ConfigError> {
        match s {
            "two_way" => Ok(Pipeline::TwoWay),
            "multi_way" => Ok(Pipeline::MultiWay),
            other => Err(ConfigError::UnknownPipeline(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{field} must lie in [0, 1], got {value}")]
    OutOfUnitRange { field: &'static str, value: String },
    #[error("split_ratio must lie strictly between 0 and 1, got {0}")]
    SplitRatio(String),
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("value set must contain 0.5")]
    HalfMissing,
    #[error("unknown pipeline {0:?}")]
    UnknownPipeline(String),
    #[error("argument {0} is not a dataset column")]
    UnknownArgument(String),
}

/// Settings for one experiment. Build with [`ExperimentConfig::from_json`]
/// or [`ExperimentConfig::new`] and adjust fields before calling
/// [`ExperimentConfig::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub value_set: RestrictedValueSet,
    pub tuples: Vec<(InfluenceTuple, RelationSet)>,
    pub tau_support: Rational,
    pub tau_confidence: Rational,
    pub max_conditions: usize,
    pub split_ratio: Rational,
    pub repetitions: usize,
    pub seed: u64,
    pub confidence_mode: ConfidenceMode,
    pub pipeline: Pipeline,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    value_set: RestrictedValueSet,
    tuples: Vec<TupleSpec>,
    #[serde(default = "default_tau_support")]
    tau_support: String,
    #[serde(default = "default_tau_confidence")]
    tau_confidence: String,
    #[serde(default = "default_max_conditions")]
    max_conditions: usize,
    #[serde(default = "default_repetitions")]
    repetitions: usize,
    #[serde(default = "default_split_ratio")]
    split_ratio: String,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    confidence_mode: ConfidenceMode,
    #[serde(default)]
    pipeline: Pipeline,
}

fn default_tau_support() -> String {
    "0.4".into()
}
fn default_tau_confidence() -> String {
    "0.8".into()
}
fn default_max_conditions() -> usize {
    4
}
fn default_repetitions() -> usize {
    10
}
fn default_split_ratio() -> String {
    "0.8".into()
}

fn rational_field(field: &'static str, text: &str) -> Result<Rational, ConfigError> {
    parse_rational(text).map_err(|_| ConfigError::OutOfUnitRange {
        field,
        value: text.to_string(),
    })
}

impl ExperimentConfig {
    /// Defaults: thresholds 0.4 / 0.8, four conditions, ten repetitions,
    /// an 80/20 split, seed 0, confidence over fired rows, multi-way.
    pub fn new(value_set: RestrictedValueSet, tuples: Vec<(InfluenceTuple, RelationSet)>) -> ExperimentConfig {
        ExperimentConfig {
            value_set,
            tuples,
            tau_support: Rational::new(2, 5),
            tau_confidence: Rational::new(4, 5),
            max_conditions: 4,
            split_ratio: Rational::new(4, 5),
            repetitions: 10,
            seed: 0,
            confidence_mode: ConfidenceMode::Fired,
            pipeline: Pipeline::MultiWay,
        }
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let file: ConfigFile = serde_json::from_str(text)?;
        let tuples = file
            .tuples
            .iter()
            .map(TupleSpec::resolve)
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = ExperimentConfig {
            value_set: file.value_set,
            tuples,
            tau_support: rational_field("tau_support", &file.tau_support)?,
            tau_confidence: rational_field("tau_confidence", &file.tau_confidence)?,
            max_conditions: file.max_conditions,
            split_ratio: parse_rational(&file.split_ratio)
                .map_err(|_| ConfigError::SplitRatio(file.split_ratio.clone()))?,
            repetitions: file.repetitions,
            seed: file.seed,
            confidence_mode: file.confidence_mode,
            pipeline: file.pipeline,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = ConfigFile {
            value_set: self.value_set.clone(),
            tuples: self.tuples.iter().map(|(t, r)| TupleSpec::from_model(t, r)).collect(),
            tau_support: format_rational(&self.tau_support),
            tau_confidence: format_rational(&self.tau_confidence),
            max_conditions: self.max_conditions,
            repetitions: self.repetitions,
            split_ratio: format_rational(&self.split_ratio),
            seed: self.seed,
            confidence_mode: self.confidence_mode,
            pipeline: self.pipeline,
        };
        serde_json::to_string_pretty(&file).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let one = Rational::from_integer(1);
        for (field, value) in [
            ("tau_support", self.tau_support),
            ("tau_confidence", self.tau_confidence),
        ] {
            if value > one {
                return Err(ConfigError::OutOfUnitRange {
                    field,
                    value: format_rational(&value),
                });
            }
        }
        if self.split_ratio >= one || self.split_ratio == Rational::from_integer(0) {
            return Err(ConfigError::SplitRatio(format_rational(&self.split_ratio)));
        }
        if self.max_conditions == 0 {
            return Err(ConfigError::Zero("max_conditions"));
        }
        if self.repetitions == 0 {
            return Err(ConfigError::Zero("repetitions"));
        }
        if !self.value_set.contains(Value::HALF) {
            return Err(ConfigError::HalfMissing);
        }
        for (tuple, rel) in &self.tuples {
            rel.check_aligned(tuple)?;
        }
        Ok(())
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            support: self.tau_support,
            confidence: self.tau_confidence,
            mode: self.confidence_mode,
        }
    }

    /// Every tuple argument must be a column of `arguments`.
    pub fn check_schema(&self, arguments: &[String]) -> Result<(), ConfigError> {
        for (tuple, _) in &self.tuples {
            for arg in tuple.influencers().iter().map(String::as_str).chain([tuple.target()]) {
                if !arguments.iter().any(|a| a == arg) {
                    return Err(ConfigError::UnknownArgument(arg.to_string()));
                }
            }
        }
        Ok(())
    }
}

/// Reads rules from either a rules.json file written by `mine` or a bare
/// array of rules (objects or rule text).
pub fn parse_rules_json(text: &str) -> Result<Vec<Rule>, serde_json::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RulesFile {
        Records(Vec<RuleSetRecord>),
        Bare(Vec<Rule>),
    }
    Ok(match serde_json::from_str(text)? {
        RulesFile::Records(records) => records.into_iter().flat_map(|r| r.rules).collect(),
        RulesFile::Bare(rules) => rules,
    })
}

/// Audits each rule against the tuples whose target is the rule's head.
/// Rules for targets outside the configuration are an error.
pub fn audit_rules(rules: &[Rule], tuples: &[(InfluenceTuple, RelationSet)]) -> Result<AuditReport, crate::Error> {
    let profiles = tuples
        .iter()
        .map(|(t, r)| Ok((t.target(), RelationProfile::new(t, r)?)))
        .collect::<Result<Vec<_>, crate::Error>>()?;
    let mut report = AuditReport::default();
    for rule in rules {
        let target = rule.head().arg.as_str();
        let mut matching = profiles.iter().filter(|(t, _)| *t == target).peekable();
        if matching.peek().is_none() {
            return Err(ConfigError::UnknownArgument(target.to_string()).into());
        }
        if let Some(p) = matching.find_map(|(_, profile)| profile.check_rule(rule)) {
            report.record(p);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONFIG: &str = r#"{
        "value_set": ["0", "0.25", "0.5", "0.75", "1"],
        "tuples": [{"target": "Dw6", "influencers": ["Dw2", "Dw3", "Dw5"], "relations": [1, 1, 0]}],
        "tau_support": "0.4", "tau_confidence": "0.8", "max_conditions": 4,
        "repetitions": 10, "split_ratio": "0.8", "seed": 1, "confidence_mode": "fired"
    }"#;

    #[test]
    fn parses_documented_schema() {
        let cfg = ExperimentConfig::from_json(CONFIG).unwrap();
        assert_eq!(cfg.value_set.len(), 5);
        assert_eq!(cfg.tau_support, Rational::new(2, 5));
        assert_eq!(cfg.split_ratio, Rational::new(4, 5));
        assert_eq!(cfg.pipeline, Pipeline::MultiWay);
        assert_eq!(cfg.tuples[0].1.label(), "1,1,0");
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"value_set": ["0","0.5","1"], "tuples": [{"target":"T","influencers":["A"],"relations":{"A":0}}]}"#,
        )
        .unwrap();
        let base = ExperimentConfig::new(cfg.value_set.clone(), cfg.tuples.clone());
        assert_eq!(cfg, base);
    }

    #[test]
    fn rejects_bad_values() {
        let with = |k: &str, v: &str| {
            let mut json: serde_json::Value = serde_json::from_str(CONFIG).unwrap();
            json[k] = serde_json::from_str(v).unwrap();
            ExperimentConfig::from_json(&json.to_string())
        };
        assert!(matches!(
            with("tau_support", "\"1.5\""),
            Err(ConfigError::OutOfUnitRange { .. })
        ));
        assert!(matches!(with("split_ratio", "\"1\""), Err(ConfigError::SplitRatio(_))));
        assert!(matches!(with("max_conditions", "0"), Err(ConfigError::Zero(_))));
        assert!(matches!(
            with("value_set", r#"["0","1"]"#),
            Err(ConfigError::HalfMissing)
        ));
        assert!(matches!(
            with("value_set", r#"["0","0.3","1"]"#),
            Err(ConfigError::Json(_))
        ));
        assert!(matches!(with("pipeline", r#""three_way""#), Err(ConfigError::Json(_))));
        assert!(matches!(
            with("tuples", r#"[{"target":"T","influencers":["A","B"],"relations":[0]}]"#),
            Err(ConfigError::Model(_))
        ));
    }

    #[test]
    fn rules_files_and_audit() {
        let cfg = ExperimentConfig::from_json(CONFIG).unwrap();
        let bad = "p(Dw2) > 0.5 & p(Dw3) > 0.5 & p(Dw5) <= 0.5 -> p(Dw6) < 0.5";
        let fine = "p(Dw2) < 0.5 -> p(Dw6) < 0.25";
        let bare = parse_rules_json(&format!("[{bad:?}, {fine:?}]")).unwrap();
        let records = parse_rules_json(&format!(
            r#"[{{"target":"Dw6","repetition":1,"rules":[{bad:?}]}},{{"target":"Dw6","repetition":2,"rules":[{fine:?}]}}]"#
        ))
        .unwrap();
        assert_eq!(bare, records);
        let report = audit_rules(&bare, &cfg.tuples).unwrap();
        assert_eq!(report.irrational, 1);
        assert_eq!(report.by_principle[&crate::rationality::PrincipleId::C5], 1);
        let stray = parse_rules_json(r#"["p(A) > 0.5 -> p(Zz) > 0.5"]"#).unwrap();
        assert!(audit_rules(&stray, &cfg.tuples).is_err());
    }
}
