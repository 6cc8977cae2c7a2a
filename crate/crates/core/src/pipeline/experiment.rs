use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::dataset::{split, Dataset};
use crate::decimal::{format_big, format_rational};
use crate::language::Rule;
use crate::metrics::RuleStats;
use crate::value::RestrictedValueSet;
use crate::Error;

use super::evaluate::{evaluate, mean};
use super::learn::{binomial, learn_detailed};
use super::{ExperimentConfig, Pipeline};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSetRecord {
    pub target: String,
    pub repetition: usize,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsRecord {
    pub target: String,
    pub repetition: usize,
    pub rule: Rule,
    pub stats: RuleStats,
}

/// One line of report.csv; `repetition` is `None` on the averaged line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub target: String,
    pub repetition: Option<usize>,
    pub value_set_size: usize,
    pub pipeline: Pipeline,
    pub rule_count: BigRational,
    pub avg_conditions: BigRational,
    pub support: BigRational,
    pub confidence: BigRational,
    pub lift: BigRational,
    pub irrational: BigRational,
    pub wall_time_ms: BigRational,
}

impl ReportRow {
    /// Every column except the wall time.
    pub fn metrics_eq(&self, other: &ReportRow) -> bool {
        ReportRow {
            wall_time_ms: other.wall_time_ms.clone(),
            ..self.clone()
        } == *other
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExperimentResult {
    pub rule_sets: Vec<RuleSetRecord>,
    pub stats: Vec<StatsRecord>,
    pub report: Vec<ReportRow>,
}

fn millis(d: Duration) -> BigRational {
    BigRational::new(BigInt::from(d.as_micros()), BigInt::from(1000))
}

fn integer(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Repetition `r` (from 1) splits with `seed + r`, then learns and evaluates
/// every tuple. Rows come out per tuple in repetition order, followed by
/// the averaged row.
pub fn run_experiment(cfg: &ExperimentConfig, data: &Dataset) -> Result<ExperimentResult, Error> {
    cfg.validate()?;
    cfg.check_schema(data.arguments())?;
    let mut per_tuple: Vec<Vec<ReportRow>> = vec![Vec::new(); cfg.tuples.len()];
    let mut result = ExperimentResult::default();
    for rep in 1..=cfg.repetitions {
        let (train, test) = split(data, cfg.split_ratio, cfg.seed.wrapping_add(rep as u64))?;
        for (idx, (tuple, rel)) in cfg.tuples.iter().enumerate() {
            let start = Instant::now();
            let outcome = learn_detailed(&train, tuple, rel, cfg)?;
            let report = evaluate(&outcome.rules, &test, tuple, rel, cfg.confidence_mode)?;
            let elapsed = start.elapsed();
            let target = tuple.target().to_string();
            per_tuple[idx].push(ReportRow {
                target: target.clone(),
                repetition: Some(rep),
                value_set_size: cfg.value_set.len(),
                pipeline: cfg.pipeline,
                rule_count: integer(report.rule_count),
                avg_conditions: report.avg_conditions.clone(),
                support: report.mean_support.clone(),
                confidence: report.mean_confidence.clone(),
                lift: report.mean_lift.clone(),
                irrational: integer(report.irrational_count),
                wall_time_ms: millis(elapsed),
            });
            result
                .stats
                .extend(report.stats.into_iter().map(|(rule, stats)| StatsRecord {
                    target: target.clone(),
                    repetition: rep,
                    rule,
                    stats,
                }));
            result.rule_sets.push(RuleSetRecord {
                target,
                repetition: rep,
                rules: outcome.rules.into_iter().collect(),
            });
        }
    }
    for rows in per_tuple {
        let Some(first) = rows.first() else { continue };
        let avg = |f: fn(&ReportRow) -> &BigRational| mean(rows.iter().map(|r| f(r).clone()));
        let summary = ReportRow {
            target: first.target.clone(),
            repetition: None,
            value_set_size: first.value_set_size,
            pipeline: first.pipeline,
            rule_count: avg(|r| &r.rule_count),
            avg_conditions: avg(|r| &r.avg_conditions),
            support: avg(|r| &r.support),
            confidence: avg(|r| &r.confidence),
            lift: avg(|r| &r.lift),
            irrational: avg(|r| &r.irrational),
            wall_time_ms: avg(|r| &r.wall_time_ms),
        };
        result.report.extend(rows);
        result.report.push(summary);
    }
    Ok(result)
}

/// Writes rules.json, stats.csv and report.csv into `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    let rules = BufWriter::new(File::create(dir.join("rules.json"))?);
    serde_json::to_writer_pretty(rules, &result.rule_sets)?;

    let mut stats = csv::Writer::from_path(dir.join("stats.csv"))?;
    stats.write_record([
        "rule",
        "support",
        "confidence",
        "lift",
        "fired",
        "agrees",
        "correct",
        "target",
        "repetition",
    ])?;
    for rec in &result.stats {
        let s = &rec.stats;
        stats.write_record([
            rec.rule.to_string(),
            format_rational(&s.support),
            format_rational(&s.confidence),
            s.lift.map(|l| format_rational(&l)).unwrap_or_default(),
            s.fired_count.to_string(),
            s.agrees_count.to_string(),
            s.correct_count.to_string(),
            rec.target.clone(),
            rec.repetition.to_string(),
        ])?;
    }
    stats.flush()?;

    let mut report = csv::Writer::from_path(dir.join("report.csv"))?;
    report.write_record([
        "target",
        "repetition",
        "value_set_size",
        "pipeline",
        "rule_count",
        "avg_conditions",
        "support",
        "confidence",
        "lift",
        "irrational",
        "wall_time_ms",
    ])?;
    for row in &result.report {
        report.write_record([
            row.target.clone(),
            row.repetition.map_or_else(|| "avg".to_string(), |r| r.to_string()),
            row.value_set_size.to_string(),
            row.pipeline.to_string(),
            format_big(&row.rule_count),
            format_big(&row.avg_conditions),
            format_big(&row.support),
            format_big(&row.confidence),
            format_big(&row.lift),
            format_big(&row.irrational),
            format_big(&row.wall_time_ms),
        ])?;
    }
    report.flush()?;
    Ok(())
}

/// Pipelines and value sets to cross with a base configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub pipelines: Vec<Pipeline>,
    pub value_sets: Vec<RestrictedValueSet>,
}

impl GridSpec {
    pub fn expand(&self, base: &ExperimentConfig) -> Vec<ExperimentConfig> {
        let mut out = Vec::new();
        for &pipeline in &self.pipelines {
            for set in &self.value_sets {
                out.push(ExperimentConfig {
                    pipeline,
                    value_set: set.clone(),
                    ..base.clone()
                });
            }
        }
        out
    }
}

/// Rule instantiations of the 2-way framework widened to `set`: every
/// condition subset of at most `cap` of `n` influencers, each condition and
/// the head taking one threshold per interior value of `set`. With
/// `{0, 0.5, 1}` this is exactly the 2-way expansion count.
pub fn baseline_instantiations(rows: usize, n: usize, cap: usize, set: &RestrictedValueSet) -> u128 {
    let m = set.len().saturating_sub(2) as u128;
    let per_row: u128 = (1..=cap.min(n) as u128)
        .map(|k| binomial(n as u128, k) * m.pow(k as u32))
        .sum();
    rows as u128 * m * per_row
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingRow {
    pub pipeline: Pipeline,
    pub value_set: String,
    pub value_count: usize,
    pub target: String,
    pub candidates: u128,
    pub rules: usize,
    pub wall_time_ms: BigRational,
}

/// Times split, learn and evaluate for every configuration and tuple, on
/// the first repetition's split. Runs serially.
pub fn benchmark(configs: &[ExperimentConfig], data: &Dataset) -> Result<Vec<TimingRow>, Error> {
    let mut rows = Vec::new();
    for cfg in configs {
        cfg.validate()?;
        cfg.check_schema(data.arguments())?;
        for (tuple, rel) in &cfg.tuples {
            let start = Instant::now();
            let (train, test) = split(data, cfg.split_ratio, cfg.seed.wrapping_add(1))?;
            let outcome = learn_detailed(&train, tuple, rel, cfg)?;
            evaluate(&outcome.rules, &test, tuple, rel, cfg.confidence_mode)?;
            let elapsed = start.elapsed();
            let candidates = match cfg.pipeline {
                Pipeline::MultiWay => outcome.candidates,
                Pipeline::TwoWay => baseline_instantiations(
                    train.len(),
                    tuple.influencers().len(),
                    cfg.max_conditions,
                    &cfg.value_set,
                ),
            };
            rows.push(TimingRow {
                pipeline: cfg.pipeline,
                value_set: cfg.value_set.label(),
                value_count: cfg.value_set.len(),
                target: tuple.target().to_string(),
                candidates,
                rules: outcome.rules.len(),
                wall_time_ms: millis(elapsed),
            });
        }
    }
    Ok(rows)
}

pub fn write_timings(rows: &[TimingRow], path: &Path) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = csv::Writer::from_path(path)?;
    out.write_record([
        "pipeline",
        "value_set",
        "value_count",
        "target",
        "candidates",
        "rules",
        "wall_time_ms",
    ])?;
    for row in rows {
        out.write_record([
            row.pipeline.to_string(),
            row.value_set.clone(),
            row.value_count.to_string(),
            row.target.clone(),
            row.candidates.to_string(),
            row.rules.to_string(),
            format_big(&row.wall_time_ms),
        ])?;
    }
    out.flush()?;
    Ok(())
}
