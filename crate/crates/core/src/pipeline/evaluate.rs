use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::dataset::{DataError, Dataset};
use crate::decimal::Rational;
use crate::language::Rule;
use crate::metrics::{stats, ConfidenceMode, RuleStats};
use crate::model::{InfluenceTuple, RelationSet};
use crate::rationality::{audit_report, AuditReport};
use crate::Error;

/// Test-split quality of one learnt rule set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationReport {
    pub rule_count: usize,
    pub avg_conditions: BigRational,
    pub mean_support: BigRational,
    pub mean_confidence: BigRational,
    /// Mean over rules whose lift is defined on the test split; 0 if none.
    pub mean_lift: BigRational,
    pub irrational_count: usize,
    pub audit: AuditReport,
    pub stats: Vec<(Rule, RuleStats)>,
}

pub(crate) fn big(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub(crate) fn mean(values: impl IntoIterator<Item = BigRational>) -> BigRational {
    let mut total = BigRational::zero();
    let mut n = 0u64;
    for v in values {
        total += v;
        n += 1;
    }
    if n == 0 {
        total
    } else {
        total / BigRational::from_integer(BigInt::from(n))
    }
}

pub fn evaluate(
    rules: &BTreeSet<Rule>,
    test: &Dataset,
    tuple: &InfluenceTuple,
    rel: &RelationSet,
    mode: ConfidenceMode,
) -> Result<EvaluationReport, Error> {
    if test.is_empty() {
        return Err(DataError::EmptyDataset.into());
    }
    let stats = rules
        .iter()
        .map(|r| Ok((r.clone(), stats(r, test, mode)?)))
        .collect::<Result<Vec<_>, DataError>>()?;
    let audit = audit_report(rules, tuple, rel)?;
    Ok(EvaluationReport {
        rule_count: rules.len(),
        avg_conditions: mean(
            rules
                .iter()
                .map(|r| BigRational::from_integer(BigInt::from(r.conditions().len()))),
        ),
        mean_support: mean(stats.iter().map(|(_, s)| big(s.support))),
        mean_confidence: mean(stats.iter().map(|(_, s)| big(s.confidence))),
        mean_lift: mean(stats.iter().filter_map(|(_, s)| s.lift.map(big))),
        irrational_count: audit.irrational,
        audit,
        stats,
    })
}
