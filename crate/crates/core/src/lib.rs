//! Learning rational epistemic rules from belief data.
//!
//! Survey rows are generalized into candidate rules over an argument graph,
//! rows that break the rationality principles of their influence tuple are
//! filtered out, and the remaining candidates are ranked by support,
//! confidence and lift.
//!
//! ```
//! use epirules::language::parse_rule;
//!
//! let rule = parse_rule("p(Dw2) > 0.5 & p(Dw5) <= 0.5 -> p(Dw6) < 0.25").unwrap();
//! assert_eq!(rule.conditions().len(), 2);
//! assert_eq!(rule.to_string(), "p(Dw2) > 0.5 & p(Dw5) <= 0.5 -> p(Dw6) < 0.25");
//! ```

pub mod dataset;
pub mod decimal;
pub mod generalize;
pub mod language;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod rationality;
pub mod semantics;
pub mod synth;
pub mod value;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Value(#[from] value::ValueError),
    #[error(transparent)]
    Rule(#[from] language::RuleError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Semantics(#[from] semantics::SemanticsError),
    #[error(transparent)]
    Decimal(#[from] decimal::DecimalError),
    #[error(transparent)]
    Data(#[from] dataset::DataError),
    #[error(transparent)]
    Rationality(#[from] rationality::RationalityError),
    #[error(transparent)]
    Synth(#[from] synth::SynthError),
    #[error(transparent)]
    Config(#[from] pipeline::ConfigError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
