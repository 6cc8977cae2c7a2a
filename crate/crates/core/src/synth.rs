//! Synthetic survey data with a controlled share of irrational rows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataset::{DataError, DataItem, Dataset};
use crate::decimal::Rational;
use crate::model::{InfluenceTuple, ModelError, Relation, RelationSet};
use crate::rationality::{check_principles, Stance, StanceMap};
use crate::value::Value;

pub const SYNTH_TARGET: &str = "T";

/// Chance an influencer's stance follows the row's latent leaning.
const ALIGNMENT: f64 = 0.8;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("noise {0} is above 1")]
    NoiseAboveOne(Rational),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Influence tuple `(A1..An, T)` with `profile` repeated to length `n`.
pub fn synthetic_model(
    n_influencers: usize,
    profile: &RelationSet,
) -> Result<(InfluenceTuple, RelationSet), SynthError> {
    if n_influencers == 0 {
        return Err(SynthError::NotPositive("influencers"));
    }
    if profile.is_empty() {
        return Err(SynthError::NotPositive("relation profile length"));
    }
    let names: Vec<String> = (1..=n_influencers).map(|i| format!("A{i}")).collect();
    let tags: Vec<Relation> = profile.tags().iter().copied().cycle().take(n_influencers).collect();
    Ok((InfluenceTuple::new(names, SYNTH_TARGET)?, RelationSet::new(tags)?))
}

fn value_with_stance(rng: &mut ChaCha8Rng, stance: Stance) -> Value {
    let tenths = match stance {
        Stance::Believed => rng.gen_range(6..=10),
        Stance::Disbelieved => rng.gen_range(0..=4),
        Stance::Neutral => 5,
    };
    Value::hundredths(tenths * 10)
}

fn flip(stance: Stance) -> Stance {
    match stance {
        Stance::Believed => Stance::Disbelieved,
        Stance::Disbelieved => Stance::Believed,
        Stance::Neutral => Stance::Neutral,
    }
}

/// `n_rows` rows over `A1..An` and `T`. Each row is rational (no principle
/// fires on its exact values) with probability `1 - noise` and irrational
/// otherwise. Deterministic in `seed`.
pub fn gen_synthetic(
    n_rows: usize,
    n_influencers: usize,
    profile: &RelationSet,
    noise: Rational,
    seed: u64,
) -> Result<Dataset, SynthError> {
    if n_rows == 0 {
        return Err(SynthError::NotPositive("rows"));
    }
    if noise > Rational::from_integer(1) {
        return Err(SynthError::NoiseAboveOne(noise));
    }
    let (tuple, rel) = synthetic_model(n_influencers, profile)?;
    let att = crate::model::attackers(&tuple, &rel)?;
    let sup = crate::model::supporters(&tuple, &rel)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(n_rows);

    for row in 0..n_rows {
        let wants_irrational = rng.gen_range(0..*noise.denom()) < *noise.numer();
        let (values, target) = loop {
            let pro = rng.gen_bool(0.5);
            let mut stances = StanceMap::new();
            let mut values = Vec::with_capacity(n_influencers + 1);
            let mut score = 0i64;
            for (name, relation) in tuple.influencers().iter().zip(rel.tags()) {
                let leaning = match (relation, pro) {
                    (Relation::Support, true) | (Relation::Attack, false) => Stance::Believed,
                    _ => Stance::Disbelieved,
                };
                let stance = if rng.gen_range(0..11) == 0 {
                    Stance::Neutral
                } else if rng.gen_bool(ALIGNMENT) {
                    leaning
                } else {
                    flip(leaning)
                };
                let sign = if *relation == Relation::Support { 1 } else { -1 };
                score += sign
                    * match stance {
                        Stance::Believed => 1,
                        Stance::Disbelieved => -1,
                        Stance::Neutral => 0,
                    };
                stances.insert(name.clone(), Some(stance));
                values.push((name.clone(), value_with_stance(&mut rng, stance)));
            }

            let mut rational = Vec::new();
            let mut irrational = Vec::new();
            for candidate in [Stance::Believed, Stance::Disbelieved] {
                stances.insert(SYNTH_TARGET.to_string(), Some(candidate));
                if check_principles(&stances, SYNTH_TARGET, &att, &sup)
                    .expect("synthetic relation profile is valid")
                    .is_some()
                {
                    irrational.push(candidate);
                } else {
                    rational.push(candidate);
                }
            }

            if wants_irrational {
                if irrational.is_empty() {
                    continue;
                }
                break (values, irrational[rng.gen_range(0..irrational.len())]);
            }
            let preferred = match score.signum() {
                1 => Stance::Believed,
                -1 => Stance::Disbelieved,
                _ => Stance::Neutral,
            };
            let target = if preferred == Stance::Neutral || rational.contains(&preferred) {
                preferred
            } else if !rational.is_empty() {
                rational[rng.gen_range(0..rational.len())]
            } else {
                Stance::Neutral
            };
            break (values, target);
        };
        let mut values = values;
        values.push((SYNTH_TARGET.to_string(), value_with_stance(&mut rng, target)));
        items.push(DataItem::new(format!("{row:04}"), values));
    }

    let mut arguments: Vec<String> = tuple.influencers().to_vec();
    arguments.push(SYNTH_TARGET.to_string());
    Ok(Dataset::new(arguments, items)?)
}
