//! Decimal strings for the unbounded rationals used by thresholds and metrics.

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer};
use thiserror::Error;

pub type Rational = Ratio<u64>;

/// Fractional digits printed for non-terminating values.
pub const OUTPUT_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0:?} is not a non-negative decimal")]
pub struct DecimalError(pub String);

/// Parses `"0.8"`, `"1"`, `".25"` or `"3/4"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, DecimalError> {
    let bad = || DecimalError(text.to_string());
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if (whole.is_empty() && frac.is_empty())
        || !whole.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
        || frac.len() > 18
    {
        return Err(bad());
    }
    let whole: u64 = if whole.is_empty() {
        0
    } else {
        whole.parse().map_err(|_| bad())?
    };
    let scale = 10u64.pow(frac.len() as u32);
    let frac: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let numer = whole
        .checked_mul(scale)
        .and_then(|w| w.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Ratio::new(numer, scale))
}

/// Exact decimal when the expansion terminates within [`OUTPUT_DIGITS`]
/// places, otherwise rounded half-up to that many places.
pub fn format_rational(r: &Rational) -> String {
    format_parts(BigUint::from(*r.numer()), BigUint::from(*r.denom()))
}

pub fn format_big(r: &BigRational) -> String {
    let numer = r.numer().to_biguint().expect("non-negative rational");
    let denom = r.denom().to_biguint().expect("positive denominator");
    format_parts(numer, denom)
}

fn format_parts(numer: BigUint, denom: BigUint) -> String {
    let scale = BigUint::from(10u32).pow(OUTPUT_DIGITS as u32);
    let scaled = numer * &scale * 2u32 + &denom;
    let rounded = scaled / (denom * 2u32);
    let whole = &rounded / &scale;
    let frac = (&rounded % &scale).to_u64().expect("fraction below scale");
    if frac.is_zero() {
        return whole.to_string();
    }
    let digits = format!("{frac:0width$}", width = OUTPUT_DIGITS);
    format!("{whole}.{}", digits.trim_end_matches('0'))
}

pub fn deserialize_rational<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let text = String::deserialize(d)?;
    parse_rational(&text).map_err(serde::de::Error::custom)
}

pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_rational(r))
}
