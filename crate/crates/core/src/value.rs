//! Exact belief values, restricted value sets and the Nearest function.
//!
//! Every value lives in `[0, 1]` and is stored as an integer numerator over
//! the fixed [`DENOMINATOR`], so comparisons and closure checks are exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Common denominator of every [`Value`].
pub const DENOMINATOR: u32 = 100;

const HALF: u32 = DENOMINATOR / 2;
const TENTH: u32 = DENOMINATOR / 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("value {0:?} is not a decimal in [0, 1] with at most two fractional digits")]
    Unparseable(String),
    #[error("numerator {0} exceeds the denominator {DENOMINATOR}")]
    OutOfRange(u32),
    #[error("value set is empty")]
    EmptySet,
    #[error("value set does not contain 1")]
    MissingOne,
    #[error("value set is not closed: {x} {op} {y} = {missing} is missing")]
    ClosureViolation {
        x: Value,
        y: Value,
        op: char,
        missing: Value,
    },
    #[error("value set does not contain 0.5")]
    HalfNotInSet,
    #[error("Likert response {raw} is outside 1..={scale_points}")]
    LikertOutOfRange { raw: i64, scale_points: i64 },
}

/// A belief value: an exact rational in `[0, 1]` with denominator [`DENOMINATOR`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Value(u32);

impl Value {
    pub const ZERO: Value = Value(0);
    pub const HALF: Value = Value(HALF);
    pub const ONE: Value = Value(DENOMINATOR);

    pub fn new(numerator: u32) -> Result<Value, ValueError> {
        if numerator > DENOMINATOR {
            return Err(ValueError::OutOfRange(numerator));
        }
        Ok(Value(numerator))
    }

    /// Shorthand for literals known to be in range. Panics otherwise.
    pub fn hundredths(numerator: u32) -> Value {
        Value::new(numerator).expect("value numerator out of range")
    }

    pub fn numerator(self) -> u32 {
        self.0
    }

    /// `1 - self`.
    pub fn complement(self) -> Value {
        Value(DENOMINATOR - self.0)
    }

    pub fn checked_add(self, other: Value) -> Option<Value> {
        let sum = self.0 + other.0;
        (sum <= DENOMINATOR).then_some(Value(sum))
    }

    pub fn checked_sub(self, other: Value) -> Option<Value> {
        self.0.checked_sub(other.0).map(Value)
    }

    pub fn distance(self, other: Value) -> u32 {
        self.0.abs_diff(other.0)
    }

    /// True when the value lies on the 11-point grid `{0, 0.1, ..., 1}`.
    pub fn on_tenth_grid(self) -> bool {
        self.0 % TENTH == 0
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.0) / f64::from(DENOMINATOR)
    }

    /// All values of the 11-point grid, ascending.
    pub fn tenth_grid() -> impl Iterator<Item = Value> {
        (0..=10).map(|k| Value(k * TENTH))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / DENOMINATOR;
        let frac = self.0 % DENOMINATOR;
        if frac == 0 {
            return write!(f, "{whole}");
        }
        let digits = format!("{frac:02}");
        write!(f, "{whole}.{}", digits.trim_end_matches('0'))
    }
}

impl FromStr for Value {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Value, ValueError> {
        let bad = || ValueError::Unparseable(s.to_string());
        let text = s.trim();
        let (whole, frac) = match text.split_once('.') {
            Some((w, f)) => (w, f),
            None => (text, ""),
        };
        if (whole.is_empty() && frac.is_empty())
            || !whole.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let whole: u32 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        // trailing zeros beyond the hundredths are harmless ("0.250")
        let significant = frac.trim_end_matches('0');
        if significant.len() > 2 {
            return Err(bad());
        }
        let mut frac_num = 0u32;
        for (i, b) in significant.bytes().enumerate() {
            frac_num += u32::from(b - b'0') * if i == 0 { 10 } else { 1 };
        }
        let numerator = whole
            .checked_mul(DENOMINATOR)
            .and_then(|w| w.checked_add(frac_num))
            .ok_or_else(bad)?;
        Value::new(numerator).map_err(|_| bad())
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Value, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite set of values containing 1 and closed under bounded addition
/// and subtraction. Construct with [`validate_value_set`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RestrictedValueSet {
    values: Vec<Value>,
}

/// Checks membership of 1 and both closure conditions over every ordered pair.
pub fn validate_value_set(values: &[Value]) -> Result<RestrictedValueSet, ValueError> {
    if values.is_empty() {
        return Err(ValueError::EmptySet);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.last() != Some(&Value::ONE) {
        return Err(ValueError::MissingOne);
    }
    // presence bitmap over the numerators
    let mut present = [false; DENOMINATOR as usize + 1];
    for v in &sorted {
        present[v.0 as usize] = true;
    }
    for &x in &sorted {
        for &y in &sorted {
            if let Some(sum) = x.checked_add(y) {
                if !present[sum.0 as usize] {
                    return Err(ValueError::ClosureViolation {
                        x,
                        y,
                        op: '+',
                        missing: sum,
                    });
                }
            }
            if let Some(diff) = x.checked_sub(y) {
                if !present[diff.0 as usize] {
                    return Err(ValueError::ClosureViolation {
                        x,
                        y,
                        op: '-',
                        missing: diff,
                    });
                }
            }
        }
    }
    Ok(RestrictedValueSet { values: sorted })
}

impl RestrictedValueSet {
    /// The evenly spaced set `{0, 1/k, ..., 1}`; `k` must divide [`DENOMINATOR`].
    pub fn uniform(steps: u32) -> Result<RestrictedValueSet, ValueError> {
        if steps == 0 || DENOMINATOR % steps != 0 {
            return Err(ValueError::OutOfRange(steps));
        }
        let stride = DENOMINATOR / steps;
        let values: Vec<Value> = (0..=steps).map(|k| Value(k * stride)).collect();
        validate_value_set(&values)
    }

    /// `{0, 0.5, 1}`, the set used by the 2-way generalization step.
    pub fn two_way() -> RestrictedValueSet {
        RestrictedValueSet {
            values: vec![Value::ZERO, Value::HALF, Value::ONE],
        }
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: Value) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Value> + '_ {
        self.values.iter().copied()
    }

    /// Compact label such as `0|0.5|1`.
    pub fn label(&self) -> String {
        self.values.iter().map(Value::to_string).collect::<Vec<_>>().join("|")
    }
}

impl Serialize for RestrictedValueSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.values.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RestrictedValueSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let values = Vec::<Value>::deserialize(deserializer)?;
        validate_value_set(&values).map_err(serde::de::Error::custom)
    }
}

/// The value of `set` closest to `v` among those lying between `v` and 0.5
/// (inclusive on both ends).
pub fn nearest(v: Value, set: &RestrictedValueSet) -> Result<Value, ValueError> {
    if !set.contains(Value::HALF) {
        return Err(ValueError::HalfNotInSet);
    }
    let (lo, hi) = if v <= Value::HALF {
        (v, Value::HALF)
    } else {
        (Value::HALF, v)
    };
    let mut best: Option<Value> = None;
    for candidate in set.iter().filter(|c| (lo..=hi).contains(c)) {
        match best {
            None => best = Some(candidate),
            Some(b) => match candidate.distance(v).cmp(&b.distance(v)) {
                Ordering::Less => best = Some(candidate),
                // candidates sit on one side of v, so distances are distinct
                Ordering::Equal => unreachable!("tie in nearest for {v}"),
                Ordering::Greater => {}
            },
        }
    }
    Ok(best.expect("0.5 is always a candidate"))
}

/// Maps a Likert response `raw` in `1..=scale_points` linearly onto `[0, 1]`,
/// rounding half-up to the 11-point grid.
pub fn map_likert(raw: i64, scale_points: i64) -> Result<Value, ValueError> {
    if scale_points < 2 || raw < 1 || raw > scale_points {
        return Err(ValueError::LikertOutOfRange { raw, scale_points });
    }
    let span = scale_points - 1;
    // round(10 * (raw - 1) / span) with ties going up
    let tenths = (20 * (raw - 1) + span) / (2 * span);
    Ok(Value(tenths as u32 * TENTH))
}
