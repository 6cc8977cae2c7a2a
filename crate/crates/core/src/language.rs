//! Epistemic atoms `p(α) # v` and conjunctive rules over them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::value::{RestrictedValueSet, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparator {
    Eq,
    Ne,
    Ge,
    Le,
    Gt,
    Lt,
}

impl Comparator {
    pub const ALL: [Comparator; 6] = [
        Comparator::Eq,
        Comparator::Ne,
        Comparator::Ge,
        Comparator::Le,
        Comparator::Gt,
        Comparator::Lt,
    ];

    pub fn holds(self, lhs: Value, rhs: Value) -> bool {
        match self {
            Comparator::Eq => lhs == rhs,
            Comparator::Ne => lhs != rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Lt => lhs < rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Ge => ">=",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Lt => "<",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Comparator> {
        Some(match s {
            "=" | "==" => Comparator::Eq,
            "!=" | "≠" => Comparator::Ne,
            ">=" | "≥" => Comparator::Ge,
            "<=" | "≤" => Comparator::Le,
            ">" => Comparator::Gt,
            "<" => Comparator::Lt,
            _ => return None,
        })
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Comparator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Comparator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Comparator::from_symbol(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown comparator {s:?}")))
    }
}

/// `p(arg) op val`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EpistemicAtom {
    pub arg: String,
    pub op: Comparator,
    pub val: Value,
}

impl EpistemicAtom {
    pub fn new(arg: impl Into<String>, op: Comparator, val: Value) -> EpistemicAtom {
        EpistemicAtom {
            arg: arg.into(),
            op,
            val,
        }
    }
}

impl fmt::Display for EpistemicAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p({}) {} {}", self.arg, self.op, self.val)
    }
}

/// Whether a belief of `v` in the atom's argument satisfies the atom.
pub fn atom_holds(atom: &EpistemicAtom, v: Value) -> bool {
    atom.op.holds(v, atom.val)
}

/// `{x ∈ Π | x # v}`.
pub fn values_of(atom: &EpistemicAtom, set: &RestrictedValueSet) -> BTreeSet<Value> {
    set.iter().filter(|&x| atom_holds(atom, x)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("rule has no conditions")]
    EmptyConditions,
    #[error("argument {0} appears in more than one condition")]
    DuplicateConditionArgument(String),
    #[error("head argument {0} also appears among the conditions")]
    HeadInConditions(String),
}

/// A conjunction of condition atoms implying a head atom.
///
/// Conditions are kept sorted by argument name, one atom per argument, and
/// the head argument never occurs among them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Rule {
    conditions: Vec<EpistemicAtom>,
    head: EpistemicAtom,
}

impl Rule {
    pub fn new(mut conditions: Vec<EpistemicAtom>, head: EpistemicAtom) -> Result<Rule, RuleError> {
        if conditions.is_empty() {
            return Err(RuleError::EmptyConditions);
        }
        conditions.sort_by(|a, b| a.arg.cmp(&b.arg));
        for pair in conditions.windows(2) {
            if pair[0].arg == pair[1].arg {
                return Err(RuleError::DuplicateConditionArgument(pair[0].arg.clone()));
            }
        }
        if conditions.iter().any(|c| c.arg == head.arg) {
            return Err(RuleError::HeadInConditions(head.arg));
        }
        Ok(Rule { conditions, head })
    }

    pub fn conditions(&self) -> &[EpistemicAtom] {
        &self.conditions
    }

    pub fn head(&self) -> &EpistemicAtom {
        &self.head
    }

    pub fn condition_for(&self, arg: &str) -> Option<&EpistemicAtom> {
        self.conditions
            .binary_search_by(|c| c.arg.as_str().cmp(arg))
            .ok()
            .map(|i| &self.conditions[i])
    }

    /// Condition sets compared as sets of atoms.
    pub fn conditions_subset_of(&self, other: &Rule) -> bool {
        self.conditions.iter().all(|c| other.condition_for(&c.arg) == Some(c))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conditions.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, " -> {}", self.head)
    }
}

pub fn format_rule(rule: &Rule) -> String {
    rule.to_string()
}

/// Rules deserialize from the object form or from rule text.
#[derive(Deserialize)]
#[serde(untagged)]
enum RuleRepr {
    Object {
        conditions: Vec<EpistemicAtom>,
        head: EpistemicAtom,
    },
    Text(String),
}

impl<'de> Deserialize<'de> for Rule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match RuleRepr::deserialize(deserializer)? {
            RuleRepr::Object { conditions, head } => Rule::new(conditions, head),
            RuleRepr::Text(text) => parse_rule(&text),
        }
        .map_err(serde::de::Error::custom)
    }
}

impl FromStr for Rule {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Rule, RuleError> {
        parse_rule(s)
    }
}

/// Parses `p(A) > 0.5 & p(B) <= 0.25 -> p(C) < 0.5`. The unicode forms
/// `∧`, `→`, `≤`, `≥` and `≠` are accepted as well.
pub fn parse_rule(text: &str) -> Result<Rule, RuleError> {
    let mut parser = Parser { text, pos: 0 };
    let mut conditions = vec![parser.atom()?];
    loop {
        parser.skip_ws();
        if parser.eat("&") || parser.eat("∧") {
            conditions.push(parser.atom()?);
        } else if parser.eat("->") || parser.eat("→") {
            break;
        } else {
            return Err(parser.error("expected '&' or '->'"));
        }
    }
    let head = parser.atom()?;
    parser.skip_ws();
    if parser.pos != text.len() {
        return Err(parser.error("trailing input"));
    }
    Rule::new(conditions, head)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn error(&self, message: &str) -> RuleError {
        RuleError::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<EpistemicAtom, RuleError> {
        self.skip_ws();
        if !(self.eat("p(") || self.eat("P(")) {
            return Err(self.error("expected 'p('"));
        }
        self.skip_ws();
        let name_len = self
            .rest()
            .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-' || c == '.'))
            .unwrap_or(self.rest().len());
        if name_len == 0 {
            return Err(self.error("expected argument name"));
        }
        let arg = self.rest()[..name_len].to_string();
        self.pos += name_len;
        self.skip_ws();
        if !self.eat(")") {
            return Err(self.error("expected ')'"));
        }
        self.skip_ws();
        let op = ["!=", ">=", "<=", "==", "≠", "≥", "≤", "=", ">", "<"]
            .iter()
            .find(|sym| self.rest().starts_with(**sym))
            .copied()
            .ok_or_else(|| self.error("expected comparator"))?;
        self.pos += op.len();
        let op = Comparator::from_symbol(op).expect("listed comparator");
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_digit() || c == '.'))
            .unwrap_or(self.rest().len());
        let start = self.pos;
        let val: Value = self.rest()[..len].parse().map_err(|_| RuleError::Syntax {
            position: start,
            message: "expected a value in [0, 1]".to_string(),
        })?;
        self.pos += len;
        Ok(EpistemicAtom { arg, op, val })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::validate_value_set;
    use proptest::prelude::*;

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    #[test]
    fn atom_holds_examples() {
        assert!(atom_holds(&EpistemicAtom::new("A", Comparator::Gt, v("0.5")), v("0.6")));
        assert!(atom_holds(&EpistemicAtom::new("A", Comparator::Le, v("0.5")), v("0.5")));
        assert!(!atom_holds(
            &EpistemicAtom::new("A", Comparator::Lt, v("0.25")),
            v("0.25")
        ));
    }

    #[test]
    fn values_of_examples() {
        let three = RestrictedValueSet::two_way();
        let five = RestrictedValueSet::uniform(4).unwrap();
        let gt = EpistemicAtom::new("A", Comparator::Gt, v("0.5"));
        assert_eq!(values_of(&gt, &three), BTreeSet::from([Value::ONE]));
        let eq = EpistemicAtom::new("A", Comparator::Eq, v("0.5"));
        assert_eq!(values_of(&eq, &three), BTreeSet::from([Value::HALF]));
        let ne = EpistemicAtom::new("A", Comparator::Ne, v("0.5"));
        assert_eq!(
            values_of(&ne, &five),
            BTreeSet::from([v("0"), v("0.25"), v("0.75"), v("1")])
        );
    }

    #[test]
    fn values_of_agrees_with_atom_holds() {
        let set = validate_value_set(&Value::tenth_grid().collect::<Vec<_>>()).unwrap();
        for op in Comparator::ALL {
            for threshold in set.iter() {
                let atom = EpistemicAtom::new("A", op, threshold);
                let vals = values_of(&atom, &set);
                for x in set.iter() {
                    assert_eq!(vals.contains(&x), atom_holds(&atom, x));
                }
            }
        }
    }

    #[test]
    fn parse_examples() {
        let rule = parse_rule("p(Dw2) > 0.5 -> p(Dw6) < 0.5").unwrap();
        assert_eq!(rule.conditions().len(), 1);
        assert_eq!(rule.head().arg, "Dw6");
        assert_eq!(format_rule(&rule), "p(Dw2) > 0.5 -> p(Dw6) < 0.5");

        assert_eq!(
            parse_rule("p(A) > 0.5 & p(A) < 0.9 -> p(B) = 1"),
            Err(RuleError::DuplicateConditionArgument("A".into()))
        );
        assert_eq!(
            parse_rule("p(A) > 0.5 & p(B) < 0.9 -> p(B) = 1"),
            Err(RuleError::HeadInConditions("B".into()))
        );
    }

    #[test]
    fn parse_unicode_and_canonical_order() {
        let rule = parse_rule("p(Dw6) ≤ 0.5 ∧ p(Dw2)>0.5 ∧ p(Dw5) ≤ 0.5 → p(Dw3)>0.5").unwrap();
        assert_eq!(
            rule.to_string(),
            "p(Dw2) > 0.5 & p(Dw5) <= 0.5 & p(Dw6) <= 0.5 -> p(Dw3) > 0.5"
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_rule("p(A) > 0.5 p(B) = 1") {
            Err(RuleError::Syntax { position, .. }) => assert_eq!(position, 11),
            other => panic!("unexpected {other:?}"),
        }
        match parse_rule("p(A) >> 0.5 -> p(B) = 1") {
            Err(RuleError::Syntax { position, .. }) => assert_eq!(position, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_rule("p(A) > 1.5 -> p(B) = 1"),
            Err(RuleError::Syntax { .. })
        ));
        assert!(matches!(
            parse_rule("p(A) > 0.5 -> p(B) = 1 &"),
            Err(RuleError::Syntax { .. })
        ));
        assert!(matches!(parse_rule(""), Err(RuleError::Syntax { .. })));
    }

    #[test]
    fn json_shape() {
        let rule = parse_rule("p(B) >= 0.75 & p(A) != 0 -> p(C) < 0.25").unwrap();
        let json = serde_json::to_string(&rule).unwrap();
        assert_eq!(
            json,
            r#"{"conditions":[{"arg":"A","op":"!=","val":"0"},{"arg":"B","op":">=","val":"0.75"}],"head":{"arg":"C","op":"<","val":"0.25"}}"#
        );
        let back: Rule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rule);
        let dup = r#"{"conditions":[{"arg":"A","op":"=","val":"0"},{"arg":"A","op":">","val":"0"}],"head":{"arg":"C","op":"<","val":"0.25"}}"#;
        assert!(serde_json::from_str::<Rule>(dup).is_err());
    }

    fn arb_atom(arg: String) -> impl Strategy<Value = EpistemicAtom> {
        (prop::sample::select(Comparator::ALL.to_vec()), 0u32..=100)
            .prop_map(move |(op, n)| EpistemicAtom::new(arg.clone(), op, Value::hundredths(n)))
    }

    fn arb_rule() -> impl Strategy<Value = Rule> {
        (prop::collection::btree_set("[A-Za-z][A-Za-z0-9_]{0,5}", 2..6))
            .prop_flat_map(|names| {
                let names: Vec<String> = names.into_iter().collect();
                let head = arb_atom(names[0].clone());
                let conds: Vec<_> = names[1..].iter().cloned().map(arb_atom).collect();
                (conds, head)
            })
            .prop_map(|(conds, head)| Rule::new(conds, head).unwrap())
    }

    proptest! {
        #[test]
        fn parse_format_round_trip(rule in arb_rule()) {
            let text = format_rule(&rule);
            let parsed = parse_rule(&text).unwrap();
            prop_assert_eq!(&parsed, &rule);
            prop_assert_eq!(format_rule(&parsed), text);
        }

        #[test]
        fn constructed_rules_keep_invariants(rule in arb_rule()) {
            let args: Vec<&str> = rule.conditions().iter().map(|c| c.arg.as_str()).collect();
            prop_assert!(args.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(!args.contains(&rule.head().arg.as_str()));
        }
    }
}
