//! Attribute values: numbers, strings, booleans and flat sets of scalars.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A finite number. NaN and infinities are not representable, and negative
/// zero is normalized to zero so that equality and ordering agree.
#[derive(Clone, Copy, Debug)]
pub struct Number(f64);

impl Number {
    pub fn new(v: f64) -> Option<Number> {
        if v.is_finite() {
            Some(Number(if v == 0.0 { 0.0 } else { v }))
        } else {
            None
        }
    }

    pub fn from_i64(v: i64) -> Number {
        Number(v as f64)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// The value as an integer, if it is one.
    pub fn as_i64(self) -> Option<i64> {
        if self.0.fract() == 0.0 && self.0.abs() < 9.0e15 {
            Some(self.0 as i64)
        } else {
            None
        }
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for Number {}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Number {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl std::hash::Hash for Number {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.to_bits().hash(state)
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // f64's Display never uses exponent notation and round-trips exactly.
        write!(f, "{}", self.0)
    }
}

/// An attribute or literal value.
///
/// Sets hold scalars only; [`Value::set`] rejects nested sets. The derived
/// ordering across kinds exists only so values can live in ordered
/// containers and carries no meaning for the `<` operator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Num(Number),
    Str(String),
    Set(BTreeSet<Value>),
}

impl Value {
    pub fn str(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn int(v: i64) -> Value {
        Value::Num(Number::from_i64(v))
    }

    /// Builds a set value. Returns `None` if any member is itself a set.
    pub fn set<I: IntoIterator<Item = Value>>(items: I) -> Option<Value> {
        let mut out = BTreeSet::new();
        for item in items {
            if item.is_set() {
                return None;
            }
            out.insert(item);
        }
        Some(Value::Set(out))
    }

    pub fn is_set(&self) -> bool {
        matches!(self, Value::Set(_))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Bool(_) => ValueKind::Bool,
            Value::Num(_) => ValueKind::Num,
            Value::Str(_) => ValueKind::Str,
            Value::Set(_) => ValueKind::Set,
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::int(v)
    }
}

/// Renders in the predicate literal syntax: `True`, `12`, `"x"`, `{1, "a"}`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Num(n) => write!(f, "{n}"),
            Value::Str(s) => write!(f, "\"{s}\""),
            Value::Set(items) => {
                f.write_str("{")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Bool,
    Num,
    Str,
    Set,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueKind::Bool => "boolean",
            ValueKind::Num => "number",
            ValueKind::Str => "string",
            ValueKind::Set => "set",
        })
    }
}

/// Attribute name to value.
pub type AttrSet = BTreeMap<String, Value>;

/// True if `name` matches `[A-Za-z0-9_]+`.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_is_zero() {
        assert_eq!(Number::new(-0.0), Number::new(0.0));
        assert_eq!(Number::new(-0.0).unwrap().to_string(), "0");
    }

    #[test]
    fn non_finite_rejected() {
        assert!(Number::new(f64::NAN).is_none());
        assert!(Number::new(f64::INFINITY).is_none());
    }

    #[test]
    fn display_forms() {
        assert_eq!(Value::int(4).to_string(), "4");
        assert_eq!(Value::Num(Number::new(0.25).unwrap()).to_string(), "0.25");
        assert_eq!(Value::Bool(false).to_string(), "False");
        let s = Value::set([Value::str("green"), Value::str("blue")]).unwrap();
        assert_eq!(s.to_string(), "{\"blue\", \"green\"}");
        assert_eq!(Value::set([]).unwrap().to_string(), "{}");
    }

    #[test]
    fn nested_sets_rejected() {
        let inner = Value::set([Value::int(1)]).unwrap();
        assert!(Value::set([inner]).is_none());
    }

    #[test]
    fn sets_are_unordered_and_deduplicated() {
        let a = Value::set([Value::int(2), Value::int(1), Value::int(2)]).unwrap();
        let b = Value::set([Value::int(1), Value::int(2)]).unwrap();
        assert_eq!(a, b);
    }
}
