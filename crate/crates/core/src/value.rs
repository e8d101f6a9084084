//! Evaluation values, value alphabets and the two-mode numeric tower.
//!
//! Every table in the crate stores [`Value`]s. Numeric tables are either
//! exact rationals or floats, never a mixture: rational mode compares
//! exactly, float mode compares with an absolute tolerance.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance for float equality.
pub const DEFAULT_EPS_EQ: f64 = 1e-9;
/// Default grid width used to group float probabilities during refinement.
pub const DEFAULT_EPS_GRID: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValueError {
    #[error("malformed rational literal `{0}`")]
    BadRational(String),
    #[error("value {0} lies outside [0, 1]")]
    OutOfUnitInterval(String),
    #[error("symbol index {index} outside alphabet of {size} symbols")]
    UnknownSymbol { index: usize, size: usize },
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbolName(String),
    #[error("value {value} does not belong to a {alphabet} alphabet")]
    WrongKind { value: String, alphabet: &'static str },
    #[error("symbol alphabet must contain at least one element")]
    EmptyAlphabet,
    #[error("symbol alphabet lists `{0}` twice")]
    DuplicateSymbol(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    #[default]
    Rational,
    Float,
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericMode::Rational => f.write_str("rational"),
            NumericMode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for NumericMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(NumericMode::Rational),
            "float" => Ok(NumericMode::Float),
            other => Err(format!("unknown numeric mode `{other}` (expected rational|float)")),
        }
    }
}

/// Tolerances shared by every comparison in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Absolute slack for float equality and zero tests.
    pub eps_eq: f64,
    /// Grid width used to bucket float probabilities in partition refinement.
    pub eps_grid: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps_eq: DEFAULT_EPS_EQ, eps_grid: DEFAULT_EPS_GRID }
    }
}

impl Tolerance {
    pub fn exact() -> Self {
        Tolerance { eps_eq: 0.0, eps_grid: 0.0 }
    }
}

/// A single entry of a Chu evaluation table or an answer probability.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// Index into a finite symbol alphabet.
    Symbol(usize),
    Rational(Rational64),
    Float(f64),
}

impl Value {
    pub fn zero(mode: NumericMode) -> Value {
        match mode {
            NumericMode::Rational => Value::Rational(Rational64::zero()),
            NumericMode::Float => Value::Float(0.0),
        }
    }

    pub fn one(mode: NumericMode) -> Value {
        match mode {
            NumericMode::Rational => Value::Rational(Rational64::one()),
            NumericMode::Float => Value::Float(1.0),
        }
    }

    pub fn ratio(numer: i64, denom: i64) -> Value {
        Value::Rational(Rational64::new(numer, denom))
    }

    pub fn mode(&self) -> Option<NumericMode> {
        match self {
            Value::Symbol(_) => None,
            Value::Rational(_) => Some(NumericMode::Rational),
            Value::Float(_) => Some(NumericMode::Float),
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self {
            Value::Symbol(_) => None,
            Value::Rational(r) => r.to_f64(),
            Value::Float(x) => Some(*x),
        }
    }

    /// Exact zero test. Float values are zero only when they are `0.0`.
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Symbol(_) => false,
            Value::Rational(r) => r.is_zero(),
            Value::Float(x) => *x == 0.0,
        }
    }

    pub fn in_unit_interval(&self) -> bool {
        match self {
            Value::Symbol(_) => false,
            Value::Rational(r) => *r >= Rational64::zero() && *r <= Rational64::one(),
            Value::Float(x) => (0.0..=1.0).contains(x),
        }
    }

    /// Admissible as a "yes" probability: strictly positive and at most one.
    pub fn is_answer_probability(&self) -> bool {
        self.in_unit_interval() && !self.is_zero()
    }

    /// Equality under the numeric tower: symbols and rationals compare
    /// exactly, floats within `eps`. Mixed rational/float pairs compare as
    /// floats.
    pub fn eq_within(&self, other: &Value, eps: f64) -> bool {
        match (self, other) {
            (Value::Symbol(a), Value::Symbol(b)) => a == b,
            (Value::Rational(a), Value::Rational(b)) => a == b,
            (Value::Symbol(_), _) | (_, Value::Symbol(_)) => false,
            (a, b) => {
                let (x, y) = (a.to_f64().unwrap_or(f64::NAN), b.to_f64().unwrap_or(f64::NAN));
                (x - y).abs() <= eps
            }
        }
    }

    /// Key used for grouping during partition refinement.
    pub fn grid_key(&self, eps_grid: f64) -> ValueKey {
        match self {
            Value::Symbol(s) => ValueKey::Symbol(*s),
            Value::Rational(r) => ValueKey::Rational(*r),
            Value::Float(x) => {
                if eps_grid > 0.0 {
                    ValueKey::Grid((x / eps_grid).round() as i64)
                } else {
                    ValueKey::Bits(x.to_bits())
                }
            }
        }
    }

    pub fn render(&self) -> String {
        match self {
            Value::Symbol(i) => format!("#{i}"),
            Value::Rational(r) => r.to_string(),
            Value::Float(x) => format!("{x}"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Hashable equivalence key for a value. Float values are bucketed onto a
/// grid so that grouping is an equivalence relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKey {
    Symbol(usize),
    Rational(Rational64),
    Grid(i64),
    Bits(u64),
}

/// Parses `p/q` (or a bare integer `p`) into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational64, ValueError> {
    let bad = || ValueError::BadRational(s.to_string());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(n, d))
}

/// The value set K of a Chu space.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueAlphabet {
    Symbols(Arc<[String]>),
    RationalUnit,
    FloatUnit,
}

impl ValueAlphabet {
    pub fn symbols<S: Into<String>>(elements: impl IntoIterator<Item = S>) -> Result<Self, ValueError> {
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        if elements.is_empty() {
            return Err(ValueError::EmptyAlphabet);
        }
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(ValueError::DuplicateSymbol(e.clone()));
            }
        }
        Ok(ValueAlphabet::Symbols(elements.into()))
    }

    /// The two-element alphabet `{0, 1}`.
    pub fn boolean() -> Self {
        ValueAlphabet::Symbols(Arc::from(["0".to_string(), "1".to_string()]))
    }

    pub fn numeric(mode: NumericMode) -> Self {
        match mode {
            NumericMode::Rational => ValueAlphabet::RationalUnit,
            NumericMode::Float => ValueAlphabet::FloatUnit,
        }
    }

    pub fn mode(&self) -> Option<NumericMode> {
        match self {
            ValueAlphabet::Symbols(_) => None,
            ValueAlphabet::RationalUnit => Some(NumericMode::Rational),
            ValueAlphabet::FloatUnit => Some(NumericMode::Float),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ValueAlphabet::Symbols(_) => "symbol",
            ValueAlphabet::RationalUnit => "rational",
            ValueAlphabet::FloatUnit => "float",
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.check(v).is_ok()
    }

    pub fn check(&self, v: &Value) -> Result<(), ValueError> {
        let wrong = || ValueError::WrongKind { value: v.render(), alphabet: self.name() };
        match (self, v) {
            (ValueAlphabet::Symbols(els), Value::Symbol(i)) => {
                if *i < els.len() {
                    Ok(())
                } else {
                    Err(ValueError::UnknownSymbol { index: *i, size: els.len() })
                }
            }
            (ValueAlphabet::RationalUnit, Value::Rational(_)) | (ValueAlphabet::FloatUnit, Value::Float(_)) => {
                if v.in_unit_interval() {
                    Ok(())
                } else {
                    Err(ValueError::OutOfUnitInterval(v.render()))
                }
            }
            _ => Err(wrong()),
        }
    }

    /// Looks a symbol up by name.
    pub fn symbol(&self, name: &str) -> Result<Value, ValueError> {
        match self {
            ValueAlphabet::Symbols(els) => els
                .iter()
                .position(|e| e == name)
                .map(Value::Symbol)
                .ok_or_else(|| ValueError::UnknownSymbolName(name.to_string())),
            _ => Err(ValueError::WrongKind { value: name.to_string(), alphabet: self.name() }),
        }
    }

    pub fn symbol_name(&self, v: &Value) -> Option<&str> {
        match (self, v) {
            (ValueAlphabet::Symbols(els), Value::Symbol(i)) => els.get(*i).map(String::as_str),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("2/4").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_rational("1").unwrap(), Rational64::one());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn float_equality_uses_tolerance() {
        let a = Value::Float(0.5);
        let b = Value::Float(0.5 + 1e-12);
        assert!(a.eq_within(&b, 1e-9));
        assert!(!a.eq_within(&b, 0.0));
        assert!(Value::ratio(1, 2).eq_within(&Value::ratio(2, 4), 0.0));
        assert!(!Value::Symbol(0).eq_within(&Value::ratio(0, 1), 1.0));
    }

    #[test]
    fn grid_keys_bucket_nearby_floats() {
        let a = Value::Float(0.25).grid_key(1e-6);
        let b = Value::Float(0.25 + 1e-12).grid_key(1e-6);
        assert_eq!(a, b);
        assert_ne!(Value::Float(0.25).grid_key(0.0), Value::Float(0.25 + 1e-12).grid_key(0.0));
    }

    #[test]
    fn alphabet_membership() {
        let k = ValueAlphabet::boolean();
        assert!(k.contains(&Value::Symbol(1)));
        assert!(!k.contains(&Value::Symbol(2)));
        assert!(!k.contains(&Value::Float(0.5)));
        assert!(ValueAlphabet::RationalUnit.contains(&Value::ratio(1, 3)));
        assert!(!ValueAlphabet::RationalUnit.contains(&Value::ratio(3, 2)));
        assert!(!ValueAlphabet::FloatUnit.contains(&Value::Float(-0.1)));
        assert!(ValueAlphabet::symbols(Vec::<String>::new()).is_err());
        assert!(ValueAlphabet::symbols(["a", "a"]).is_err());
    }

    #[test]
    fn answer_probabilities_exclude_zero() {
        assert!(!Value::zero(NumericMode::Rational).is_answer_probability());
        assert!(Value::one(NumericMode::Float).is_answer_probability());
        assert!(!Value::Float(1.5).is_answer_probability());
    }
}
