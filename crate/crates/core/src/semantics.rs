//! Extended-real robustness values and signed-distance valuation of atoms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("NaN is not a valid robustness value")]
    NotANumber,
    #[error("predicate config line {line}: {msg}")]
    PredicateSyntax { line: usize, msg: String },
}

/// A robustness value: a real number or one of the two infinities.
///
/// NaN is never admitted, so the order on `Rho` is total.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Rho(f64);

impl Rho {
    pub const TOP: Rho = Rho(f64::INFINITY);
    pub const BOTTOM: Rho = Rho(f64::NEG_INFINITY);
    pub const ZERO: Rho = Rho(0.0);

    pub fn new(value: f64) -> Result<Self, SemanticsError> {
        if value.is_nan() {
            Err(SemanticsError::NotANumber)
        } else {
            Ok(Rho(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Multiplies by a strictly positive factor.
    pub fn scale(self, factor: f64) -> Rho {
        debug_assert!(factor > 0.0);
        Rho(self.0 * factor)
    }
}

impl Eq for Rho {}

impl Ord for Rho {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 < other.0 {
            Ordering::Less
        } else if self.0 > other.0 {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    }
}

impl PartialOrd for Rho {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Rho {
    type Output = Rho;

    #[inline]
    fn neg(self) -> Rho {
        Rho(-self.0)
    }
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            f.write_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            f.write_str("-inf")
        } else if self.0 == 0.0 {
            f.write_str("0")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Rho {
    type Err = SemanticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" => Ok(Rho::TOP),
            "-inf" => Ok(Rho::BOTTOM),
            other => other
                .parse::<f64>()
                .map_err(|_| SemanticsError::NotANumber)
                .and_then(Rho::new),
        }
    }
}

/// Maximum over a collection; the empty maximum is `-inf`.
pub fn emax<I: IntoIterator<Item = Rho>>(values: I) -> Rho {
    values.into_iter().fold(Rho::BOTTOM, Ord::max)
}

/// Minimum over a collection; the empty minimum is `+inf`.
pub fn emin<I: IntoIterator<Item = Rho>>(values: I) -> Rho {
    values.into_iter().fold(Rho::TOP, Ord::min)
}

/// One sample of the monitored system: named real-valued state variables at a time stamp.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateSample {
    pub time: f64,
    pub values: HashMap<String, f64>,
}

impl StateSample {
    pub fn new(time: f64) -> Self {
        StateSample {
            time,
            values: HashMap::new(),
        }
    }

    pub fn with(mut self, var: impl Into<String>, value: f64) -> Self {
        self.values.insert(var.into(), value);
        self
    }

    pub fn get(&self, var: &str) -> Result<f64, SemanticsError> {
        self.values
            .get(var)
            .copied()
            .ok_or_else(|| SemanticsError::UnknownVariable(var.to_string()))
    }
}

/// Closed subset of the real line on which an atom holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SetSpec {
    AtMost(f64),
    AtLeast(f64),
    Between(f64, f64),
}

impl SetSpec {
    /// Signed Euclidean distance from `x` to the set: positive inside, negative
    /// outside, zero on the boundary.
    pub fn signed_distance(&self, x: f64) -> f64 {
        match *self {
            SetSpec::AtMost(c) => c - x,
            SetSpec::AtLeast(c) => x - c,
            SetSpec::Between(a, b) => (x - a).min(b - x),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            SetSpec::AtMost(c) => x <= c,
            SetSpec::AtLeast(c) => x >= c,
            SetSpec::Between(a, b) => a <= x && x <= b,
        }
    }
}

/// Anything that can value an atomic proposition on a single sample.
pub trait Observation {
    fn distance(&self, sample: &StateSample) -> Result<Rho, SemanticsError>;
}

/// An atomic proposition bound to a one-variable closed set.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub name: String,
    pub variable: String,
    pub set: SetSpec,
}

impl Predicate {
    pub fn new(name: impl Into<String>, variable: impl Into<String>, set: SetSpec) -> Self {
        Predicate {
            name: name.into(),
            variable: variable.into(),
            set,
        }
    }

    pub fn signed_distance(&self, sample: &StateSample) -> Result<Rho, SemanticsError> {
        let x = sample.get(&self.variable)?;
        Rho::new(self.set.signed_distance(x))
    }
}

impl Observation for Predicate {
    fn distance(&self, sample: &StateSample) -> Result<Rho, SemanticsError> {
        self.signed_distance(sample)
    }
}

/// Wraps an observation and multiplies every distance by a positive constant.
#[derive(Debug, Clone)]
pub struct Scaled<O> {
    pub inner: O,
    pub factor: f64,
}

impl<O: Observation> Observation for Scaled<O> {
    fn distance(&self, sample: &StateSample) -> Result<Rho, SemanticsError> {
        Ok(self.inner.distance(sample)?.scale(self.factor))
    }
}

pub type PredicateMap = BTreeMap<String, Predicate>;

/// Parses a predicate configuration: one `name: <constraint>` per line where the
/// constraint is `var <= c`, `var >= c` or `a <= var <= b`. `#` starts a comment.
pub fn parse_predicates(text: &str) -> Result<PredicateMap, SemanticsError> {
    let mut out = PredicateMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| SemanticsError::PredicateSyntax {
            line: line_no,
            msg: msg.to_string(),
        };
        let (name, body) = line
            .split_once(':')
            .ok_or_else(|| err("expected `name: constraint`"))?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(err("invalid predicate name"));
        }
        if out.contains_key(name) {
            return Err(err("duplicate predicate name"));
        }
        let parts: Vec<&str> = body.split("<=").map(str::trim).collect();
        let pred = match parts.as_slice() {
            [lo, var, hi] => {
                let a = parse_const(lo).ok_or_else(|| err("invalid lower bound"))?;
                let b = parse_const(hi).ok_or_else(|| err("invalid upper bound"))?;
                if !is_identifier(var) {
                    return Err(err("invalid variable name"));
                }
                if a > b {
                    return Err(err("empty interval: lower bound exceeds upper bound"));
                }
                Predicate::new(name, *var, SetSpec::Between(a, b))
            }
            [var, c] => {
                if !is_identifier(var) {
                    return Err(err("invalid variable name"));
                }
                let c = parse_const(c).ok_or_else(|| err("invalid constant"))?;
                Predicate::new(name, *var, SetSpec::AtMost(c))
            }
            [single] => {
                let (var, c) = single
                    .split_once(">=")
                    .ok_or_else(|| err("expected `<=` or `>=`"))?;
                let var = var.trim();
                if !is_identifier(var) {
                    return Err(err("invalid variable name"));
                }
                let c = parse_const(c.trim()).ok_or_else(|| err("invalid constant"))?;
                Predicate::new(name, var, SetSpec::AtLeast(c))
            }
            _ => return Err(err("malformed constraint")),
        };
        out.insert(name.to_string(), pred);
    }
    Ok(out)
}

fn parse_const(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
