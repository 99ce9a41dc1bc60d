//! Exact arithmetic on the extended half-line `[0, ∞]`.
//!
//! Every distance and weight value in the crate is an [`ExtNonneg`]: either a
//! nonnegative rational kept in lowest terms, or `∞`. The quantale operations
//! are addition (with `∞` absorbing) and truncated subtraction
//! `a ⊖ b = max(0, a - b)`, fixed at `∞ ⊖ ∞ = 0` by residuation.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An exact element of `[0, ∞]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtNonneg {
    /// A nonnegative rational in lowest terms.
    Finite(BigRational),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("cannot parse {0:?} as an extended nonnegative rational")]
    Syntax(String),
    #[error("negative value {0:?} is outside [0, inf]")]
    Negative(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("reduced denominator of {value:?} exceeds the cap {cap}")]
    DenominatorCap { value: String, cap: u64 },
    #[error("min/max of an empty family")]
    EmptyFamily,
}

impl ExtNonneg {
    pub fn zero() -> Self {
        ExtNonneg::Finite(BigRational::zero())
    }

    pub fn infinity() -> Self {
        ExtNonneg::Infinity
    }

    pub fn from_integer(n: u64) -> Self {
        ExtNonneg::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`, reduced. Panics on a zero denominator.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        ExtNonneg::Finite(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Wraps a rational; `None` when it is negative.
    pub fn from_rational(q: BigRational) -> Option<Self> {
        if q.is_negative() {
            None
        } else {
            Some(ExtNonneg::Finite(q))
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtNonneg::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtNonneg::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtNonneg::Finite(q) if q.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExtNonneg::Finite(q) => Some(q),
            ExtNonneg::Infinity => None,
        }
    }

    /// Exact sum; `∞` absorbs.
    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (ExtNonneg::Finite(a), ExtNonneg::Finite(b)) => ExtNonneg::Finite(a + b),
            _ => ExtNonneg::Infinity,
        }
    }

    /// Truncated subtraction `max(0, self - other)`, with `a ⊖ ∞ = 0` for
    /// every `a` and `∞ ⊖ b = ∞` for finite `b`.
    pub fn tminus(&self, other: &Self) -> Self {
        match (self, other) {
            (_, ExtNonneg::Infinity) => ExtNonneg::zero(),
            (ExtNonneg::Infinity, ExtNonneg::Finite(_)) => ExtNonneg::Infinity,
            (ExtNonneg::Finite(a), ExtNonneg::Finite(b)) => {
                if a > b {
                    ExtNonneg::Finite(a - b)
                } else {
                    ExtNonneg::zero()
                }
            }
        }
    }

    /// Exact `self - other` when `other ≤ self` and `other` is finite.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (_, ExtNonneg::Infinity) => None,
            (ExtNonneg::Infinity, _) => Some(ExtNonneg::Infinity),
            (ExtNonneg::Finite(a), ExtNonneg::Finite(b)) => {
                if a >= b {
                    Some(ExtNonneg::Finite(a - b))
                } else {
                    None
                }
            }
        }
    }

    /// Exact product with a nonnegative rational scalar (`0 · ∞ = 0`).
    pub fn scale(&self, factor: &BigRational) -> Self {
        assert!(!factor.is_negative(), "negative scale factor");
        match self {
            ExtNonneg::Finite(a) => ExtNonneg::Finite(a * factor),
            ExtNonneg::Infinity if factor.is_zero() => ExtNonneg::zero(),
            ExtNonneg::Infinity => ExtNonneg::Infinity,
        }
    }

    pub fn min_of<'a>(a: &'a Self, b: &'a Self) -> &'a Self {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of<'a>(a: &'a Self, b: &'a Self) -> &'a Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    /// Parses the textual encoding and rejects reduced denominators above `cap`.
    pub fn parse_capped(text: &str, cap: u64) -> Result<Self, NumericError> {
        let value: ExtNonneg = text.parse()?;
        if let ExtNonneg::Finite(q) = &value {
            if *q.denom() > BigInt::from(cap) {
                return Err(NumericError::DenominatorCap {
                    value: text.to_string(),
                    cap,
                });
            }
        }
        Ok(value)
    }
}

/// Exact `(minimum, maximum)` of a nonempty family.
pub fn minmax<'a, I>(family: I) -> Result<(ExtNonneg, ExtNonneg), NumericError>
where
    I: IntoIterator<Item = &'a ExtNonneg>,
{
    let mut iter = family.into_iter();
    let first = iter.next().ok_or(NumericError::EmptyFamily)?;
    let (mut lo, mut hi) = (first, first);
    for v in iter {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    Ok((lo.clone(), hi.clone()))
}

/// Minimum of a family, `∞` when empty (the infimum in `[0, ∞]`).
pub fn inf<'a, I>(family: I) -> ExtNonneg
where
    I: IntoIterator<Item = &'a ExtNonneg>,
{
    family
        .into_iter()
        .min()
        .cloned()
        .unwrap_or(ExtNonneg::Infinity)
}

/// Maximum of a family, `0` when empty (the supremum in `[0, ∞]`).
pub fn sup<'a, I>(family: I) -> ExtNonneg
where
    I: IntoIterator<Item = &'a ExtNonneg>,
{
    family.into_iter().max().cloned().unwrap_or_else(ExtNonneg::zero)
}

impl Ord for ExtNonneg {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNonneg::Finite(a), ExtNonneg::Finite(b)) => a.cmp(b),
            (ExtNonneg::Finite(_), ExtNonneg::Infinity) => Ordering::Less,
            (ExtNonneg::Infinity, ExtNonneg::Finite(_)) => Ordering::Greater,
            (ExtNonneg::Infinity, ExtNonneg::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtNonneg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for ExtNonneg {
    fn default() -> Self {
        ExtNonneg::zero()
    }
}

impl fmt::Display for ExtNonneg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNonneg::Infinity => f.write_str("inf"),
            ExtNonneg::Finite(q) if q.is_integer() => write!(f, "{}", q.numer()),
            ExtNonneg::Finite(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl fmt::Debug for ExtNonneg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_digits(part: &str, whole: &str) -> Result<BigInt, NumericError> {
    if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NumericError::Syntax(whole.to_string()));
    }
    part.parse::<BigInt>()
        .map_err(|_| NumericError::Syntax(whole.to_string()))
}

impl FromStr for ExtNonneg {
    type Err = NumericError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text == "inf" {
            return Ok(ExtNonneg::Infinity);
        }
        if text.starts_with('-') {
            return Err(NumericError::Negative(s.to_string()));
        }
        let (numer, denom) = match text.split_once('/') {
            Some((p, q)) => (parse_digits(p, s)?, parse_digits(q, s)?),
            None => (parse_digits(text, s)?, BigInt::from(1)),
        };
        if denom.is_zero() {
            return Err(NumericError::ZeroDenominator(s.to_string()));
        }
        Ok(ExtNonneg::Finite(BigRational::new(numer, denom)))
    }
}

impl Serialize for ExtNonneg {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtNonneg {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl From<u64> for ExtNonneg {
    fn from(n: u64) -> Self {
        ExtNonneg::from_integer(n)
    }
}

/// Shorthand used throughout tests and examples: `q("3/2")`, `q("inf")`.
///
/// Panics on malformed input.
pub fn q(text: &str) -> ExtNonneg {
    text.parse()
        .unwrap_or_else(|e| panic!("bad literal {text:?}: {e}"))
}
