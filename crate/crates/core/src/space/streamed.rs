//! Countable spaces given by a point enumerator and a distance oracle.
//!
//! Nothing about a streamed space is ever claimed beyond the points actually
//! sampled; every answer computed from one is tagged with the horizon it was
//! computed at. Two spaces are registered:
//!
//! * `qlo`: the rationals in `[0, 1)` with `d(a, b) = a ⊖ b`. Points are
//!   enumerated as `0` first, then the fractions `p/q` in lowest terms with
//!   `0 < p < q`, by increasing denominator `q` and then increasing numerator
//!   `p`: `0, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, …`.
//! * `nat`: the naturals with `d(m, n) = m ⊖ n`, enumerated in order.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;

use super::{FiniteSpace, SpaceError};
use crate::numerics::ExtNonneg;

/// A countable quasi-metric space. Oracles must be pure.
pub trait StreamedSpace: Send + Sync + fmt::Debug {
    /// Registered name, e.g. `"qlo"`.
    fn name(&self) -> &str;

    fn description(&self) -> &str;

    /// The point enumerated at `index`.
    fn point(&self, index: usize) -> String;

    fn distance(&self, a: &str, b: &str) -> Result<ExtNonneg, SpaceError>;

    /// Closed form for `sup_x d(x, b)` over the whole carrier, when the space
    /// knows one. Used to certify upper bounds that no finite prefix can.
    fn sup_distance_into(&self, _b: &str) -> Option<ExtNonneg> {
        None
    }

    fn points(&self, count: usize) -> Vec<String> {
        (0..count).map(|i| self.point(i)).collect()
    }
}

/// The first `horizon` points of a streamed space as a validated finite space.
///
/// The view says nothing about points past the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixView {
    pub name: String,
    pub horizon: usize,
    pub space: FiniteSpace,
}

pub fn prefix(space: &dyn StreamedSpace, horizon: usize) -> Result<PrefixView, SpaceError> {
    if horizon == 0 {
        return Err(SpaceError::ZeroHorizon);
    }
    let labels = space.points(horizon);
    let mut table = Vec::with_capacity(horizon);
    for a in &labels {
        let mut row = Vec::with_capacity(horizon);
        for b in &labels {
            row.push(space.distance(a, b)?);
        }
        table.push(row);
    }
    Ok(PrefixView {
        name: space.name().to_string(),
        horizon,
        space: FiniteSpace::new(labels, table)?,
    })
}

pub fn streamed_by_name(name: &str) -> Option<Arc<dyn StreamedSpace>> {
    match name {
        "qlo" => Some(Arc::new(Qlo)),
        "nat" => Some(Arc::new(NatDown)),
        _ => None,
    }
}

/// `ℚ ∩ [0, 1)` under `d(a, b) = a ⊖ b`; the underlying order is `≤`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Qlo;

impl Qlo {
    fn parse(label: &str) -> Result<BigRational, SpaceError> {
        match label.parse::<ExtNonneg>() {
            Ok(ExtNonneg::Finite(v)) if v < BigRational::one() => Ok(v),
            _ => Err(SpaceError::UnknownPoint(label.to_string())),
        }
    }

    /// `(numerator, denominator)` of the point at `index`.
    pub fn fraction(index: usize) -> (u64, u64) {
        if index == 0 {
            return (0, 1);
        }
        let mut remaining = index - 1;
        let mut den: u64 = 2;
        loop {
            for num in 1..den {
                if num.gcd(&den) == 1 {
                    if remaining == 0 {
                        return (num, den);
                    }
                    remaining -= 1;
                }
            }
            den += 1;
        }
    }

    pub fn label_of(value: &ExtNonneg) -> String {
        value.to_string()
    }
}

impl StreamedSpace for Qlo {
    fn name(&self) -> &str {
        "qlo"
    }

    fn description(&self) -> &str {
        "rationals in [0,1) with d(a,b) = a ⊖ b, enumerated 0 then p/q by denominator, numerator"
    }

    fn point(&self, index: usize) -> String {
        let (p, q) = Self::fraction(index);
        ExtNonneg::ratio(p, q).to_string()
    }

    fn distance(&self, a: &str, b: &str) -> Result<ExtNonneg, SpaceError> {
        let (a, b) = (Self::parse(a)?, Self::parse(b)?);
        Ok(ExtNonneg::Finite(a).tminus(&ExtNonneg::Finite(b)))
    }

    /// `sup_{x < 1} (x ⊖ b) = 1 - b`, not attained.
    fn sup_distance_into(&self, b: &str) -> Option<ExtNonneg> {
        let b = Self::parse(b).ok()?;
        Some(ExtNonneg::Finite(BigRational::one() - b))
    }
}

/// `ℕ` under `d(m, n) = m ⊖ n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NatDown;

impl NatDown {
    fn parse(label: &str) -> Result<BigInt, SpaceError> {
        if label.is_empty() || !label.bytes().all(|b| b.is_ascii_digit()) {
            return Err(SpaceError::UnknownPoint(label.to_string()));
        }
        label
            .parse()
            .map_err(|_| SpaceError::UnknownPoint(label.to_string()))
    }
}

impl StreamedSpace for NatDown {
    fn name(&self) -> &str {
        "nat"
    }

    fn description(&self) -> &str {
        "naturals with d(m,n) = m ⊖ n, enumerated in increasing order"
    }

    fn point(&self, index: usize) -> String {
        index.to_string()
    }

    fn distance(&self, a: &str, b: &str) -> Result<ExtNonneg, SpaceError> {
        let (a, b) = (Self::parse(a)?, Self::parse(b)?);
        let diff = if a > b { a - b } else { BigInt::from(0) };
        Ok(ExtNonneg::Finite(BigRational::from_integer(diff)))
    }

    fn sup_distance_into(&self, b: &str) -> Option<ExtNonneg> {
        Self::parse(b).ok().map(|_| ExtNonneg::Infinity)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    #[derive(Debug)]
    struct BadOracle;

    impl StreamedSpace for BadOracle {
        fn name(&self) -> &str {
            "bad"
        }
        fn description(&self) -> &str {
            "d(x,x) = 1"
        }
        fn point(&self, index: usize) -> String {
            format!("p{index}")
        }
        fn distance(&self, _a: &str, _b: &str) -> Result<ExtNonneg, SpaceError> {
            Ok(q("1"))
        }
    }

    #[test]
    fn qlo_enumeration_is_fixed() {
        let pts = Qlo.points(8);
        assert_eq!(pts, ["0", "1/2", "1/3", "2/3", "1/4", "3/4", "1/5", "2/5"]);
    }

    #[test]
    fn qlo_prefix_of_three() {
        let view = prefix(&Qlo, 3).unwrap();
        assert_eq!(view.horizon, 3);
        // d(a,b) = a ⊖ b over 0, 1/2, 1/3
        assert_eq!(
            view.space.table(),
            vec![
                vec![q("0"), q("0"), q("0")],
                vec![q("1/2"), q("0"), q("1/6")],
                vec![q("1/3"), q("0"), q("0")],
            ]
        );
    }

    #[test]
    fn horizon_one_is_a_point() {
        for s in [streamed_by_name("qlo").unwrap(), streamed_by_name("nat").unwrap()] {
            let view = prefix(s.as_ref(), 1).unwrap();
            assert_eq!(view.space.len(), 1);
            assert!(view.space.d(0, 0).is_zero());
        }
        assert_eq!(prefix(&Qlo, 0).unwrap_err(), SpaceError::ZeroHorizon);
    }

    #[test]
    fn bad_oracle_is_rejected() {
        assert!(matches!(
            prefix(&BadOracle, 2),
            Err(SpaceError::Reflexivity { .. })
        ));
    }

    #[test]
    fn shipped_prefixes_validate() {
        for n in 1..=6 {
            prefix(&Qlo, n).unwrap();
            prefix(&NatDown, n).unwrap();
        }
        prefix(&Qlo, 64).unwrap();
    }

    #[test]
    fn closed_form_sups() {
        assert_eq!(Qlo.sup_distance_into("1/3"), Some(q("2/3")));
        assert_eq!(NatDown.sup_distance_into("4"), Some(q("inf")));
        assert_eq!(Qlo.sup_distance_into("3/2"), None);
    }
}
