//! Independent ground truth for small carriers.
//!
//! [`epsilon_grid_ideal`] decides idealhood straight from the ball set
//! `Bφ = {(x, r) : φ(x) < r}`: it asks for an upper bound inside `Bφ` of every
//! pair of balls `(x, φ(x) + ε)`, `(y, φ(y) + ε)` as `ε` runs down a dyadic
//! grid. [`oracle_ideal_enumeration`] sweeps every weight with values in a
//! bounded span of the entry grid and keeps the ones the ε-oracle accepts.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::ideals::{colimit_of, is_bounded};
use crate::numerics::ExtNonneg;
use crate::space::SpaceRef;
use crate::weights::{weight_violation, Weight};

pub const ORACLE_MAX_POINTS: usize = 3;
pub const EPSILON_DEPTH: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("exhaustive enumeration supports at most {ORACLE_MAX_POINTS} points, got {0}")]
    CarrierTooLarge(usize),
}

/// The ball `(z, φ(z) + ε/4)` lies in `Bφ` and is above `(x, r)` iff
/// `d(x, z) + φ(z) + ε/4 ≤ r`.
fn bound_in_ball_set(phi: &Weight, z: usize, eps: &ExtNonneg, x: usize, r: &ExtNonneg) -> bool {
    let quarter = eps.scale(&num_rational::BigRational::new(1.into(), 4.into()));
    phi.space().d(x, z).add(phi.value(z)).add(&quarter) <= *r
}

/// Idealhood by ε-directedness of `Bφ`, for `ε = 1, 1/2, …, 2^-depth`.
pub fn epsilon_grid_ideal(phi: &Weight, depth: u32) -> bool {
    if !phi.min_value().is_zero() {
        return false;
    }
    let space = phi.space();
    let finite: Vec<usize> = space.points().filter(|&x| phi.value(x).is_finite()).collect();
    (0..=depth).all(|k| {
        let eps = ExtNonneg::ratio(1, 1u64 << k);
        finite.iter().all(|&x| {
            finite.iter().all(|&y| {
                let rx = phi.value(x).add(&eps);
                let ry = phi.value(y).add(&eps);
                finite.iter().any(|&z| {
                    bound_in_ball_set(phi, z, &eps, x, &rx) && bound_in_ball_set(phi, z, &eps, y, &ry)
                })
            })
        })
    })
}

/// Finite sums of at most two grid entries, plus `∞`.
pub fn value_span(grid: &[ExtNonneg]) -> Vec<ExtNonneg> {
    let finite: Vec<&ExtNonneg> = grid.iter().filter(|v| v.is_finite()).collect();
    let mut span: BTreeSet<ExtNonneg> = BTreeSet::new();
    span.insert(ExtNonneg::zero());
    for a in &finite {
        span.insert((*a).clone());
        for b in &finite {
            span.insert(a.add(b));
        }
    }
    span.insert(ExtNonneg::Infinity);
    span.into_iter().collect()
}

/// Every weight of `space` with values in `span`.
pub fn weights_over_span(space: &SpaceRef, span: &[ExtNonneg]) -> Vec<Weight> {
    let n = space.len();
    let total = span.len().pow(n as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let values: Vec<ExtNonneg> = (0..n)
            .map(|_| {
                let v = span[code % span.len()].clone();
                code /= span.len();
                v
            })
            .collect();
        if weight_violation(space, &values).is_none() {
            out.push(Weight::new(space.clone(), values).expect("checked"));
        }
    }
    out
}

/// An ideal found by enumeration, with the equality witness chosen for each
/// unordered pair of points where `φ` is finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedIdeal {
    pub weight: Weight,
    pub witnesses: Vec<((usize, usize), usize)>,
}

fn witness_pattern(phi: &Weight) -> Vec<((usize, usize), usize)> {
    let space = phi.space();
    let tight = |x: usize, z: usize| phi.value(x).is_infinite() || phi.value(z).add(space.d(x, z)) == *phi.value(x);
    let mut out = Vec::new();
    for x in space.points() {
        for y in x..space.len() {
            if let Some(z) = space.points().find(|&z| tight(x, z) && tight(y, z)) {
                out.push(((x, y), z));
            }
        }
    }
    out
}

/// All ideals of a carrier with at most three points whose values lie in the
/// span of `grid`, decided by the ε-oracle.
///
/// On such a carrier every finite value of an ideal is realised as
/// `d(x, z)` with `φ(z) = 0` (take the common witness of `x` and a zero of
/// `φ`), so the span already contains every ideal of a space over `grid`.
pub fn oracle_ideal_enumeration(space: &SpaceRef, grid: &[ExtNonneg]) -> Result<Vec<EnumeratedIdeal>, OracleError> {
    if space.len() > ORACLE_MAX_POINTS {
        return Err(OracleError::CarrierTooLarge(space.len()));
    }
    let span = value_span(grid);
    Ok(weights_over_span(space, &span)
        .into_iter()
        .filter(|w| epsilon_grid_ideal(w, EPSILON_DEPTH))
        .map(|weight| EnumeratedIdeal {
            witnesses: witness_pattern(&weight),
            weight,
        })
        .collect())
}

/// `𝔴(x, y) = max φ(x) ⊖ d(y, colim φ)` over the bounded ideals in `ideals`
/// that have a colimit.
pub fn waybelow_from_ideals(space: &SpaceRef, ideals: &[Weight]) -> Vec<Vec<ExtNonneg>> {
    let mut table = vec![vec![ExtNonneg::zero(); space.len()]; space.len()];
    for phi in ideals {
        if is_bounded(phi).is_none() {
            continue;
        }
        let Some(c) = colimit_of(phi) else { continue };
        for x in space.points() {
            for y in space.points() {
                let v = phi.value(x).tminus(space.d(y, c));
                if v > table[x][y] {
                    table[x][y] = v;
                }
            }
        }
    }
    table
}

/// The exact `𝔴` table of a carrier with at most three points.
pub fn exhaustive_waybelow(space: &SpaceRef, grid: &[ExtNonneg]) -> Result<Vec<Vec<ExtNonneg>>, OracleError> {
    let ideals: Vec<Weight> = oracle_ideal_enumeration(space, grid)?.into_iter().map(|e| e.weight).collect();
    Ok(waybelow_from_ideals(space, &ideals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::is_ideal;
    use crate::space::fixtures::{s2, s2z, star};
    use crate::verification::gen::default_grid;

    fn enumerate(space: &SpaceRef) -> Vec<Weight> {
        oracle_ideal_enumeration(space, &default_grid())
            .unwrap()
            .into_iter()
            .map(|e| e.weight)
            .collect()
    }

    #[test]
    fn enumeration_examples() {
        let s = s2();
        let found = enumerate(&s);
        assert_eq!(found.len(), 2);
        assert!(s.points().all(|x| found.contains(&Weight::yoneda(&s, x))));
        let p = star();
        assert_eq!(enumerate(&p), vec![Weight::yoneda(&p, 0)]);
        let z = s2z();
        let found = enumerate(&z);
        assert_eq!(found.len(), 2);
        assert!(found.contains(&Weight::yoneda(&z, 0)));
        assert!(found.contains(&Weight::from_strs(z.clone(), &["0", "0"]).unwrap()));
        assert_eq!(Weight::yoneda(&z, 1).values(), Weight::from_strs(z.clone(), &["0", "0"]).unwrap().values());
    }

    #[test]
    fn epsilon_oracle_on_examples() {
        let s = s2();
        let zero = Weight::from_strs(s.clone(), &["0", "0"]).unwrap();
        assert!(!epsilon_grid_ideal(&zero, EPSILON_DEPTH));
        assert!(!is_ideal(&zero).holds());
        assert!(epsilon_grid_ideal(&Weight::yoneda(&s, 0), EPSILON_DEPTH));
    }

    #[test]
    fn span_is_sorted_and_closed() {
        let span = value_span(&default_grid());
        let texts: Vec<String> = span.iter().map(|v| v.to_string()).collect();
        assert_eq!(texts, ["0", "1/2", "1", "3/2", "2", "5/2", "3", "4", "inf"]);
    }

    #[test]
    fn too_large() {
        let space = crate::verification::gen::repaired_space(4, |_| ExtNonneg::from_integer(1)).unwrap();
        assert_eq!(
            oracle_ideal_enumeration(&space, &default_grid()),
            Err(OracleError::CarrierTooLarge(4))
        );
    }

    #[test]
    fn waybelow_on_s2_is_d() {
        let s = s2();
        assert_eq!(exhaustive_waybelow(&s, &default_grid()).unwrap(), s.table());
    }
}
