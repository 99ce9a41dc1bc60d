//! Weights, coweights and the presheaf distance `ρ`.
//!
//! A weight of `(X, d)` is a map `φ: X → [0, ∞]` with
//! `φ(x) ≤ φ(y) + d(x, y)`. Weights are stored densely, one value per point,
//! and validated on construction; [`Weight::envelope`] is the only way to turn
//! an arbitrary array into a weight.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numerics::{self, ExtNonneg};
use crate::space::{FiniteSpace, SpaceError, SpaceRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("operands live on different spaces")]
    SpaceMismatch,
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("weight inequality fails: φ({y}) + d({x},{y}) = {lhs} < φ({x}) = {rhs}")]
    Inequality {
        x: String,
        y: String,
        lhs: ExtNonneg,
        rhs: ExtNonneg,
    },
    #[error("operation needs a nonempty family")]
    EmptyFamily,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

pub(crate) fn same_space(a: &SpaceRef, b: &SpaceRef) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// `ρ(λ, μ) = sup_x μ(x) ⊖ λ(x)` on raw value arrays of equal length.
pub fn rho_values(lambda: &[ExtNonneg], mu: &[ExtNonneg]) -> ExtNonneg {
    debug_assert_eq!(lambda.len(), mu.len());
    let mut best = ExtNonneg::zero();
    for (l, m) in lambda.iter().zip(mu) {
        let t = m.tminus(l);
        if t > best {
            best = t;
        }
    }
    best
}

/// First pair `(x, y)` breaking `φ(x) ≤ φ(y) + d(x, y)`, if any.
pub fn weight_violation(space: &FiniteSpace, values: &[ExtNonneg]) -> Option<(usize, usize)> {
    for x in space.points() {
        for y in space.points() {
            if values[y].add(space.d(x, y)) < values[x] {
                return Some((x, y));
            }
        }
    }
    None
}

/// A validated weight of a finite space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    space: SpaceRef,
    values: Vec<ExtNonneg>,
}

impl Weight {
    pub fn new(space: SpaceRef, values: Vec<ExtNonneg>) -> Result<Self, WeightError> {
        if values.len() != space.len() {
            return Err(WeightError::Length {
                expected: space.len(),
                got: values.len(),
            });
        }
        if let Some((x, y)) = weight_violation(&space, &values) {
            return Err(WeightError::Inequality {
                x: space.label(x).to_string(),
                y: space.label(y).to_string(),
                lhs: values[y].add(space.d(x, y)),
                rhs: values[x].clone(),
            });
        }
        Ok(Weight { space, values })
    }

    pub fn from_strs(space: SpaceRef, values: &[&str]) -> Result<Self, WeightError> {
        Self::new(space, values.iter().map(|t| numerics::q(t)).collect())
    }

    /// Caller guarantees the weight inequality.
    pub(crate) fn trusted(space: SpaceRef, values: Vec<ExtNonneg>) -> Self {
        debug_assert!(weight_violation(&space, &values).is_none());
        Weight { space, values }
    }

    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn values(&self) -> &[ExtNonneg] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &ExtNonneg {
        &self.values[x]
    }

    pub fn into_values(self) -> Vec<ExtNonneg> {
        self.values
    }

    /// The representable weight `d(-, x)`.
    pub fn yoneda(space: &SpaceRef, x: usize) -> Self {
        let values = space.points().map(|z| space.d(z, x).clone()).collect();
        Weight {
            space: space.clone(),
            values,
        }
    }

    pub fn yoneda_at(space: &SpaceRef, label: &str) -> Result<Self, WeightError> {
        let x = space.index_of(label)?;
        Ok(Self::yoneda(space, x))
    }

    /// The constant weight; every constant is a weight.
    pub fn constant(space: &SpaceRef, value: ExtNonneg) -> Self {
        Weight {
            space: space.clone(),
            values: vec![value; space.len()],
        }
    }

    fn check_same(&self, other: &Weight) -> Result<(), WeightError> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(WeightError::SpaceMismatch)
        }
    }

    /// `ρ(self, other) = sup_x other(x) ⊖ self(x)`.
    pub fn rho(&self, other: &Weight) -> Result<ExtNonneg, WeightError> {
        self.check_same(other)?;
        Ok(rho_values(&self.values, &other.values))
    }

    /// Pointwise minimum of a nonempty family.
    pub fn inf_of(family: &[Weight]) -> Result<Weight, WeightError> {
        Self::combine(family, |a, b| a.min(b))
    }

    /// Pointwise maximum of a nonempty family.
    pub fn sup_of(family: &[Weight]) -> Result<Weight, WeightError> {
        Self::combine(family, |a, b| a.max(b))
    }

    fn combine(
        family: &[Weight],
        pick: impl Fn(ExtNonneg, ExtNonneg) -> ExtNonneg,
    ) -> Result<Weight, WeightError> {
        let (first, rest) = family.split_first().ok_or(WeightError::EmptyFamily)?;
        let mut values = first.values.clone();
        for w in rest {
            first.check_same(w)?;
            for (v, o) in values.iter_mut().zip(&w.values) {
                *v = pick(std::mem::take(v), o.clone());
            }
        }
        Ok(Weight::trusted(first.space.clone(), values))
    }

    /// `r + φ`.
    pub fn plus(&self, r: &ExtNonneg) -> Weight {
        Weight::trusted(
            self.space.clone(),
            self.values.iter().map(|v| r.add(v)).collect(),
        )
    }

    /// `φ ⊖ r`.
    pub fn tminus(&self, r: &ExtNonneg) -> Weight {
        Weight::trusted(
            self.space.clone(),
            self.values.iter().map(|v| v.tminus(r)).collect(),
        )
    }

    /// The tropical lower envelope `x ↦ min_y f(y) + d(x, y)`: the pointwise
    /// largest weight lying below `f`.
    pub fn envelope(space: &SpaceRef, f: &[ExtNonneg]) -> Result<Weight, WeightError> {
        if f.len() != space.len() {
            return Err(WeightError::Length {
                expected: space.len(),
                got: f.len(),
            });
        }
        let values = space
            .points()
            .map(|x| numerics::inf(&space.points().map(|y| f[y].add(space.d(x, y))).collect::<Vec<_>>()))
            .collect();
        Ok(Weight::trusted(space.clone(), values))
    }

    /// `self ≤ other` pointwise (equivalently `ρ(other, self) = 0`).
    pub fn pointwise_leq(&self, other: &Weight) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn min_value(&self) -> &ExtNonneg {
        self.values.iter().min().expect("spaces are nonempty")
    }

    /// Moves the weight onto an equal space handle.
    pub fn rebase(&self, space: &SpaceRef) -> Result<Weight, WeightError> {
        if !same_space(&self.space, space) {
            return Err(WeightError::SpaceMismatch);
        }
        Ok(Weight {
            space: space.clone(),
            values: self.values.clone(),
        })
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// `y_X`: the Yoneda embedding, `x ↦ d(-, x)`.
pub fn yoneda(space: &SpaceRef, x: usize) -> Weight {
    Weight::yoneda(space, x)
}

/// Both sides of the Yoneda lemma: `(ρ(d(-, x), φ), φ(x))`.
pub fn yoneda_lemma_check(x: usize, phi: &Weight) -> (ExtNonneg, ExtNonneg) {
    let rep = Weight::yoneda(phi.space(), x);
    (
        rho_values(rep.values(), phi.values()),
        phi.value(x).clone(),
    )
}

/// A coweight: a non-expansive map into `([0, ∞], d_L)`, i.e.
/// `ψ(y) ≤ ψ(x) + d(x, y)`.
///
/// Stored as a weight of the opposite space, which satisfies exactly the same
/// inequality.
#[derive(Clone, PartialEq, Eq)]
pub struct Coweight {
    base: SpaceRef,
    as_weight: Weight,
}

impl Coweight {
    pub fn new(base: SpaceRef, values: Vec<ExtNonneg>) -> Result<Self, WeightError> {
        let op = Arc::new(base.opposite());
        let as_weight = Weight::new(op, values)?;
        Ok(Coweight { base, as_weight })
    }

    pub fn from_strs(base: SpaceRef, values: &[&str]) -> Result<Self, WeightError> {
        Self::new(base, values.iter().map(|t| numerics::q(t)).collect())
    }

    pub fn base(&self) -> &SpaceRef {
        &self.base
    }

    pub fn values(&self) -> &[ExtNonneg] {
        self.as_weight.values()
    }

    /// The same values viewed as a weight of the opposite space.
    pub fn as_opposite_weight(&self) -> &Weight {
        &self.as_weight
    }

    /// The representable coweight `d(x, -)`.
    pub fn corepresentable(base: &SpaceRef, x: usize) -> Self {
        let values = base.points().map(|z| base.d(x, z).clone()).collect();
        Coweight {
            base: base.clone(),
            as_weight: Weight::trusted(Arc::new(base.opposite()), values),
        }
    }
}

impl fmt::Debug for Coweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "co{:?}", self.as_weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::space::fixtures::{s2, s2z, star};
    use proptest::prelude::*;

    fn w(space: &SpaceRef, vals: &[&str]) -> Weight {
        Weight::from_strs(space.clone(), vals).unwrap()
    }

    #[test]
    fn rho_examples() {
        let s = s2();
        assert_eq!(w(&s, &["0", "2"]).rho(&w(&s, &["1", "0"])).unwrap(), q("1"));
        assert_eq!(w(&s, &["1", "0"]).rho(&w(&s, &["0", "2"])).unwrap(), q("2"));
        let phi = w(&s, &["1", "3"]);
        assert_eq!(phi.rho(&phi).unwrap(), q("0"));
        assert_eq!(
            phi.rho(&Weight::yoneda(&s2z(), 0)),
            Err(WeightError::SpaceMismatch)
        );
    }

    #[test]
    fn yoneda_examples() {
        assert_eq!(Weight::yoneda_at(&s2(), "a").unwrap().values(), &[q("0"), q("2")]);
        assert_eq!(Weight::yoneda(&star(), 0).values(), &[q("0")]);
        assert_eq!(Weight::yoneda_at(&s2z(), "b").unwrap().values(), &[q("0"), q("0")]);
        assert!(matches!(
            Weight::yoneda_at(&s2(), "z"),
            Err(WeightError::Space(SpaceError::UnknownPoint(_)))
        ));
    }

    #[test]
    fn yoneda_lemma_examples() {
        let s = s2();
        assert_eq!(yoneda_lemma_check(0, &Weight::yoneda(&s, 1)), (q("1"), q("1")));
        assert_eq!(yoneda_lemma_check(1, &Weight::yoneda(&s, 1)), (q("0"), q("0")));
        assert_eq!(yoneda_lemma_check(1, &w(&s, &["0", "0"])), (q("0"), q("0")));
    }

    #[test]
    fn lattice_examples() {
        let s = s2();
        let (ya, yb) = (Weight::yoneda(&s, 0), Weight::yoneda(&s, 1));
        let fam = [ya.clone(), yb.clone()];
        assert_eq!(Weight::inf_of(&fam).unwrap().values(), &[q("0"), q("0")]);
        assert_eq!(Weight::sup_of(&fam).unwrap().values(), &[q("1"), q("2")]);
        assert_eq!(Weight::sup_of(std::slice::from_ref(&ya)).unwrap(), ya);
        assert_eq!(Weight::inf_of(&[]), Err(WeightError::EmptyFamily));
        assert_eq!(
            Weight::inf_of(&[ya, Weight::yoneda(&s2z(), 0)]),
            Err(WeightError::SpaceMismatch)
        );
    }

    #[test]
    fn shift_examples() {
        let s = s2();
        assert_eq!(w(&s, &["0", "2"]).plus(&q("1")).values(), &[q("1"), q("3")]);
        let phi = w(&s, &["1", "3"]);
        assert_eq!(phi.tminus(&q("0")), phi);
        assert_eq!(phi.tminus(&q("2")).values(), &[q("0"), q("1")]);
    }

    #[test]
    fn envelope_examples() {
        let s = s2();
        let e = Weight::envelope(&s, &[q("2"), q("0")]).unwrap();
        assert_eq!(e.values(), &[q("1"), q("0")]);
        let phi = w(&s, &["1", "3"]);
        assert_eq!(Weight::envelope(&s, phi.values()).unwrap(), phi);
        assert_eq!(Weight::envelope(&s, &[q("0"), q("0")]).unwrap().values(), &[q("0"), q("0")]);
    }

    #[test]
    fn invalid_weight_reports_pair() {
        let err = Weight::from_strs(s2(), &["3", "0"]).unwrap_err();
        assert_eq!(
            err,
            WeightError::Inequality {
                x: "a".into(),
                y: "b".into(),
                lhs: q("1"),
                rhs: q("3")
            }
        );
    }

    #[test]
    fn coweights_are_weights_of_the_opposite() {
        let s = s2();
        // ψ(y) <= ψ(x) + d(x,y): (2, 0) fails at x=b,y=a? ψ(a)=2 <= ψ(b)+d(b,a)=2 ok;
        // ψ(b)=0 <= 2+1 ok.
        let psi = Coweight::from_strs(s.clone(), &["2", "0"]).unwrap();
        assert_eq!(psi.as_opposite_weight().space().table(), s.opposite().table());
        // (0, 2): ψ(b)=2 <= ψ(a)+d(a,b)=1 fails
        assert!(Coweight::from_strs(s.clone(), &["0", "2"]).is_err());
        // yet (0, 2) = y(a) is a weight
        assert!(Weight::from_strs(s.clone(), &["0", "2"]).is_ok());
        let co = Coweight::corepresentable(&s, 0);
        assert_eq!(co.values(), &[q("0"), q("1")]);
    }

    fn arb_space() -> impl Strategy<Value = SpaceRef> {
        let grid = ["0", "1/2", "1", "2", "inf"];
        (1usize..5, prop::collection::vec(0usize..5, 25)).prop_filter_map(
            "separated",
            move |(n, picks)| {
                crate::verification::gen::repaired_space(n, |i| q(grid[picks[i % 25]]))
            },
        )
    }

    proptest! {
        #[test]
        fn rho_is_a_quasi_metric_and_yoneda_is_isometric(
            space in arb_space(),
            seeds in prop::collection::vec(prop::collection::vec(0u64..6, 4), 3)
        ) {
            let ws: Vec<Weight> = seeds
                .iter()
                .map(|s| Weight::envelope(&space, &s[..space.len()].iter().map(|&v| ExtNonneg::from(v)).collect::<Vec<_>>()).unwrap())
                .collect();
            for a in &ws {
                prop_assert!(a.rho(a).unwrap().is_zero());
                for b in &ws {
                    // ρ(a,b) = 0 iff b ≤ a pointwise
                    prop_assert_eq!(a.rho(b).unwrap().is_zero(), b.pointwise_leq(a));
                    for c in &ws {
                        prop_assert!(a.rho(b).unwrap().add(&b.rho(c).unwrap()) >= a.rho(c).unwrap());
                    }
                }
                for x in space.points() {
                    let (l, r) = yoneda_lemma_check(x, a);
                    prop_assert_eq!(l, r);
                }
            }
            for x in space.points() {
                for y in space.points() {
                    let r = Weight::yoneda(&space, x).rho(&Weight::yoneda(&space, y)).unwrap();
                    prop_assert_eq!(&r, space.d(x, y));
                }
            }
        }

        #[test]
        fn envelope_laws(space in arb_space(), f in prop::collection::vec(0u64..8, 4), g in prop::collection::vec(0u64..8, 4)) {
            let n = space.len();
            let f: Vec<ExtNonneg> = f[..n].iter().map(|&v| ExtNonneg::from(v)).collect();
            let g: Vec<ExtNonneg> = f.iter().zip(&g[..n]).map(|(a, &b)| a.add(&ExtNonneg::from(b))).collect();
            let ef = Weight::envelope(&space, &f).unwrap();
            let eg = Weight::envelope(&space, &g).unwrap();
            prop_assert!(ef.values().iter().zip(&f).all(|(a, b)| a <= b));
            prop_assert!(ef.pointwise_leq(&eg));
            prop_assert_eq!(Weight::envelope(&space, ef.values()).unwrap(), ef.clone());
            prop_assert_eq!(ef.values() == &f[..], weight_violation(&space, &f).is_none());
        }
    }
}
