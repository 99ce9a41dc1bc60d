//! Min-plus distributor calculus.
//!
//! A distributor `φ: X ⇸ Y` is a table `φ(x, y)` obeying the bimodule law
//! `d_Y(y, y') + φ(x, y) + d_X(x', x) ≥ φ(x', y')`. Composition is the dense
//! min-plus product `(ψ ∘ φ)(x, z) = min_y ψ(y, z) + φ(x, y)`, and the
//! distance table of a space is the identity distributor on it.

use std::sync::Arc;

use thiserror::Error;

use crate::numerics::ExtNonneg;
use crate::space::{FiniteSpace, SpaceError, SpaceRef};
use crate::weights::{rho_values, same_space, Weight, WeightError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributorError {
    #[error("spaces do not match")]
    SpaceMismatch,
    #[error("table shape {rows}x{cols} does not match {expected_rows}x{expected_cols}")]
    Shape {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("bimodule law fails at x={x:?} x'={x2:?} y={y:?} y'={y2:?}")]
    Bimodule {
        x: String,
        x2: String,
        y: String,
        y2: String,
    },
    #[error("map is not non-expansive at ({x:?},{y:?}): d_X = {dx} < d_Y(f x, f y) = {dy}")]
    Expansive {
        x: String,
        y: String,
        dx: ExtNonneg,
        dy: ExtNonneg,
    },
    #[error("assignment has {got} entries, source has {expected} points")]
    Assignment { expected: usize, got: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// A validated distributor `source ⇸ target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distributor {
    source: SpaceRef,
    target: SpaceRef,
    // row-major: source index, then target index
    values: Vec<ExtNonneg>,
}

impl Distributor {
    pub fn new(
        source: SpaceRef,
        target: SpaceRef,
        table: Vec<Vec<ExtNonneg>>,
    ) -> Result<Self, DistributorError> {
        let (n, m) = (source.len(), target.len());
        if table.len() != n || table.iter().any(|r| r.len() != m) {
            return Err(DistributorError::Shape {
                rows: table.len(),
                cols: table.first().map_or(0, Vec::len),
                expected_rows: n,
                expected_cols: m,
            });
        }
        let phi = Distributor {
            source,
            target,
            values: table.into_iter().flatten().collect(),
        };
        phi.check_bimodule()?;
        Ok(phi)
    }

    fn trusted(source: SpaceRef, target: SpaceRef, values: Vec<ExtNonneg>) -> Self {
        Distributor {
            source,
            target,
            values,
        }
    }

    fn check_bimodule(&self) -> Result<(), DistributorError> {
        let (s, t) = (&self.source, &self.target);
        for x in s.points() {
            for y in t.points() {
                let v = self.get(x, y);
                for x2 in s.points() {
                    let left = v.add(s.d(x2, x));
                    for y2 in t.points() {
                        if t.d(y, y2).add(&left) < *self.get(x2, y2) {
                            return Err(DistributorError::Bimodule {
                                x: s.label(x).into(),
                                x2: s.label(x2).into(),
                                y: t.label(y).into(),
                                y2: t.label(y2).into(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `d_Y ∘ f ∘ d_X` for an arbitrary table `f`: the largest distributor
    /// lying below it.
    pub fn envelope(
        source: SpaceRef,
        target: SpaceRef,
        table: Vec<Vec<ExtNonneg>>,
    ) -> Result<Self, DistributorError> {
        let (n, m) = (source.len(), target.len());
        if table.len() != n || table.iter().any(|r| r.len() != m) {
            return Err(DistributorError::Shape {
                rows: table.len(),
                cols: table.first().map_or(0, Vec::len),
                expected_rows: n,
                expected_cols: m,
            });
        }
        let raw = Self::trusted(source.clone(), target.clone(), table.into_iter().flatten().collect());
        let left = compose(&Self::identity(&target), &raw)?;
        compose(&left, &Self::identity(&source))
    }

    /// The identity distributor `d: X ⇸ X`.
    pub fn identity(space: &SpaceRef) -> Self {
        let values = space
            .points()
            .flat_map(|x| space.row(x).to_vec())
            .collect();
        Self::trusted(space.clone(), space.clone(), values)
    }

    pub fn source(&self) -> &SpaceRef {
        &self.source
    }

    pub fn target(&self) -> &SpaceRef {
        &self.target
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &ExtNonneg {
        &self.values[x * self.target.len() + y]
    }

    pub fn table(&self) -> Vec<Vec<ExtNonneg>> {
        self.source
            .points()
            .map(|x| self.target.points().map(|y| self.get(x, y).clone()).collect())
            .collect()
    }

    /// `self ∘ inner`, i.e. first `inner: X ⇸ Y`, then `self: Y ⇸ Z`.
    pub fn after(&self, inner: &Distributor) -> Result<Distributor, DistributorError> {
        compose(self, inner)
    }

    /// The weight `φ(-, ⋆)` when the target is a singleton.
    pub fn as_weight(&self) -> Result<Weight, DistributorError> {
        if self.target.len() != 1 {
            return Err(DistributorError::SpaceMismatch);
        }
        Ok(Weight::new(self.source.clone(), self.values.clone())?)
    }

    /// A weight `φ` of `X` as the distributor `X ⇸ ⋆`.
    pub fn from_weight(phi: &Weight) -> Distributor {
        Self::trusted(
            phi.space().clone(),
            Arc::new(FiniteSpace::singleton("*")),
            phi.values().to_vec(),
        )
    }
}

/// `ψ ∘ φ (x, z) = min_y ψ(y, z) + φ(x, y)` for `φ: X ⇸ Y`, `ψ: Y ⇸ Z`.
pub fn compose(psi: &Distributor, phi: &Distributor) -> Result<Distributor, DistributorError> {
    if !same_space(&phi.target, &psi.source) {
        return Err(DistributorError::SpaceMismatch);
    }
    let (n, m, k) = (phi.source.len(), phi.target.len(), psi.target.len());
    let mut values = Vec::with_capacity(n * k);
    for x in 0..n {
        for z in 0..k {
            let mut best = ExtNonneg::Infinity;
            for y in 0..m {
                let v = psi.get(y, z).add(phi.get(x, y));
                if v < best {
                    best = v;
                }
            }
            values.push(best);
        }
    }
    Ok(Distributor::trusted(
        phi.source.clone(),
        psi.target.clone(),
        values,
    ))
}

/// A non-expansive map between finite spaces, by point index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonExpansiveMap {
    source: SpaceRef,
    target: SpaceRef,
    assignment: Vec<usize>,
}

impl NonExpansiveMap {
    pub fn new(
        source: SpaceRef,
        target: SpaceRef,
        assignment: Vec<usize>,
    ) -> Result<Self, DistributorError> {
        if assignment.len() != source.len() {
            return Err(DistributorError::Assignment {
                expected: source.len(),
                got: assignment.len(),
            });
        }
        if let Some(&bad) = assignment.iter().find(|&&i| i >= target.len()) {
            return Err(SpaceError::UnknownPoint(format!("#{bad}")).into());
        }
        for x in source.points() {
            for y in source.points() {
                let dy = target.d(assignment[x], assignment[y]);
                if source.d(x, y) < dy {
                    return Err(DistributorError::Expansive {
                        x: source.label(x).into(),
                        y: source.label(y).into(),
                        dx: source.d(x, y).clone(),
                        dy: dy.clone(),
                    });
                }
            }
        }
        Ok(NonExpansiveMap {
            source,
            target,
            assignment,
        })
    }

    /// Builds a map from `(source label, target label)` pairs.
    pub fn from_labels(
        source: SpaceRef,
        target: SpaceRef,
        pairs: &[(&str, &str)],
    ) -> Result<Self, DistributorError> {
        let mut assignment = vec![usize::MAX; source.len()];
        for (a, b) in pairs {
            assignment[source.index_of(a)?] = target.index_of(b)?;
        }
        if let Some(x) = assignment.iter().position(|&i| i == usize::MAX) {
            return Err(SpaceError::UnknownPoint(format!("no image for {}", source.label(x))).into());
        }
        Self::new(source, target, assignment)
    }

    pub fn identity(space: &SpaceRef) -> Self {
        NonExpansiveMap {
            source: space.clone(),
            target: space.clone(),
            assignment: space.points().collect(),
        }
    }

    pub fn constant(source: &SpaceRef, target: &SpaceRef, y: usize) -> Self {
        NonExpansiveMap {
            source: source.clone(),
            target: target.clone(),
            assignment: vec![y; source.len()],
        }
    }

    pub fn source(&self) -> &SpaceRef {
        &self.source
    }

    pub fn target(&self) -> &SpaceRef {
        &self.target
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &NonExpansiveMap) -> Result<NonExpansiveMap, DistributorError> {
        if !same_space(&self.target, &g.source) {
            return Err(DistributorError::SpaceMismatch);
        }
        Ok(NonExpansiveMap {
            source: self.source.clone(),
            target: g.target.clone(),
            assignment: self.assignment.iter().map(|&y| g.apply(y)).collect(),
        })
    }

    /// The graph `f_*: X ⇸ Y`, `(x, y) ↦ d_Y(f x, y)`.
    pub fn graph(&self) -> Distributor {
        let t = &self.target;
        let values = self
            .source
            .points()
            .flat_map(|x| t.row(self.apply(x)).to_vec())
            .collect();
        Distributor::trusted(self.source.clone(), t.clone(), values)
    }

    /// The cograph `f^*: Y ⇸ X`, `(y, x) ↦ d_Y(y, f x)`.
    pub fn cograph(&self) -> Distributor {
        let t = &self.target;
        let values = t
            .points()
            .flat_map(|y| self.source.points().map(move |x| t.d(y, self.apply(x)).clone()))
            .collect();
        Distributor::trusted(t.clone(), self.source.clone(), values)
    }

    /// `f→(φ) = φ ∘ f^*`: `y ↦ min_x φ(x) + d_Y(y, f x)`.
    pub fn pushforward(&self, phi: &Weight) -> Result<Weight, DistributorError> {
        if !same_space(phi.space(), &self.source) {
            return Err(DistributorError::SpaceMismatch);
        }
        let composed = compose(&Distributor::from_weight(phi), &self.cograph())?;
        Ok(Weight::trusted(self.target.clone(), composed.values))
    }

    /// `f←(ψ) = ψ ∘ f_*`, which evaluates to `x ↦ ψ(f x)`.
    pub fn pullback(&self, psi: &Weight) -> Result<Weight, DistributorError> {
        if !same_space(psi.space(), &self.target) {
            return Err(DistributorError::SpaceMismatch);
        }
        let composed = compose(&Distributor::from_weight(psi), &self.graph())?;
        Ok(Weight::trusted(self.source.clone(), composed.values))
    }
}

/// Outcome of an adjunction or equality sweep: `Ok` or the first failing pair
/// with both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairCheck {
    Holds,
    Fails {
        left_point: String,
        right_point: String,
        lhs: ExtNonneg,
        rhs: ExtNonneg,
        law: &'static str,
    },
}

impl PairCheck {
    pub fn holds(&self) -> bool {
        matches!(self, PairCheck::Holds)
    }
}

/// Checks `right ∘ left ≤ d_X` and `left ∘ right ≥ d_Y` for `left: X ⇸ Y`,
/// `right: Y ⇸ X`, pointwise and exactly.
pub fn adjunction_check_tables(
    left: &Distributor,
    right: &Distributor,
) -> Result<PairCheck, DistributorError> {
    let unit = compose(right, left)?;
    let counit = compose(left, right)?;
    let (x_space, y_space) = (left.source(), left.target());
    if !same_space(unit.target(), x_space) || !same_space(counit.target(), y_space) {
        return Err(DistributorError::SpaceMismatch);
    }
    for x in x_space.points() {
        for x2 in x_space.points() {
            if unit.get(x, x2) > x_space.d(x, x2) {
                return Ok(PairCheck::Fails {
                    left_point: x_space.label(x).into(),
                    right_point: x_space.label(x2).into(),
                    lhs: unit.get(x, x2).clone(),
                    rhs: x_space.d(x, x2).clone(),
                    law: "right∘left <= d_X",
                });
            }
        }
    }
    for y in y_space.points() {
        for y2 in y_space.points() {
            if counit.get(y, y2) < y_space.d(y, y2) {
                return Ok(PairCheck::Fails {
                    left_point: y_space.label(y).into(),
                    right_point: y_space.label(y2).into(),
                    lhs: counit.get(y, y2).clone(),
                    rhs: y_space.d(y, y2).clone(),
                    law: "left∘right >= d_Y",
                });
            }
        }
    }
    Ok(PairCheck::Holds)
}

/// Graph/cograph adjunction `f_* ⊣ f^*` for a non-expansive map.
pub fn adjunction_check(f: &NonExpansiveMap) -> PairCheck {
    adjunction_check_tables(&f.graph(), &f.cograph()).expect("graph and cograph are composable")
}

/// `ρ_Y(f→ φ, ψ)` and `ρ_X(φ, f← ψ)`; the adjunction `f→ ⊣ f←` says they agree.
pub fn pushforward_adjunction_sides(
    f: &NonExpansiveMap,
    phi: &Weight,
    psi: &Weight,
) -> Result<(ExtNonneg, ExtNonneg), DistributorError> {
    let push = f.pushforward(phi)?;
    let pull = f.pullback(psi)?;
    Ok((
        rho_values(push.values(), psi.values()),
        rho_values(phi.values(), pull.values()),
    ))
}

/// Whether `f ⊣ g`, i.e. `d_Y(f x, y) = d_X(x, g y)` for all `x`, `y`.
pub fn map_adjoint_pair(
    f: &NonExpansiveMap,
    g: &NonExpansiveMap,
) -> Result<PairCheck, DistributorError> {
    if !same_space(f.source(), g.target()) || !same_space(f.target(), g.source()) {
        return Err(DistributorError::SpaceMismatch);
    }
    let (x_space, y_space) = (f.source(), f.target());
    for x in x_space.points() {
        for y in y_space.points() {
            let lhs = y_space.d(f.apply(x), y);
            let rhs = x_space.d(x, g.apply(y));
            if lhs != rhs {
                return Ok(PairCheck::Fails {
                    left_point: x_space.label(x).into(),
                    right_point: y_space.label(y).into(),
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    law: "d_Y(f x, y) = d_X(x, g y)",
                });
            }
        }
    }
    Ok(PairCheck::Holds)
}

/// All maps `source → target` that are non-expansive (exhaustive; small spaces).
pub fn all_maps(source: &SpaceRef, target: &SpaceRef) -> Vec<NonExpansiveMap> {
    let (n, m) = (source.len(), target.len());
    let total = m.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let assignment = (0..n)
                .map(|_| {
                    let v = code % m;
                    code /= m;
                    v
                })
                .collect();
            NonExpansiveMap::new(source.clone(), target.clone(), assignment).ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::space::fixtures::{s2, s2z, star};

    #[test]
    fn identity_is_unital() {
        let s = s2();
        let phi = Distributor::new(s.clone(), s.clone(), vec![vec![q("1"), q("2")], vec![q("3"), q("1")]]);
        // (x=b -> x'=a): d_Y(y,y') + φ(x,y) + d_X(x',x) ≥ φ(x',y') must hold;
        let phi = phi.unwrap();
        let id = Distributor::identity(&s);
        assert_eq!(compose(&id, &phi).unwrap(), phi);
        assert_eq!(compose(&phi, &id).unwrap(), phi);
    }

    #[test]
    fn singleton_composition_adds() {
        let p = star();
        let r = Distributor::new(p.clone(), p.clone(), vec![vec![q("1/2")]]).unwrap();
        let s = Distributor::new(p.clone(), p.clone(), vec![vec![q("3")]]).unwrap();
        assert_eq!(compose(&s, &r).unwrap().get(0, 0), &q("7/2"));
    }

    #[test]
    fn bimodule_violation_is_rejected() {
        let s = s2();
        // φ(a,a)=0 forces φ(a,b) <= d(a,b) + 0 = 1
        let err = Distributor::new(s.clone(), s.clone(), vec![vec![q("0"), q("5")], vec![q("5"), q("5")]]);
        assert!(matches!(err, Err(DistributorError::Bimodule { .. })));
    }

    #[test]
    fn graph_examples() {
        let s = s2();
        let id = NonExpansiveMap::identity(&s);
        assert_eq!(id.graph(), Distributor::identity(&s));
        let to_star = NonExpansiveMap::constant(&s, &star(), 0);
        assert_eq!(to_star.graph().table(), vec![vec![q("0")], vec![q("0")]]);
        let collapse = NonExpansiveMap::from_labels(s.clone(), s.clone(), &[("a", "b"), ("b", "b")]).unwrap();
        assert_eq!(collapse.graph().table()[0], vec![q("2"), q("0")]);
        // the graph and cograph satisfy the bimodule law
        Distributor::new(s.clone(), s.clone(), collapse.graph().table()).unwrap();
        Distributor::new(s.clone(), s.clone(), collapse.cograph().table()).unwrap();
    }

    #[test]
    fn adjunction_examples() {
        let s = s2();
        let id = NonExpansiveMap::identity(&s);
        assert!(adjunction_check(&id).holds());
        let unit = compose(&id.cograph(), &id.graph()).unwrap();
        assert_eq!(unit, Distributor::identity(&s));
        // negative control: the zero table is a distributor but not a graph
        let zero = Distributor::new(s.clone(), s.clone(), vec![vec![q("0"); 2]; 2]).unwrap();
        match adjunction_check_tables(&zero, &id.cograph()).unwrap() {
            PairCheck::Fails { law, .. } => assert_eq!(law, "left∘right >= d_Y"),
            PairCheck::Holds => panic!("corrupted table passed"),
        }
    }

    #[test]
    fn pushforward_examples() {
        let s = s2();
        let phi = Weight::from_strs(s.clone(), &["1", "3"]).unwrap();
        assert_eq!(NonExpansiveMap::identity(&s).pushforward(&phi).unwrap(), phi);
        let to_star = NonExpansiveMap::constant(&s, &star(), 0);
        assert_eq!(to_star.pushforward(&phi).unwrap().values(), &[q("1")]);
        let collapse = NonExpansiveMap::from_labels(s.clone(), s.clone(), &[("a", "b"), ("b", "b")]).unwrap();
        for x in s.points() {
            assert_eq!(
                collapse.pushforward(&Weight::yoneda(&s, x)).unwrap(),
                Weight::yoneda(&s, collapse.apply(x))
            );
        }
        // pullback is precomposition
        let psi = Weight::from_strs(s.clone(), &["0", "0"]).unwrap();
        assert_eq!(collapse.pullback(&psi).unwrap().values(), &[q("0"), q("0")]);
        let psi = Weight::yoneda(&s, 0);
        assert_eq!(collapse.pullback(&psi).unwrap().values(), &[q("2"), q("2")]);
    }

    #[test]
    fn map_adjoint_examples() {
        let s = s2();
        let id = NonExpansiveMap::identity(&s);
        assert!(map_adjoint_pair(&id, &id).unwrap().holds());
        let z = s2z();
        let f = NonExpansiveMap::constant(&star(), &z, 1);
        let g = NonExpansiveMap::constant(&z, &star(), 0);
        match map_adjoint_pair(&f, &g).unwrap() {
            PairCheck::Fails { right_point, lhs, rhs, .. } => {
                assert_eq!(right_point, "a");
                assert_eq!((lhs, rhs), (q("1"), q("0")));
            }
            PairCheck::Holds => panic!(),
        }
        // the other way round, const a: ⋆ → S2z is left adjoint to the constant map
        let f = NonExpansiveMap::constant(&star(), &z, 0);
        assert!(map_adjoint_pair(&f, &g).unwrap().holds());
    }

    #[test]
    fn envelope_is_a_distributor() {
        let s = s2();
        let raw = vec![vec![q("0"), q("5")], vec![q("5"), q("5")]];
        let phi = Distributor::envelope(s.clone(), s.clone(), raw).unwrap();
        Distributor::new(s.clone(), s.clone(), phi.table()).unwrap();
        assert_eq!(phi.table(), vec![vec![q("0"), q("1")], vec![q("2"), q("3")]]);
    }

    #[test]
    fn expansive_maps_are_rejected() {
        let s = s2();
        let sym = Arc::new(FiniteSpace::from_strs(&["a", "b"], &[&["0", "5"], &["5", "0"]]).unwrap());
        assert!(matches!(
            NonExpansiveMap::new(s, sym, vec![0, 1]),
            Err(DistributorError::Expansive { .. })
        ));
    }
}
