//! Quasi-metric spaces.
//!
//! A [`FiniteSpace`] is an ordered list of point labels together with a total,
//! validated distance table. Streamed (countable) spaces live in
//! [`streamed`] and are only ever examined through finite prefixes.

pub mod streamed;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numerics::ExtNonneg;

pub use streamed::{prefix, streamed_by_name, NatDown, PrefixView, Qlo, StreamedSpace};

/// Shared handle to a finite space; weights, maps and distributors hold one.
pub type SpaceRef = Arc<FiniteSpace>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("a space needs at least one point")]
    Empty,
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("distance table has {rows} rows / row {row} has {cols} entries, expected {expected}")]
    Shape {
        expected: usize,
        rows: usize,
        row: usize,
        cols: usize,
    },
    #[error("reflexivity fails at {point:?}: d({point},{point}) = {value}")]
    Reflexivity { point: String, value: ExtNonneg },
    #[error("triangle fails at ({x:?},{y:?},{z:?}): d(x,y)+d(y,z) = {dxy}+{dyz} < d(x,z) = {dxz}")]
    Triangle {
        x: String,
        y: String,
        z: String,
        dxy: ExtNonneg,
        dyz: ExtNonneg,
        dxz: ExtNonneg,
    },
    #[error("separation fails: d({x},{y}) = d({y},{x}) = 0 for distinct points")]
    Separation { x: String, y: String },
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

/// A finite quasi-metric space with a total distance table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    labels: Vec<String>,
    // row-major, labels.len() squared
    dist: Vec<ExtNonneg>,
}

impl FiniteSpace {
    /// Validates the three quasi-metric axioms and builds the space.
    ///
    /// Checks run in the order reflexivity, triangle, separation; the first
    /// violation found is reported with its exact values.
    pub fn new(labels: Vec<String>, table: Vec<Vec<ExtNonneg>>) -> Result<Self, SpaceError> {
        let n = labels.len();
        if n == 0 {
            return Err(SpaceError::Empty);
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        if table.len() != n {
            return Err(SpaceError::Shape {
                expected: n,
                rows: table.len(),
                row: 0,
                cols: table.first().map_or(0, Vec::len),
            });
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != n {
                return Err(SpaceError::Shape {
                    expected: n,
                    rows: n,
                    row,
                    cols: r.len(),
                });
            }
        }
        let space = FiniteSpace {
            labels,
            dist: table.into_iter().flatten().collect(),
        };
        space.check_axioms()?;
        Ok(space)
    }

    /// Builds a space from string literals; convenient in tests and docs.
    ///
    /// ```
    /// use quasimetric::space::FiniteSpace;
    /// let s2 = FiniteSpace::from_strs(&["a", "b"], &[&["0", "1"], &["2", "0"]]).unwrap();
    /// assert_eq!(s2.d(0, 1).to_string(), "1");
    /// ```
    pub fn from_strs(labels: &[&str], table: &[&[&str]]) -> Result<Self, SpaceError> {
        let table = table
            .iter()
            .map(|row| row.iter().map(|t| crate::numerics::q(t)).collect())
            .collect();
        Self::new(labels.iter().map(|s| s.to_string()).collect(), table)
    }

    pub fn singleton(label: &str) -> Self {
        FiniteSpace {
            labels: vec![label.to_string()],
            dist: vec![ExtNonneg::zero()],
        }
    }

    fn check_axioms(&self) -> Result<(), SpaceError> {
        let n = self.len();
        for x in 0..n {
            if !self.d(x, x).is_zero() {
                return Err(SpaceError::Reflexivity {
                    point: self.labels[x].clone(),
                    value: self.d(x, x).clone(),
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let via = self.d(x, y).add(self.d(y, z));
                    if via < *self.d(x, z) {
                        return Err(SpaceError::Triangle {
                            x: self.labels[x].clone(),
                            y: self.labels[y].clone(),
                            z: self.labels[z].clone(),
                            dxy: self.d(x, y).clone(),
                            dyz: self.d(y, z).clone(),
                            dxz: self.d(x, z).clone(),
                        });
                    }
                }
            }
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if self.d(x, y).is_zero() && self.d(y, x).is_zero() {
                    return Err(SpaceError::Separation {
                        x: self.labels[x].clone(),
                        y: self.labels[y].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, SpaceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| SpaceError::UnknownPoint(label.to_string()))
    }

    /// `d(x, y)` by index.
    #[inline]
    pub fn d(&self, x: usize, y: usize) -> &ExtNonneg {
        &self.dist[x * self.labels.len() + y]
    }

    pub fn row(&self, x: usize) -> &[ExtNonneg] {
        let n = self.len();
        &self.dist[x * n..(x + 1) * n]
    }

    /// The table as nested rows.
    pub fn table(&self) -> Vec<Vec<ExtNonneg>> {
        (0..self.len()).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// The transposed space, `d_op(x, y) = d(y, x)`.
    pub fn opposite(&self) -> FiniteSpace {
        let n = self.len();
        let mut dist = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                dist.push(self.d(y, x).clone());
            }
        }
        FiniteSpace {
            labels: self.labels.clone(),
            dist,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.points()
            .all(|x| self.points().all(|y| self.d(x, y) == self.d(y, x)))
    }

    pub fn specialization_order(&self) -> SpecializationOrder {
        let mut pairs = BTreeSet::new();
        for x in self.points() {
            for y in self.points() {
                if self.d(x, y).is_zero() {
                    pairs.insert((x, y));
                }
            }
        }
        SpecializationOrder { pairs }
    }

    /// Restriction to a subset of points, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> FiniteSpace {
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let mut dist = Vec::with_capacity(indices.len() * indices.len());
        for &x in indices {
            for &y in indices {
                dist.push(self.d(x, y).clone());
            }
        }
        FiniteSpace { labels, dist }
    }
}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .points()
            .map(|x| self.row(x).iter().map(ToString::to_string).collect())
            .collect();
        f.debug_struct("FiniteSpace")
            .field("points", &self.labels)
            .field("dist", &rows)
            .finish()
    }
}

/// The underlying order: `x ⊑ y` iff `d(x, y) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecializationOrder {
    pairs: BTreeSet<(usize, usize)>,
}

impl SpecializationOrder {
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.pairs.contains(&(x, y))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    /// Non-reflexive pairs `x ⊑ y` with no `z` strictly between them.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let strict: Vec<_> = self.pairs().filter(|(x, y)| x != y).collect();
        strict
            .iter()
            .copied()
            .filter(|&(x, y)| {
                !strict
                    .iter()
                    .any(|&(a, z)| a == x && z != y && self.leq(z, y))
            })
            .collect()
    }

    pub fn is_partial_order(&self, n: usize) -> bool {
        let refl = (0..n).all(|x| self.leq(x, x));
        let antisym = self.pairs().all(|(x, y)| x == y || !self.leq(y, x));
        let trans = self
            .pairs()
            .all(|(x, y)| (0..n).all(|z| !self.leq(y, z) || self.leq(x, z)));
        refl && antisym && trans
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::numerics::q;

    #[test]
    fn validate_examples() {
        assert_eq!(star().len(), 1);
        assert_eq!(*s2().d(1, 0), q("2"));
        let err = FiniteSpace::from_strs(&["a", "b"], &[&["1", "1"], &["2", "0"]]).unwrap_err();
        assert_eq!(
            err,
            SpaceError::Reflexivity {
                point: "a".into(),
                value: q("1")
            }
        );
    }

    #[test]
    fn triangle_and_separation_violations_carry_values() {
        let err = FiniteSpace::from_strs(
            &["a", "b", "c"],
            &[&["0", "1", "3"], &["1", "0", "1"], &["3", "1", "0"]],
        )
        .unwrap_err();
        assert_eq!(
            err,
            SpaceError::Triangle {
                x: "a".into(),
                y: "b".into(),
                z: "c".into(),
                dxy: q("1"),
                dyz: q("1"),
                dxz: q("3")
            }
        );
        let err = FiniteSpace::from_strs(&["a", "b"], &[&["0", "0"], &["0", "0"]]).unwrap_err();
        assert_eq!(
            err,
            SpaceError::Separation {
                x: "a".into(),
                y: "b".into()
            }
        );
        assert!(matches!(
            FiniteSpace::from_strs(&["a", "a"], &[&["0", "1"], &["1", "0"]]),
            Err(SpaceError::DuplicateLabel(_))
        ));
        assert!(matches!(
            FiniteSpace::from_strs(&["a", "b"], &[&["0", "1"]]),
            Err(SpaceError::Shape { .. })
        ));
    }

    #[test]
    fn specialization_order_examples() {
        let o = s2().specialization_order();
        assert_eq!(o.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        let o = s2z().specialization_order();
        assert_eq!(o.pairs().collect::<Vec<_>>(), vec![(0, 0), (0, 1), (1, 1)]);
        assert_eq!(o.covers(), vec![(0, 1)]);
        assert!(o.is_partial_order(2));
        let o = star().specialization_order();
        assert_eq!(o.pairs().collect::<Vec<_>>(), vec![(0, 0)]);
    }

    #[test]
    fn opposite_examples() {
        let op = s2().opposite();
        assert_eq!(op.table(), vec![vec![q("0"), q("2")], vec![q("1"), q("0")]]);
        assert_eq!(op.opposite(), *s2());
        let sym = FiniteSpace::from_strs(&["a", "b"], &[&["0", "3"], &["3", "0"]]).unwrap();
        assert!(sym.is_symmetric());
        assert_eq!(sym.opposite(), sym);
        assert_eq!(star().opposite(), *star());
    }

    #[test]
    fn opposite_preserves_validity() {
        let s = FiniteSpace::from_strs(
            &["a", "b", "c"],
            &[&["0", "1", "3"], &["1/2", "0", "2"], &["inf", "inf", "0"]],
        )
        .unwrap();
        let op = s.opposite();
        let revalidated = FiniteSpace::new(op.labels().to_vec(), op.table()).unwrap();
        assert_eq!(revalidated, op);
    }
}
