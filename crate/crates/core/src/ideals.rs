//! Ideals, bounded weights, colimits, and ideals generated by nets.
//!
//! On a finite carrier a weight `φ` is an ideal iff `min φ = 0` and every
//! pair `x, y` has a common witness `z` with `φ(z) + d(x, z) ≤ φ(x)` and
//! `φ(z) + d(y, z) ≤ φ(y)`. This reduction is validated against the ε-grid
//! oracle in [`crate::verification::oracle`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributors::NonExpansiveMap;
use crate::numerics::{self, ExtNonneg};
use crate::space::{prefix, SpaceError, SpaceRef, StreamedSpace};
use crate::weights::{rho_values, same_space, Coweight, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("spaces do not match")]
    SpaceMismatch,
    #[error("a streamed net needs a horizon")]
    MissingHorizon,
    #[error("unknown streamed net {0:?}")]
    UnknownNet(String),
    #[error("a net prefix must be nonempty")]
    EmptyPrefix,
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Result of [`is_ideal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdealCheck {
    Ideal,
    /// `min φ > 0`.
    InfimumNotZero(ExtNonneg),
    /// No common witness for this pair.
    NotDirected(usize, usize),
}

impl IdealCheck {
    pub fn holds(&self) -> bool {
        matches!(self, IdealCheck::Ideal)
    }
}

fn witnesses(phi: &Weight, x: usize, z: usize) -> bool {
    let v = phi.value(x);
    v.is_infinite() || phi.value(z).add(phi.space().d(x, z)) <= *v
}

pub fn is_ideal(phi: &Weight) -> IdealCheck {
    let min = phi.min_value();
    if !min.is_zero() {
        return IdealCheck::InfimumNotZero(min.clone());
    }
    let space = phi.space();
    for x in space.points() {
        for y in x + 1..space.len() {
            if !space.points().any(|z| witnesses(phi, x, z) && witnesses(phi, y, z)) {
                return IdealCheck::NotDirected(x, y);
            }
        }
    }
    IdealCheck::Ideal
}

/// `max_x d(x, a) ⊖ φ(x)`, the least `r` with `r + φ ≥ d(-, a)`.
pub fn bound_at(phi: &Weight, a: usize) -> ExtNonneg {
    let space = phi.space();
    numerics::sup(&space.points().map(|x| space.d(x, a).tminus(phi.value(x))).collect::<Vec<_>>())
}

/// An anchor `a` and the least bound `r` with `r + φ ≥ d(-, a)`, choosing the
/// smallest bound (first point on ties). `None` when every bound is infinite.
pub fn is_bounded(phi: &Weight) -> Option<(usize, ExtNonneg)> {
    phi.space()
        .points()
        .map(|a| (a, bound_at(phi, a)))
        .filter(|(_, r)| r.is_finite())
        .min_by(|l, r| l.1.cmp(&r.1))
}

/// The point `b` with `d(b, y) = ρ(φ, y(y))` for every `y`.
pub fn colimit_of(phi: &Weight) -> Option<usize> {
    let space = phi.space();
    let target: Vec<ExtNonneg> = space
        .points()
        .map(|y| {
            numerics::sup(&space.points().map(|x| space.d(x, y).tminus(phi.value(x))).collect::<Vec<_>>())
        })
        .collect();
    space.points().find(|&b| space.row(b) == target.as_slice())
}

/// The point `b` of `X` with `d_X(b, x) = ρ_K(φ, d_X(f(-), x))` for every `x`.
pub fn weighted_colimit(f: &NonExpansiveMap, phi: &Weight) -> Result<Option<usize>, IdealError> {
    if !same_space(f.source(), phi.space()) {
        return Err(IdealError::SpaceMismatch);
    }
    let (k, x_space) = (f.source(), f.target());
    let target: Vec<ExtNonneg> = x_space
        .points()
        .map(|x| {
            let column: Vec<ExtNonneg> = k.points().map(|i| x_space.d(f.apply(i), x).clone()).collect();
            rho_values(phi.values(), &column)
        })
        .collect();
    Ok(x_space.points().find(|&b| x_space.row(b) == target.as_slice()))
}

/// The point `a` of `X` with `d_X(x, a) = ρ(ψ, d_X(x, f(-)))` for every `x`,
/// the distance between coweights being `sup_k d_X(x, f k) ⊖ ψ(k)`.
pub fn weighted_limit(f: &NonExpansiveMap, psi: &Coweight) -> Result<Option<usize>, IdealError> {
    if !same_space(f.source(), psi.base()) {
        return Err(IdealError::SpaceMismatch);
    }
    let (k, x_space) = (f.source(), f.target());
    let target: Vec<ExtNonneg> = x_space
        .points()
        .map(|x| {
            let row: Vec<ExtNonneg> = k.points().map(|i| x_space.d(x, f.apply(i)).clone()).collect();
            rho_values(psi.values(), &row)
        })
        .collect();
    Ok(x_space
        .points()
        .find(|&a| x_space.points().all(|x| x_space.d(x, a) == &target[x])))
}

/// The point `x` with `φ = y(x)`.
pub fn is_representable(phi: &Weight) -> Option<usize> {
    let space = phi.space();
    space
        .points()
        .find(|&x| space.points().all(|z| space.d(z, x) == phi.value(z)))
}

/// Nets over registered streamed spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamNet {
    /// `n ↦ n/(n+1)` in `qlo`, increasing to the missing point `1`.
    QloAscending,
    /// `n ↦ n` in `nat`.
    NatAscending,
}

impl StreamNet {
    pub fn by_name(name: &str) -> Result<Self, IdealError> {
        match name {
            "qlo-ascending" => Ok(StreamNet::QloAscending),
            "nat-ascending" => Ok(StreamNet::NatAscending),
            other => Err(IdealError::UnknownNet(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StreamNet::QloAscending => "qlo-ascending",
            StreamNet::NatAscending => "nat-ascending",
        }
    }

    pub fn space(self) -> Arc<dyn StreamedSpace> {
        let name = match self {
            StreamNet::QloAscending => "qlo",
            StreamNet::NatAscending => "nat",
        };
        crate::space::streamed_by_name(name).expect("registered")
    }

    pub fn point(self, n: usize) -> String {
        match self {
            StreamNet::QloAscending => {
                if n == 0 {
                    "0".into()
                } else {
                    format!("{}/{}", n, n + 1)
                }
            }
            StreamNet::NatAscending => n.to_string(),
        }
    }

    /// Both registered nets generate the zero weight in the limit:
    /// `d(y, x_j) = y ⊖ x_j` vanishes eventually for every fixed `y`.
    pub fn limit_is_zero(self) -> bool {
        true
    }
}

/// A net given by a finite prefix, either repeated at its last point or
/// continued by a registered stream.
#[derive(Clone)]
pub enum NetPresentation {
    EventuallyConstant { space: SpaceRef, prefix: Vec<usize> },
    Streamed(StreamNet),
}

impl fmt::Debug for NetPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetPresentation::EventuallyConstant { space, prefix } => {
                let labels: Vec<&str> = prefix.iter().map(|&i| space.label(i)).collect();
                write!(f, "{labels:?} then constant")
            }
            NetPresentation::Streamed(s) => write!(f, "stream {}", s.name()),
        }
    }
}

impl NetPresentation {
    pub fn eventually_constant(space: &SpaceRef, prefix: &[&str]) -> Result<Self, IdealError> {
        if prefix.is_empty() {
            return Err(IdealError::EmptyPrefix);
        }
        let prefix = prefix
            .iter()
            .map(|l| space.index_of(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NetPresentation::EventuallyConstant {
            space: space.clone(),
            prefix,
        })
    }

    /// The net `f ∘ σ` for an eventually constant `σ`.
    pub fn map(&self, f: &NonExpansiveMap) -> Result<Self, IdealError> {
        match self {
            NetPresentation::EventuallyConstant { space, prefix } if same_space(space, f.source()) => {
                Ok(NetPresentation::EventuallyConstant {
                    space: f.target().clone(),
                    prefix: prefix.iter().map(|&i| f.apply(i)).collect(),
                })
            }
            _ => Err(IdealError::SpaceMismatch),
        }
    }
}

/// A value computed from the first `horizon` stages of a streamed net. It
/// claims nothing about later stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizonTagged<T> {
    pub horizon: usize,
    pub value: T,
}

/// Values of a weight on the points of a prefix view, by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageWeight {
    pub space: String,
    pub labels: Vec<String>,
    pub values: Vec<ExtNonneg>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetIdeal {
    Exact(Weight),
    Stage(HorizonTagged<StageWeight>),
}

/// `inf_i sup_{i ≤ j < len} d(y, x_j)`, the weight generated by a finite run.
fn inf_sup<F>(len: usize, dist_to: F) -> ExtNonneg
where
    F: Fn(usize) -> ExtNonneg,
{
    // suffix maxima, then their minimum
    let mut best = ExtNonneg::Infinity;
    let mut tail_max = ExtNonneg::zero();
    for j in (0..len).rev() {
        let v = dist_to(j);
        if v > tail_max {
            tail_max = v;
        }
        if tail_max < best {
            best = tail_max.clone();
        }
    }
    best
}

/// `φ = inf_i sup_{j ≥ i} d(-, x_j)`. Eventually constant nets give `y(last)`
/// exactly; streamed nets give the stage value over the first `horizon`
/// terms, evaluated on the first `horizon` points of the space.
pub fn ideal_from_net(net: &NetPresentation, horizon: Option<usize>) -> Result<NetIdeal, IdealError> {
    match net {
        NetPresentation::EventuallyConstant { space, prefix } => {
            let last = *prefix.last().ok_or(IdealError::EmptyPrefix)?;
            // the constant tail dominates every suffix; evaluate anyway
            let values = space
                .points()
                .map(|y| {
                    let tail = space.d(y, last).clone();
                    let run = inf_sup(prefix.len(), |j| space.d(y, prefix[j]).clone());
                    let with_tail = numerics::inf([&tail, &numerics::sup([&run, &tail])]);
                    debug_assert_eq!(with_tail, tail);
                    with_tail
                })
                .collect();
            Ok(NetIdeal::Exact(Weight::new(space.clone(), values).expect("representable")))
        }
        NetPresentation::Streamed(net) => {
            let h = horizon.ok_or(IdealError::MissingHorizon)?;
            let stream = net.space();
            let view = prefix(stream.as_ref(), h)?;
            let terms: Vec<String> = (0..h).map(|j| net.point(j)).collect();
            let mut values = Vec::with_capacity(h);
            for y in view.space.labels() {
                let dists = terms
                    .iter()
                    .map(|t| stream.distance(y, t))
                    .collect::<Result<Vec<_>, _>>()?;
                values.push(inf_sup(h, |j| dists[j].clone()));
            }
            Ok(NetIdeal::Stage(HorizonTagged {
                horizon: h,
                value: StageWeight {
                    space: view.name,
                    labels: view.space.labels().to_vec(),
                    values,
                },
            }))
        }
    }
}

/// The Yoneda limit of an eventually constant net: the `b` with
/// `d(b, y) = inf_i sup_{j ≥ i} d(x_j, y)`.
pub fn yoneda_limit(net: &NetPresentation) -> Option<usize> {
    let NetPresentation::EventuallyConstant { space, prefix } = net else {
        return None;
    };
    let last = *prefix.last()?;
    let target: Vec<ExtNonneg> = space
        .points()
        .map(|y| {
            let run = inf_sup(prefix.len(), |j| space.d(prefix[j], y).clone());
            numerics::inf([space.d(last, y), &numerics::sup([&run, space.d(last, y)])])
        })
        .collect();
    space.points().find(|&b| space.row(b) == target.as_slice())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CauchyCheck {
    Exact(bool),
    /// `inf_{i} sup_{i ≤ j ≤ k < H} d(x_j, x_k)` over the first `H` terms.
    Stage(HorizonTagged<ExtNonneg>),
}

/// The forward Cauchy quantity `inf_i sup_{k ≥ j ≥ i} d(x_j, x_k)`.
pub fn forward_cauchy(net: &NetPresentation, horizon: Option<usize>) -> Result<CauchyCheck, IdealError> {
    match net {
        NetPresentation::EventuallyConstant { .. } => Ok(CauchyCheck::Exact(true)),
        NetPresentation::Streamed(net) => {
            let h = horizon.ok_or(IdealError::MissingHorizon)?;
            let stream = net.space();
            let terms: Vec<String> = (0..h).map(|j| net.point(j)).collect();
            let mut best = ExtNonneg::Infinity;
            for i in 0..h {
                let mut worst = ExtNonneg::zero();
                for j in i..h {
                    for k in j..h {
                        let v = stream.distance(&terms[j], &terms[k])?;
                        if v > worst {
                            worst = v;
                        }
                    }
                }
                if worst < best {
                    best = worst;
                }
            }
            Ok(CauchyCheck::Stage(HorizonTagged { horizon: h, value: best }))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum BoundedNetVerdict {
    Bounded { anchor: String, bound: ExtNonneg },
    Unbounded,
    /// Streamed nets: `stage_bound` is the least `max_x d(x, a) ⊖ φ_H(x)`
    /// over prefix anchors; `limit` is the certified anchor and bound for the
    /// limit weight, from the space's closed form, when one exists.
    Stage(HorizonTagged<StageBound>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageBound {
    pub stage_anchor: String,
    pub stage_bound: ExtNonneg,
    pub limit: Option<(String, ExtNonneg)>,
}

impl BoundedNetVerdict {
    pub fn is_bounded(&self) -> bool {
        match self {
            BoundedNetVerdict::Bounded { .. } => true,
            BoundedNetVerdict::Unbounded => false,
            BoundedNetVerdict::Stage(t) => t.value.limit.is_some(),
        }
    }
}

/// Whether the ideal generated by `net` is bounded.
pub fn bounded_net_check(net: &NetPresentation, horizon: Option<usize>) -> Result<BoundedNetVerdict, IdealError> {
    match ideal_from_net(net, horizon)? {
        NetIdeal::Exact(phi) => Ok(match is_bounded(&phi) {
            Some((a, r)) => BoundedNetVerdict::Bounded {
                anchor: phi.space().label(a).to_string(),
                bound: r,
            },
            None => BoundedNetVerdict::Unbounded,
        }),
        NetIdeal::Stage(tagged) => {
            let NetPresentation::Streamed(stream_net) = net else {
                unreachable!("stage values come from streams")
            };
            let stream = stream_net.space();
            let stage = &tagged.value;
            let mut stage_best: Option<(String, ExtNonneg)> = None;
            for a in &stage.labels {
                let mut r = ExtNonneg::zero();
                for (x, phi_x) in stage.labels.iter().zip(&stage.values) {
                    let v = stream.distance(x, a)?.tminus(phi_x);
                    if v > r {
                        r = v;
                    }
                }
                if stage_best.as_ref().is_none_or(|(_, b)| r < *b) {
                    stage_best = Some((a.clone(), r));
                }
            }
            let (stage_anchor, stage_bound) = stage_best.expect("horizon is positive");
            // for the zero limit weight the least bound at a is sup_x d(x, a)
            let limit = if stream_net.limit_is_zero() {
                stage
                    .labels
                    .iter()
                    .filter_map(|a| stream.sup_distance_into(a).map(|r| (a.clone(), r)))
                    .filter(|(_, r)| r.is_finite())
                    .min_by(|l, r| l.1.cmp(&r.1))
            } else {
                None
            };
            Ok(BoundedNetVerdict::Stage(HorizonTagged {
                horizon: tagged.horizon,
                value: StageBound {
                    stage_anchor,
                    stage_bound,
                    limit,
                },
            }))
        }
    }
}
