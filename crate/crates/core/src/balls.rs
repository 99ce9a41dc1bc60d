//! Formal balls `(x, r)` ordered by `(x, r) ⊑ (y, s) ⟺ d(x, y) + s ≤ r`.
//!
//! Directed families are kept as `(ideal, offset)`: the family
//! `{(x, offset + r) : r > φ(x)}`. Its upper bounds are the balls `(y, t)`
//! with `d(z, y) + t ≤ offset + φ(z)` wherever `φ(z) < ∞`, so at each `y` there
//! is a largest admissible radius and the join, when it exists, is the
//! `⊑`-least of those extremal balls.

pub mod streamed;

use thiserror::Error;

use crate::ideals::{colimit_of, is_bounded, is_ideal};
use crate::numerics::ExtNonneg;
use crate::space::{FiniteSpace, SpaceRef};
use crate::verdict::{BallRecord, BatteryInfo, CandidateFailure, FailureReason, Verdict, Witness};
use crate::weights::{same_space, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BallError {
    #[error("a formal ball needs a finite radius")]
    InfiniteRadius,
    #[error("need at least one ball")]
    EmptyFamily,
    #[error("spaces do not match")]
    SpaceMismatch,
    #[error("not an ideal: {0}")]
    NotIdeal(String),
    #[error("battery member {0} is not a bounded ideal")]
    NotBoundedIdeal(usize),
    #[error("table has {got} rows, space has {expected} points")]
    TableShape { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalBall {
    pub point: usize,
    pub radius: ExtNonneg,
}

impl FormalBall {
    pub fn new(point: usize, radius: ExtNonneg) -> Result<Self, BallError> {
        if radius.is_infinite() {
            return Err(BallError::InfiniteRadius);
        }
        Ok(FormalBall { point, radius })
    }

    pub fn shifted(&self, t: &ExtNonneg) -> FormalBall {
        FormalBall {
            point: self.point,
            radius: self.radius.add(t),
        }
    }

    pub fn record(&self, space: &FiniteSpace) -> BallRecord {
        BallRecord {
            point: space.label(self.point).to_string(),
            radius: self.radius.clone(),
        }
    }
}

/// `b1 ⊑ b2`, evaluated as `d(x, y) + s ≤ r`.
pub fn ball_leq(space: &FiniteSpace, b1: &FormalBall, b2: &FormalBall) -> bool {
    space.d(b1.point, b2.point).add(&b2.radius) <= b1.radius
}

/// The `⊑`-least element of `candidates`, if one lies below all the others.
fn least_of(space: &FiniteSpace, candidates: &[FormalBall]) -> Option<FormalBall> {
    candidates
        .iter()
        .find(|c| candidates.iter().all(|o| ball_leq(space, c, o)))
        .cloned()
}

/// Largest `s` with `(x_i, r_i) ⊑ (y, s)` for all `i`, if any.
fn top_radius_over(space: &FiniteSpace, balls: &[FormalBall], y: usize) -> Option<ExtNonneg> {
    let mut best: Option<ExtNonneg> = None;
    for b in balls {
        let s = b.radius.checked_sub(space.d(b.point, y))?;
        if best.as_ref().is_none_or(|cur| s < *cur) {
            best = Some(s);
        }
    }
    best
}

/// Least upper bound of a finite set of balls.
pub fn lub_finite(space: &FiniteSpace, balls: &[FormalBall]) -> Result<Option<FormalBall>, BallError> {
    if balls.is_empty() {
        return Err(BallError::EmptyFamily);
    }
    let candidates: Vec<FormalBall> = space
        .points()
        .filter_map(|y| top_radius_over(space, balls, y).map(|s| FormalBall { point: y, radius: s }))
        .collect();
    Ok(least_of(space, &candidates))
}

/// Brute force: among all balls with radius in `{0, step, …, cap}`, the
/// upper bounds of `balls` and the least of those.
pub fn grid_lub_oracle(space: &FiniteSpace, balls: &[FormalBall], step: &ExtNonneg, cap: &ExtNonneg) -> Option<FormalBall> {
    let mut radii = vec![ExtNonneg::zero()];
    while let Some(next) = radii.last().map(|r| r.add(step)).filter(|r| r <= cap) {
        radii.push(next);
    }
    let bounds: Vec<FormalBall> = space
        .points()
        .flat_map(|y| radii.iter().map(move |r| FormalBall { point: y, radius: r.clone() }))
        .filter(|c| balls.iter().all(|b| ball_leq(space, b, c)))
        .collect();
    least_of(space, &bounds)
}

/// The directed family `{(x, offset + r) : r > ideal(x)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedBallFamily {
    ideal: Weight,
    offset: ExtNonneg,
}

impl DirectedBallFamily {
    pub fn new(ideal: Weight, offset: ExtNonneg) -> Result<Self, BallError> {
        if offset.is_infinite() {
            return Err(BallError::InfiniteRadius);
        }
        let check = is_ideal(&ideal);
        if !check.holds() {
            return Err(BallError::NotIdeal(format!("{check:?}")));
        }
        Ok(DirectedBallFamily { ideal, offset })
    }

    pub fn ideal(&self) -> &Weight {
        &self.ideal
    }

    pub fn offset(&self) -> &ExtNonneg {
        &self.offset
    }

    pub fn space(&self) -> &SpaceRef {
        self.ideal.space()
    }

    pub fn shifted(&self, t: &ExtNonneg) -> DirectedBallFamily {
        DirectedBallFamily {
            ideal: self.ideal.clone(),
            offset: self.offset.add(t),
        }
    }

    pub fn normalized(&self) -> DirectedBallFamily {
        DirectedBallFamily {
            ideal: self.ideal.clone(),
            offset: ExtNonneg::zero(),
        }
    }

    pub fn contains(&self, ball: &FormalBall) -> bool {
        ball.radius > self.offset.add(self.ideal.value(ball.point))
    }

    /// A point `z` whose members `(z, offset + r)` include one above `ball`:
    /// `d(x, z) + offset + φ(z) < r`.
    pub fn member_above(&self, ball: &FormalBall) -> Option<usize> {
        let space = self.space();
        space.points().find(|&z| {
            self.ideal.value(z).is_finite()
                && space.d(ball.point, z).add(&self.offset).add(self.ideal.value(z)) < ball.radius
        })
    }

    /// Largest `t` making `(y, t)` an upper bound.
    pub fn top_radius(&self, y: usize) -> Option<ExtNonneg> {
        let space = self.space();
        let mut best: Option<ExtNonneg> = None;
        for z in space.points().filter(|&z| self.ideal.value(z).is_finite()) {
            let t = self.offset.add(self.ideal.value(z)).checked_sub(space.d(z, y))?;
            if best.as_ref().is_none_or(|cur| t < *cur) {
                best = Some(t);
            }
        }
        best
    }

    pub fn is_upper_bound(&self, ball: &FormalBall) -> bool {
        self.top_radius(ball.point).is_some_and(|t| ball.radius <= t)
    }

    /// The extremal upper bounds `(y, top_radius(y))`.
    pub fn extremal_bounds(&self) -> Vec<FormalBall> {
        self.space()
            .points()
            .filter_map(|y| self.top_radius(y).map(|t| FormalBall { point: y, radius: t }))
            .collect()
    }

    pub fn upper_bound(&self) -> Option<FormalBall> {
        self.extremal_bounds().into_iter().next()
    }
}

/// `(colim φ, offset)`, when the colimit exists.
pub fn family_join(fam: &DirectedBallFamily) -> Option<FormalBall> {
    colimit_of(fam.ideal()).map(|c| FormalBall {
        point: c,
        radius: fam.offset.clone(),
    })
}

/// The join computed in the ball order itself, with no reference to colimits.
pub fn direct_join(fam: &DirectedBallFamily) -> Option<FormalBall> {
    least_of(fam.space(), &fam.extremal_bounds())
}

fn family_witness(detail: impl Into<String>, fam: &DirectedBallFamily) -> Witness {
    Witness::Family {
        detail: detail.into(),
        labels: fam.space().labels().to_vec(),
        ideal: fam.ideal.values().to_vec(),
        offset: fam.offset.clone(),
    }
}

fn show(ball: &Option<FormalBall>, space: &FiniteSpace) -> String {
    match ball {
        Some(b) => format!("({}, {})", space.label(b.point), b.radius),
        None => "none".into(),
    }
}

pub const SHIFTS: [(u64, u64); 3] = [(1, 2), (1, 1), (2, 1)];

/// Joins are a colimit plus the offset, and shifting or normalising the
/// offset does not change whether a join exists.
pub fn standardness_suite(battery: &[DirectedBallFamily], info: &BatteryInfo) -> Verdict {
    const CHECK: &str = "standardness";
    for fam in battery {
        let space = fam.space();
        let join = direct_join(fam);
        if let Some(j) = &join {
            if family_join(fam).as_ref() != Some(j) {
                return Verdict::refuted(
                    CHECK,
                    Witness::Mismatch {
                        detail: "join is not (colimit, offset)".into(),
                        left: show(&join, space),
                        right: show(&family_join(fam), space),
                    },
                    info.clone(),
                );
            }
        }
        for (n, d) in SHIFTS {
            let t = ExtNonneg::ratio(n, d);
            let shifted = direct_join(&fam.shifted(&t));
            let expected = join.as_ref().map(|j| j.shifted(&t));
            if shifted != expected {
                return Verdict::refuted(
                    CHECK,
                    family_witness(format!("shift by {t} moves the join"), fam),
                    info.clone(),
                );
            }
        }
        if direct_join(&fam.normalized()).is_some() != join.is_some() {
            return Verdict::refuted(CHECK, family_witness("normalised family disagrees", fam), info.clone());
        }
    }
    Verdict::passed(CHECK, info.clone())
}

/// Every family with an upper bound has a join.
pub fn local_dcpo_verdict(battery: &[DirectedBallFamily], info: &BatteryInfo) -> Verdict {
    const CHECK: &str = "local-dcpo";
    for fam in battery {
        let Some(bound) = fam.upper_bound() else { continue };
        if direct_join(fam).is_some() {
            continue;
        }
        let space = fam.space();
        let candidates = fam.extremal_bounds();
        let failures = candidates
            .iter()
            .map(|c| {
                let other = candidates
                    .iter()
                    .find(|o| !ball_leq(space, c, o))
                    .expect("no least candidate");
                CandidateFailure {
                    candidate: c.record(space),
                    reason: FailureReason::NotLeast {
                        bound: other.record(space),
                    },
                }
            })
            .collect();
        return Verdict::refuted(
            CHECK,
            Witness::NoJoin {
                space: "finite".into(),
                horizon: space.len(),
                ideal: format!("{:?}", fam.ideal),
                offset: fam.offset.clone(),
                upper_bound: bound.record(space),
                failures,
            },
            info.clone(),
        );
    }
    Verdict::passed(CHECK, info.clone())
}

/// Every bounded ideal in the battery has a colimit.
pub fn j_algebra_verdict(battery: &[Weight], info: &BatteryInfo) -> Result<Verdict, BallError> {
    const CHECK: &str = "j-algebra";
    for (i, phi) in battery.iter().enumerate() {
        if !is_ideal(phi).holds() || is_bounded(phi).is_none() {
            return Err(BallError::NotBoundedIdeal(i));
        }
    }
    for phi in battery {
        if colimit_of(phi).is_none() {
            return Ok(Verdict::refuted(
                CHECK,
                Witness::Weight {
                    detail: "bounded ideal without colimit".into(),
                    labels: phi.space().labels().to_vec(),
                    values: phi.values().to_vec(),
                },
                info.clone(),
            ));
        }
    }
    Ok(Verdict::passed(CHECK, info.clone()))
}

/// Joins have radius equal to the offset, and the ball order is a local dcpo.
pub fn local_yoneda_conditions(battery: &[DirectedBallFamily], info: &BatteryInfo) -> Verdict {
    const CHECK: &str = "local-yoneda";
    for fam in battery {
        if let Some(j) = direct_join(fam) {
            if j.radius != fam.offset {
                return Verdict::refuted(CHECK, family_witness(format!("join radius {}", j.radius), fam), info.clone());
            }
        }
    }
    let local = local_dcpo_verdict(battery, info);
    if local.is_refuted() {
        return Verdict { check: CHECK.into(), ..local };
    }
    Verdict::passed(CHECK, info.clone())
}

/// Families `(φ, offset)` for every ideal and offset, skipping non-ideals.
pub fn families_from(ideals: &[Weight], offsets: &[ExtNonneg]) -> Vec<DirectedBallFamily> {
    ideals
        .iter()
        .filter(|phi| is_ideal(phi).holds())
        .flat_map(|phi| {
            offsets
                .iter()
                .filter_map(move |o| DirectedBallFamily::new(phi.clone(), o.clone()).ok())
        })
        .collect()
}

/// Both sides of "a 𝕁-algebra is exactly a standard space whose ball order
/// is a local dcpo", evaluated on one battery; refuted only if they disagree.
pub fn theorem_consistency(ideals: &[Weight], offsets: &[ExtNonneg], info: &BatteryInfo) -> Result<Verdict, BallError> {
    let bounded: Vec<Weight> = ideals
        .iter()
        .filter(|phi| is_ideal(phi).holds() && is_bounded(phi).is_some())
        .cloned()
        .collect();
    let families = families_from(&bounded, offsets);
    let left = j_algebra_verdict(&bounded, info)?;
    let std = standardness_suite(&families, info);
    let local = local_dcpo_verdict(&families, info);
    let yoneda = local_yoneda_conditions(&families, info);
    let right = !std.is_refuted() && !local.is_refuted();
    if left.is_refuted() == right || yoneda.is_refuted() != local.is_refuted() {
        return Ok(Verdict::refuted(
            "j-algebra-biconditional",
            Witness::Mismatch {
                detail: "the two sides disagree".into(),
                left: format!("{:?}", left.status),
                right: format!("standard {:?}, local dcpo {:?}", std.status, local.status),
            },
            info.clone(),
        ));
    }
    Ok(Verdict::passed("j-algebra-biconditional", info.clone()))
}

/// Thresholds `w(x, y)` for the claim `(x, r) ≪ (y, s) ⟺ r > s + w(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaybelowTable {
    pub labels: Vec<String>,
    pub table: Vec<Vec<ExtNonneg>>,
}

impl WaybelowTable {
    pub fn new(space: &FiniteSpace, table: Vec<Vec<ExtNonneg>>) -> Result<Self, BallError> {
        if table.len() != space.len() || table.iter().any(|r| r.len() != space.len()) {
            return Err(BallError::TableShape {
                expected: space.len(),
                got: table.len(),
            });
        }
        Ok(WaybelowTable {
            labels: space.labels().to_vec(),
            table,
        })
    }

    /// `w = d`.
    pub fn distance(space: &FiniteSpace) -> Self {
        WaybelowTable {
            labels: space.labels().to_vec(),
            table: space.table(),
        }
    }

    pub fn get(&self, x: usize, y: usize) -> &ExtNonneg {
        &self.table[x][y]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// `(x, r) ≪ (y, s)` relative to a battery: every battery family whose join
/// lies above `high` has a member above `low`. Returns the first family that
/// fails.
pub fn waybelow_on_battery<'a>(
    battery: &'a [DirectedBallFamily],
    low: &FormalBall,
    high: &FormalBall,
) -> Option<&'a DirectedBallFamily> {
    let joins: Vec<Option<FormalBall>> = battery.iter().map(direct_join).collect();
    first_failure(battery, &joins, low, high)
}

fn first_failure<'a>(
    battery: &'a [DirectedBallFamily],
    joins: &[Option<FormalBall>],
    low: &FormalBall,
    high: &FormalBall,
) -> Option<&'a DirectedBallFamily> {
    battery.iter().zip(joins).find_map(|(fam, j)| {
        let dominated = j.as_ref().is_some_and(|j| ball_leq(fam.space(), high, j));
        (dominated && fam.member_above(low).is_none()).then_some(fam)
    })
}

fn waybelow_witness(space: &FiniteSpace, low: &FormalBall, high: &FormalBall, fam: &DirectedBallFamily) -> Witness {
    Witness::Waybelow {
        low: low.record(space),
        high: high.record(space),
        labels: space.labels().to_vec(),
        ideal: fam.ideal.values().to_vec(),
        offset: fam.offset.clone(),
    }
}

pub fn waybelow_margins() -> [ExtNonneg; 2] {
    [ExtNonneg::from_integer(1), ExtNonneg::ratio(1, 64)]
}

/// `r > s + w(x, y)` implies `(x, r) ≪ (y, s)` on the battery, for every
/// pair with finite threshold, every `s` in `radii`, and `r = s + w + δ`.
pub fn waybelow_verify(
    space: &FiniteSpace,
    w: &WaybelowTable,
    battery: &[DirectedBallFamily],
    radii: &[ExtNonneg],
    info: &BatteryInfo,
) -> Result<Verdict, BallError> {
    const CHECK: &str = "waybelow";
    if w.len() != space.len() {
        return Err(BallError::TableShape {
            expected: space.len(),
            got: w.len(),
        });
    }
    if battery.iter().any(|f| **f.space() != *space) {
        return Err(BallError::SpaceMismatch);
    }
    let joins: Vec<Option<FormalBall>> = battery.iter().map(direct_join).collect();
    for x in space.points() {
        for y in space.points() {
            let threshold = w.get(x, y);
            if threshold.is_infinite() {
                continue;
            }
            for s in radii {
                let high = FormalBall::new(y, s.clone())?;
                for delta in waybelow_margins() {
                    let low = FormalBall::new(x, s.add(threshold).add(&delta))?;
                    if let Some(fam) = first_failure(battery, &joins, &low, &high) {
                        return Ok(Verdict::refuted(CHECK, waybelow_witness(space, &low, &high, fam), info.clone()));
                    }
                }
            }
        }
    }
    Ok(Verdict::passed(CHECK, info.clone()))
}

/// At the boundary `r = s + w(x, y)` the battery holds a family witnessing
/// that `(x, r) ≪ (y, s)` fails.
pub fn waybelow_sharpness(
    space: &FiniteSpace,
    w: &WaybelowTable,
    battery: &[DirectedBallFamily],
    radii: &[ExtNonneg],
    info: &BatteryInfo,
) -> Result<Verdict, BallError> {
    const CHECK: &str = "waybelow-sharpness";
    let joins: Vec<Option<FormalBall>> = battery.iter().map(direct_join).collect();
    for x in space.points() {
        for y in space.points() {
            let threshold = w.get(x, y);
            if threshold.is_infinite() {
                continue;
            }
            for s in radii {
                let high = FormalBall::new(y, s.clone())?;
                let low = FormalBall::new(x, s.add(threshold))?;
                if first_failure(battery, &joins, &low, &high).is_none() {
                    return Ok(Verdict::refuted(
                        CHECK,
                        Witness::Pair {
                            law: format!("no family refutes way-below at radius {s}"),
                            left: space.label(x).into(),
                            right: space.label(y).into(),
                            lhs: low.radius,
                            rhs: high.radius,
                        },
                        info.clone(),
                    ));
                }
            }
        }
    }
    Ok(Verdict::passed(CHECK, info.clone()))
}

/// `max φ(x) ⊖ d(y, colim φ)` over the bounded ideals of the battery that
/// have colimits: a lower bound for the exact threshold table.
pub fn j_below_estimate(space: &SpaceRef, battery: &[Weight]) -> WaybelowTable {
    let n = space.len();
    let mut table = vec![vec![ExtNonneg::zero(); n]; n];
    for phi in battery {
        if !same_space(phi.space(), space) || !is_ideal(phi).holds() || is_bounded(phi).is_none() {
            continue;
        }
        let Some(c) = colimit_of(phi) else { continue };
        for (x, row) in table.iter_mut().enumerate() {
            for (y, cell) in row.iter_mut().enumerate() {
                let v = phi.value(x).tminus(space.d(y, c));
                if v > *cell {
                    *cell = v;
                }
            }
        }
    }
    WaybelowTable {
        labels: space.labels().to_vec(),
        table,
    }
}

/// `min_z w(z, y) + w(x, z) = w(x, y)` everywhere, or the first failure.
pub fn interpolation_check(w: &WaybelowTable) -> Option<Witness> {
    let n = w.len();
    for x in 0..n {
        for y in 0..n {
            let composed = crate::numerics::inf(&(0..n).map(|z| w.get(z, y).add(w.get(x, z))).collect::<Vec<_>>());
            if composed != *w.get(x, y) {
                return Some(Witness::Pair {
                    law: "min_z w(z,y) + w(x,z) = w(x,y)".into(),
                    left: w.labels[x].clone(),
                    right: w.labels[y].clone(),
                    lhs: composed,
                    rhs: w.get(x, y).clone(),
                });
            }
        }
    }
    None
}
