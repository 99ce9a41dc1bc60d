//! Exact refutations on `qlo`, the rationals in `[0, 1)` with `d(a, b) = a ⊖ b`.
//!
//! The zero weight is a bounded ideal there (its colimit would be the
//! missing point `1`), and the family `(0, 1)` has upper bounds `(a, t)` for
//! every `t ≤ a` but no least one. Candidates are the first `horizon`
//! enumerated points; every candidate is ruled out by an explicit stream
//! point, using `sup_x d(x, b) = 1 - b`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::numerics::ExtNonneg;
use crate::space::{Qlo, SpaceError, StreamedSpace};
use crate::verdict::{BallRecord, BatteryInfo, CandidateFailure, ColimitFailure, FailureReason, Verdict, Witness};

pub const ZERO_IDEAL: &str = "zero";
pub const COLIMIT_CHECK: &str = "qlo-bounded-ideal-colimit";
pub const LOCAL_DCPO_CHECK: &str = "qlo-local-dcpo";

fn value(label: &str) -> Result<BigRational, SpaceError> {
    match label.parse::<ExtNonneg>() {
        Ok(ExtNonneg::Finite(v)) if v < BigRational::one() => Ok(v),
        _ => Err(SpaceError::UnknownPoint(label.to_string())),
    }
}

fn label(v: &BigRational) -> String {
    Qlo::label_of(&ExtNonneg::Finite(v.clone()))
}

fn ext(v: BigRational) -> ExtNonneg {
    ExtNonneg::from_rational(v).expect("nonnegative")
}

/// The first term `n/(n+1)` of the ascending net lying strictly above `b`.
fn ascending_above(b: &BigRational) -> BigRational {
    let mut n: i64 = 1;
    loop {
        let x = BigRational::new(n.into(), (n + 1).into());
        if &x > b {
            return x;
        }
        n += 1;
    }
}

fn info(horizon: usize) -> BatteryInfo {
    BatteryInfo {
        seed: None,
        size: horizon,
        horizon: Some(horizon),
    }
}

fn anchor(horizon: usize) -> Result<(String, ExtNonneg), SpaceError> {
    let qlo = Qlo;
    let mut best: Option<(String, ExtNonneg)> = None;
    for a in qlo.points(horizon) {
        let r = qlo.sup_distance_into(&a).expect("closed form");
        if best.as_ref().is_none_or(|(_, b)| r < *b) {
            best = Some((a, r));
        }
    }
    best.ok_or(SpaceError::ZeroHorizon)
}

/// No enumerated point is a colimit of the zero ideal: at the test point
/// `b`, `d(b, b) = 0` while a stream point `x > b` gives `d(x, b) > 0`.
pub fn qlo_colimit_refutation(horizon: usize) -> Result<Verdict, SpaceError> {
    let (anchor, bound) = anchor(horizon)?;
    let mut failures = Vec::with_capacity(horizon);
    for b_label in Qlo.points(horizon) {
        let b = value(&b_label)?;
        let x = ascending_above(&b);
        failures.push(ColimitFailure {
            candidate: b_label.clone(),
            test_point: b_label,
            distance: ExtNonneg::zero(),
            stream_point: label(&x),
            lower_bound: ext(x - &b),
        });
    }
    Ok(Verdict::refuted(
        COLIMIT_CHECK,
        Witness::NoColimit {
            space: "qlo".into(),
            horizon,
            ideal: ZERO_IDEAL.into(),
            anchor,
            bound,
            failures,
        },
        info(horizon),
    ))
}

/// Radii tried at `b`: zero, `offset - d(x, b)` for enumerated `x`, and the
/// closed-form top radius `offset - (1 - b)`.
fn candidate_radii(points: &[String], b: &BigRational, offset: &BigRational) -> Result<Vec<BigRational>, SpaceError> {
    let mut radii = vec![BigRational::zero()];
    for x in points {
        let d = value(x)? - b;
        let t = offset - d.max(BigRational::zero());
        if t >= BigRational::zero() {
            radii.push(t);
        }
    }
    let top = offset - (BigRational::one() - b);
    if top >= BigRational::zero() {
        radii.push(top);
    }
    radii.sort();
    radii.dedup();
    Ok(radii)
}

fn candidate_list(horizon: usize, offset: &BigRational) -> Result<Vec<(String, BigRational)>, SpaceError> {
    let points = Qlo.points(horizon);
    let mut out = Vec::new();
    for b_label in &points {
        let b = value(b_label)?;
        for t in candidate_radii(&points, &b, offset)? {
            out.push((b_label.clone(), t));
        }
    }
    Ok(out)
}

fn record(point: &str, radius: BigRational) -> BallRecord {
    BallRecord {
        point: point.to_string(),
        radius: ext(radius),
    }
}

/// The family `{(x, 1 + r) : r > 0}` has an upper bound and no join among the
/// candidate balls.
pub fn qlo_local_dcpo_refutation(horizon: usize) -> Result<Verdict, SpaceError> {
    let offset = BigRational::one();
    let (a_label, sup_into_a) = anchor(horizon)?;
    // (a, t) is an upper bound iff sup_x d(x, a) + t ≤ offset
    let ExtNonneg::Finite(sup_into_a) = sup_into_a else { unreachable!("qlo distances into a point are bounded") };
    let upper_bound = record(&a_label, &offset - sup_into_a);
    let mut failures = Vec::new();
    for (b_label, t) in candidate_list(horizon, &offset)? {
        let b = value(&b_label)?;
        let top = &offset - (BigRational::one() - &b);
        let reason = if t > top {
            // some member (x, offset + r) is not below (b, t)
            // t ≤ offset, and t > top makes b + offset - t < 1
            let x = ascending_above(&(&b + &offset - &t));
            let gap = (&x - &b) + &t - &offset;
            let r = gap / BigRational::from_integer(2.into());
            FailureReason::NotUpperBound {
                member: record(&label(&x), &offset + r),
            }
        } else {
            let a = ascending_above(&b);
            let ta = &offset - (BigRational::one() - &a);
            FailureReason::NotLeast { bound: record(&label(&a), ta) }
        };
        failures.push(CandidateFailure {
            candidate: record(&b_label, t),
            reason,
        });
    }
    Ok(Verdict::refuted(
        LOCAL_DCPO_CHECK,
        Witness::NoJoin {
            space: "qlo".into(),
            horizon,
            ideal: ZERO_IDEAL.into(),
            offset: ext(offset),
            upper_bound,
            failures,
        },
        info(horizon),
    ))
}

fn finite(v: &ExtNonneg) -> Option<&BigRational> {
    v.as_rational()
}

/// Re-checks every inequality recorded in a `qlo` witness against the
/// distance oracle and the closed form. `Ok(false)` means the witness does
/// not establish what it claims.
pub fn check_streamed_witness(witness: &Witness) -> Result<bool, SpaceError> {
    let qlo = Qlo;
    match witness {
        Witness::NoColimit {
            space,
            horizon,
            ideal,
            anchor,
            bound,
            failures,
        } => {
            if space != "qlo" || ideal != ZERO_IDEAL || failures.len() != *horizon {
                return Ok(false);
            }
            if qlo.sup_distance_into(anchor).as_ref() != Some(bound) || !bound.is_finite() {
                return Ok(false);
            }
            for (f, expected) in failures.iter().zip(qlo.points(*horizon)) {
                if f.candidate != expected
                    || qlo.distance(&f.candidate, &f.test_point)? != f.distance
                    || qlo.distance(&f.stream_point, &f.test_point)? != f.lower_bound
                    || f.lower_bound <= f.distance
                {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Witness::NoJoin {
            space,
            horizon,
            ideal,
            offset,
            upper_bound,
            failures,
        } => {
            let Some(off) = finite(offset) else { return Ok(false) };
            if space != "qlo" || ideal != ZERO_IDEAL {
                return Ok(false);
            }
            let is_upper = |ball: &BallRecord| -> Result<bool, SpaceError> {
                value(&ball.point)?;
                let sup = qlo.sup_distance_into(&ball.point).expect("closed form");
                Ok(sup.add(&ball.radius) <= *offset)
            };
            if !is_upper(upper_bound)? {
                return Ok(false);
            }
            let expected = candidate_list(*horizon, off)?;
            if expected.len() != failures.len() {
                return Ok(false);
            }
            for ((b, t), f) in expected.iter().zip(failures) {
                if f.candidate.point != *b || f.candidate.radius != ext(t.clone()) {
                    return Ok(false);
                }
                let ok = match &f.reason {
                    FailureReason::NotUpperBound { member } => {
                        member.radius > *offset
                            && qlo.distance(&member.point, b)?.add(&f.candidate.radius) > member.radius
                    }
                    FailureReason::NotLeast { bound } => {
                        is_upper(bound)? && qlo.distance(b, &bound.point)?.add(&bound.radius) > f.candidate.radius
                    }
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Ok(false),
    }
}
