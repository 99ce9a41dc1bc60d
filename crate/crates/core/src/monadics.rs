//! Classes of weights as monads, checked on finite batteries.
//!
//! The weights of a finite space form an infinite space `(𝒫X, ρ)`. A
//! [`BatterySubspace`] is a finite, deduplicated set of weights with `ρ` as
//! its distance; weights `Φ` on it stand in for weights on `𝒫X`, and every
//! law is checked relative to one battery.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributors::{DistributorError, NonExpansiveMap};
use crate::ideals::{colimit_of, is_bounded, is_ideal};
use crate::numerics::{self, ExtNonneg};
use crate::space::{FiniteSpace, SpaceError, SpaceRef};
use crate::verdict::{BatteryInfo, Verdict, Witness};
use crate::verification::gen::{gen_weights, GenConfig};
use crate::weights::{rho_values, same_space, Weight, WeightError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonadicsError {
    #[error("closure did not converge within {cap} rounds")]
    NonConvergence { cap: usize },
    #[error("battery member {0} is not in the class")]
    NotInClass(usize),
    #[error("battery must contain every representable weight")]
    MissingRepresentables,
    #[error("map does not preserve the colimit of battery member {0}")]
    Preservation(usize),
    #[error("battery is empty")]
    EmptyBattery,
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Distributor(#[from] DistributorError),
}

pub const DEFAULT_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightClassTag {
    All,
    Ideals,
    BoundedWeights,
    BoundedIdeals,
    /// `r + y(x)` with `0 < r < ∞`.
    BallWeights,
}

impl WeightClassTag {
    pub const ALL: [WeightClassTag; 5] = [
        WeightClassTag::All,
        WeightClassTag::Ideals,
        WeightClassTag::BoundedWeights,
        WeightClassTag::BoundedIdeals,
        WeightClassTag::BallWeights,
    ];

    pub fn admits(self, phi: &Weight) -> bool {
        match self {
            WeightClassTag::All => true,
            WeightClassTag::Ideals => is_ideal(phi).holds(),
            WeightClassTag::BoundedWeights => is_bounded(phi).is_some(),
            WeightClassTag::BoundedIdeals => is_ideal(phi).holds() && is_bounded(phi).is_some(),
            WeightClassTag::BallWeights => ball_weight_parts(phi).is_some(),
        }
    }
}

/// `(r, x)` with `φ = r + y(x)` and `0 < r < ∞`.
pub fn ball_weight_parts(phi: &Weight) -> Option<(ExtNonneg, usize)> {
    let space = phi.space();
    space.points().find_map(|x| {
        let r = phi.value(x);
        (r.is_finite() && !r.is_zero() && space.points().all(|z| r.add(space.d(z, x)) == *phi.value(z)))
            .then(|| (r.clone(), x))
    })
}

/// `ρ(r + y(x), s + y(y)) = (s + d(x, y)) ⊖ r`.
pub fn ball_weight_rho(space: &FiniteSpace, r: &ExtNonneg, x: usize, s: &ExtNonneg, y: usize) -> ExtNonneg {
    s.add(space.d(x, y)).tminus(r)
}

/// A finite set of weights of `base` as a quasi-metric space under `ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatterySubspace {
    base: SpaceRef,
    members: Vec<Weight>,
    space: SpaceRef,
}

impl BatterySubspace {
    /// Deduplicates `members` (keeping first occurrences) and validates the
    /// resulting `ρ` table.
    pub fn new(base: &SpaceRef, members: Vec<Weight>) -> Result<Self, MonadicsError> {
        let mut unique: Vec<Weight> = Vec::new();
        for m in members {
            if !same_space(m.space(), base) {
                return Err(WeightError::SpaceMismatch.into());
            }
            if !unique.contains(&m) {
                unique.push(m);
            }
        }
        if unique.is_empty() {
            return Err(MonadicsError::EmptyBattery);
        }
        let labels = (0..unique.len()).map(|i| format!("m{i}")).collect();
        let table = unique
            .iter()
            .map(|a| unique.iter().map(|b| rho_values(a.values(), b.values())).collect())
            .collect();
        let space = Arc::new(FiniteSpace::new(labels, table)?);
        Ok(BatterySubspace {
            base: base.clone(),
            members: unique,
            space,
        })
    }

    pub fn representables(base: &SpaceRef) -> Self {
        Self::new(base, base.points().map(|x| Weight::yoneda(base, x)).collect()).expect("representables are distinct")
    }

    pub fn base(&self) -> &SpaceRef {
        &self.base
    }

    pub fn members(&self) -> &[Weight] {
        &self.members
    }

    /// The battery as a finite space, points `m0, m1, …`.
    pub fn space(&self) -> &SpaceRef {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, phi: &Weight) -> Option<usize> {
        self.members.iter().position(|m| m == phi)
    }

    /// The map `x ↦ y(x)` into the battery, when every representable is a member.
    pub fn yoneda_map(&self) -> Result<NonExpansiveMap, MonadicsError> {
        let assignment = self
            .base
            .points()
            .map(|x| self.position(&Weight::yoneda(&self.base, x)))
            .collect::<Option<Vec<_>>>()
            .ok_or(MonadicsError::MissingRepresentables)?;
        Ok(NonExpansiveMap::new(self.base.clone(), self.space.clone(), assignment)?)
    }
}

pub fn unit(space: &SpaceRef, x: usize) -> Weight {
    Weight::yoneda(space, x)
}

/// `Φ ↦ min_i Φ(φ_i) + φ_i`.
pub fn mult(batt: &BatterySubspace, big_phi: &Weight) -> Result<Weight, MonadicsError> {
    if !same_space(big_phi.space(), batt.space()) {
        return Err(WeightError::SpaceMismatch.into());
    }
    let base = batt.base();
    let values = base
        .points()
        .map(|x| {
            numerics::inf(
                &batt
                    .members()
                    .iter()
                    .enumerate()
                    .map(|(i, m)| big_phi.value(i).add(m.value(x)))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    Ok(Weight::new(base.clone(), values)?)
}

fn weight_witness(detail: impl Into<String>, phi: &Weight) -> Witness {
    Witness::Weight {
        detail: detail.into(),
        labels: phi.space().labels().to_vec(),
        values: phi.values().to_vec(),
    }
}

/// Weights on the battery, generated deterministically from `cfg`.
pub fn battery_weights(batt: &BatterySubspace, cfg: &GenConfig) -> Vec<Weight> {
    gen_weights(batt.space(), cfg)
}

/// `mult` sends class members over the battery back into the class.
pub fn saturation_check(
    tag: WeightClassTag,
    batt: &BatterySubspace,
    phis: &[Weight],
    info: &BatteryInfo,
) -> Result<Verdict, MonadicsError> {
    let check = format!("saturation:{}", serde_json::to_value(tag).expect("tag").as_str().unwrap_or(""));
    if let Some(i) = batt.members().iter().position(|m| !tag.admits(m)) {
        return Err(MonadicsError::NotInClass(i));
    }
    for big_phi in phis.iter().filter(|p| tag.admits(p)) {
        let image = mult(batt, big_phi)?;
        if !tag.admits(&image) {
            return Ok(Verdict::refuted(check, weight_witness("mult image leaves the class", &image), info.clone()));
        }
    }
    Ok(Verdict::passed(check, info.clone()))
}

/// `𝒯y(φ')(ψ) = min_x φ'(x) + ρ(ψ, y(x))`, i.e. the pushforward along `y`.
pub fn t_yoneda(batt: &BatterySubspace, phi: &Weight) -> Result<Weight, MonadicsError> {
    Ok(batt.yoneda_map()?.pushforward(phi)?)
}

/// `ρ(mult Φ, φ) = ρ(Φ, ρ(φ_-, φ))` and `ρ(𝒯y φ', Φ) = ρ(φ', mult Φ)`, exactly,
/// for all generated `Φ` over the battery and `φ, φ'` of the base.
pub fn kz_string_check_with<M>(
    batt: &BatterySubspace,
    phis: &[Weight],
    base_weights: &[Weight],
    info: &BatteryInfo,
    mult_fn: M,
) -> Result<Verdict, MonadicsError>
where
    M: Fn(&BatterySubspace, &Weight) -> Result<Weight, MonadicsError>,
{
    const CHECK: &str = "kz-string";
    batt.yoneda_map()?;
    let mismatch = |detail: &str, l: &ExtNonneg, r: &ExtNonneg| {
        Verdict::refuted(
            CHECK,
            Witness::Mismatch {
                detail: detail.into(),
                left: l.to_string(),
                right: r.to_string(),
            },
            info.clone(),
        )
    };
    for big_phi in phis {
        let m = mult_fn(batt, big_phi)?;
        for phi in batt.members().iter().chain(base_weights) {
            let lhs = m.rho(phi)?;
            let restricted: Vec<ExtNonneg> = batt.members().iter().map(|psi| rho_values(psi.values(), phi.values())).collect();
            let rhs = rho_values(big_phi.values(), &restricted);
            if lhs != rhs {
                return Ok(mismatch(&format!("m ⊣ y at {phi:?}, Φ = {big_phi:?}"), &lhs, &rhs));
            }
        }
        for phi in base_weights {
            let lhs = t_yoneda(batt, phi)?.rho(big_phi)?;
            let rhs = phi.rho(&m)?;
            if lhs != rhs {
                return Ok(mismatch(&format!("𝒯y ⊣ m at {phi:?}, Φ = {big_phi:?}"), &lhs, &rhs));
            }
        }
    }
    Ok(Verdict::passed(CHECK, info.clone()))
}

pub fn kz_string_check(
    batt: &BatterySubspace,
    phis: &[Weight],
    base_weights: &[Weight],
    info: &BatteryInfo,
) -> Result<Verdict, MonadicsError> {
    kz_string_check_with(batt, phis, base_weights, info, mult)
}

/// Battery members of class `tag` that have a colimit, with that colimit.
fn with_colimits(tag: WeightClassTag, battery: &[Weight]) -> Vec<(&Weight, usize)> {
    battery
        .iter()
        .filter(|psi| tag.admits(psi))
        .filter_map(|psi| colimit_of(psi).map(|c| (psi, c)))
        .collect()
}

/// `ρ(ψ, φ) ≥ φ(colim ψ)` for every class member `ψ` of the battery with a colimit.
pub fn is_closed_weight(tag: WeightClassTag, phi: &Weight, battery: &[Weight], info: &BatteryInfo) -> Result<Verdict, MonadicsError> {
    const CHECK: &str = "closed-weight";
    for (psi, c) in with_colimits(tag, battery) {
        let lhs = psi.rho(phi)?;
        if lhs < *phi.value(c) {
            return Ok(Verdict::refuted(
                CHECK,
                Witness::Pair {
                    law: "ρ(ψ, φ) ≥ φ(colim ψ)".into(),
                    left: format!("{psi:?}"),
                    right: phi.space().label(c).into(),
                    lhs,
                    rhs: phi.value(c).clone(),
                },
                info.clone(),
            ));
        }
    }
    Ok(Verdict::passed(CHECK, info.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureOutcome {
    pub weight: Weight,
    pub rounds: usize,
}

/// Lowers `φ` at each colimit `c = colim ψ` to `ρ(ψ, φ)` and re-envelopes,
/// a full battery pass per round, until nothing changes.
pub fn closure(tag: WeightClassTag, phi: &Weight, battery: &[Weight], cap: usize) -> Result<ClosureOutcome, MonadicsError> {
    let members = with_colimits(tag, battery);
    let mut cur = phi.clone();
    for round in 0..=cap {
        let mut values = cur.values().to_vec();
        for (psi, c) in &members {
            let v = rho_values(psi.values(), &values);
            if v < values[*c] {
                values[*c] = v;
            }
        }
        let next = Weight::envelope(phi.space(), &values)?;
        if next == cur {
            return Ok(ClosureOutcome { weight: cur, rounds: round });
        }
        cur = next;
    }
    Err(MonadicsError::NonConvergence { cap })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaRound {
    pub round: usize,
    pub size: usize,
    pub added: usize,
}

/// Starts from the representables and adjoins `mult` images of generated
/// class weights over the current battery until no new member appears or
/// `rounds` is reached.
pub fn kappa_iterate(
    space: &SpaceRef,
    tag: WeightClassTag,
    rounds: usize,
    cfg: &GenConfig,
) -> Result<(BatterySubspace, Vec<KappaRound>), MonadicsError> {
    let mut batt = BatterySubspace::representables(space);
    let mut log = vec![KappaRound {
        round: 0,
        size: batt.len(),
        added: batt.len(),
    }];
    for round in 1..=rounds {
        let mut members = batt.members().to_vec();
        for big_phi in battery_weights(&batt, cfg).iter().filter(|p| tag.admits(p)) {
            let image = mult(&batt, big_phi)?;
            if !members.contains(&image) {
                members.push(image);
            }
        }
        let added = members.len() - batt.len();
        if added == 0 {
            break;
        }
        batt = BatterySubspace::new(space, members)?;
        log.push(KappaRound {
            round,
            size: batt.len(),
            added,
        });
    }
    Ok((batt, log))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflectedMap {
    /// `f̂(φ) = c(f→ φ)` for each member of the source battery.
    pub images: Vec<Weight>,
    /// `f̂(y(x)) = y(f x)` for every point.
    pub factorizes: bool,
}

/// `f̂(φ) = c(f→ φ)` on a battery of `X`, closure taken against a battery of
/// `Y`. Fails if `f` moves the colimit of a class member of `source_battery`.
pub fn reflect_map(
    f: &NonExpansiveMap,
    tag: WeightClassTag,
    source_battery: &[Weight],
    target_battery: &[Weight],
) -> Result<ReflectedMap, MonadicsError> {
    for (i, psi) in source_battery.iter().enumerate() {
        if !tag.admits(psi) {
            continue;
        }
        if let Some(c) = colimit_of(psi) {
            if colimit_of(&f.pushforward(psi)?) != Some(f.apply(c)) {
                return Err(MonadicsError::Preservation(i));
            }
        }
    }
    let hat = |phi: &Weight| -> Result<Weight, MonadicsError> {
        Ok(closure(tag, &f.pushforward(phi)?, target_battery, DEFAULT_CAP)?.weight)
    };
    let images = source_battery.iter().map(hat).collect::<Result<Vec<_>, _>>()?;
    let mut factorizes = true;
    for x in f.source().points() {
        factorizes &= hat(&Weight::yoneda(f.source(), x))? == Weight::yoneda(f.target(), f.apply(x));
    }
    Ok(ReflectedMap { images, factorizes })
}

/// Closed weights of `X` correspond to closed weights of the κ-battery along
/// `t: x ↦ y(x)`: pushforward lands in closed weights, pullback undoes it,
/// and `ρ` is preserved.
pub fn corollary_isometry_check(
    tag: WeightClassTag,
    kappa: &BatterySubspace,
    weights: &[Weight],
    info: &BatteryInfo,
) -> Result<Verdict, MonadicsError> {
    const CHECK: &str = "closed-weight-isometry";
    let t = kappa.yoneda_map()?;
    let base_battery: Vec<Weight> = kappa.members().to_vec();
    let kappa_battery = gen_weights(kappa.space(), &GenConfig::default());
    let closed: Vec<&Weight> = weights
        .iter()
        .filter(|w| matches!(is_closed_weight(tag, w, &base_battery, info), Ok(v) if !v.is_refuted()))
        .collect();
    let pushed = closed.iter().map(|w| t.pushforward(w)).collect::<Result<Vec<_>, _>>()?;
    for (w, p) in closed.iter().zip(&pushed) {
        if is_closed_weight(tag, p, &kappa_battery, info)?.is_refuted() {
            return Ok(Verdict::refuted(CHECK, weight_witness("pushforward is not closed", p), info.clone()));
        }
        if t.pullback(p)? != **w {
            return Ok(Verdict::refuted(CHECK, weight_witness("pullback does not invert", w), info.clone()));
        }
    }
    for (i, a) in closed.iter().enumerate() {
        for (j, b) in closed.iter().enumerate() {
            let (l, r) = (a.rho(b)?, pushed[i].rho(&pushed[j])?);
            if l != r {
                return Ok(Verdict::refuted(
                    CHECK,
                    Witness::Mismatch {
                        detail: format!("ρ changes between {a:?} and {b:?}"),
                        left: l.to_string(),
                        right: r.to_string(),
                    },
                    info.clone(),
                ));
            }
        }
    }
    Ok(Verdict::passed(CHECK, info.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::space::fixtures::{s2, star};

    fn w(space: &SpaceRef, vals: &[&str]) -> Weight {
        Weight::from_strs(space.clone(), vals).unwrap()
    }

    #[test]
    fn unit_examples() {
        let s = s2();
        assert_eq!(unit(&s, 0), w(&s, &["0", "2"]));
        assert_eq!(unit(&star(), 0).values(), &[q("0")]);
        for tag in WeightClassTag::ALL {
            assert_eq!(tag.admits(&unit(&s, 0)), tag != WeightClassTag::BallWeights, "{tag:?}");
        }
        assert_eq!(ball_weight_parts(&w(&s, &["1/2", "5/2"])), Some((q("1/2"), 0)));
    }

    #[test]
    fn mult_examples() {
        let s = s2();
        let batt = BatterySubspace::representables(&s);
        assert_eq!(batt.space().table(), s.table());
        let big_phi = w(batt.space(), &["0", "2"]);
        assert_eq!(mult(&batt, &big_phi).unwrap(), Weight::yoneda(&s, 0));
        for i in batt.space().points() {
            assert_eq!(mult(&batt, &Weight::yoneda(batt.space(), i)).unwrap(), batt.members()[i]);
        }
        let zero = w(batt.space(), &["0", "0"]);
        assert_eq!(mult(&batt, &zero).unwrap(), w(&s, &["0", "0"]));
    }

    #[test]
    fn battery_dedupes_and_labels() {
        let s = s2();
        let batt = BatterySubspace::new(&s, vec![Weight::yoneda(&s, 1), w(&s, &["1", "0"]), Weight::yoneda(&s, 0)]).unwrap();
        assert_eq!(batt.len(), 2);
        assert_eq!(batt.space().labels(), ["m0", "m1"]);
        assert_eq!(batt.space().d(0, 1), &q("2"));
    }

    #[test]
    fn saturation_examples() {
        let s = s2();
        let info = BatteryInfo::default();
        let batt = BatterySubspace::representables(&s);
        let phis = battery_weights(&batt, &GenConfig::default());
        for tag in [WeightClassTag::All, WeightClassTag::BoundedIdeals, WeightClassTag::BoundedWeights] {
            assert!(!saturation_check(tag, &batt, &phis, &info).unwrap().is_refuted());
        }
        let balls = BatterySubspace::new(&s, vec![w(&s, &["1", "3"]), w(&s, &["3/2", "1/2"]), w(&s, &["2", "4"])]).unwrap();
        let ball_phis = battery_weights(&balls, &GenConfig::default());
        assert!(!saturation_check(WeightClassTag::BallWeights, &balls, &ball_phis, &info).unwrap().is_refuted());
        // ρ between ball weights in closed form
        for a in balls.members() {
            for b in balls.members() {
                let (r, x) = ball_weight_parts(a).unwrap();
                let (t, y) = ball_weight_parts(b).unwrap();
                assert_eq!(a.rho(b).unwrap(), ball_weight_rho(&s, &r, x, &t, y));
            }
        }
        assert_eq!(
            saturation_check(WeightClassTag::BallWeights, &batt, &phis, &info),
            Err(MonadicsError::NotInClass(0))
        );
    }

    #[test]
    fn kz_examples() {
        let s = s2();
        let info = BatteryInfo::default();
        let cfg = GenConfig::default();
        let base_weights = gen_weights(&s, &cfg);
        let batt = BatterySubspace::new(&s, base_weights.clone()).unwrap();
        let phis = battery_weights(&batt, &cfg);
        assert!(!kz_string_check(&batt, &phis, &base_weights, &info).unwrap().is_refuted());
        let p = star();
        let single = BatterySubspace::representables(&p);
        let phis = battery_weights(&single, &cfg);
        assert!(!kz_string_check(&single, &phis, &gen_weights(&p, &cfg), &info).unwrap().is_refuted());
        let shifted = |b: &BatterySubspace, phi: &Weight| Ok(mult(b, phi)?.plus(&q("1/2")));
        let phis = battery_weights(&batt, &cfg);
        assert!(kz_string_check_with(&batt, &phis, &base_weights, &info, shifted).unwrap().is_refuted());
        let no_reps = BatterySubspace::new(&s, vec![w(&s, &["0", "0"])]).unwrap();
        assert_eq!(
            kz_string_check(&no_reps, &[], &[], &info),
            Err(MonadicsError::MissingRepresentables)
        );
    }

    #[test]
    fn closed_weight_examples() {
        let s = s2();
        let info = BatteryInfo::default();
        let battery = gen_weights(&s, &GenConfig::default());
        let tag = WeightClassTag::BoundedIdeals;
        for x in s.points() {
            assert!(!is_closed_weight(tag, &Weight::yoneda(&s, x), &battery, &info).unwrap().is_refuted());
        }
        let reps: Vec<Weight> = s.points().map(|x| Weight::yoneda(&s, x)).collect();
        for phi in &battery {
            assert!(!is_closed_weight(tag, phi, &reps, &info).unwrap().is_refuted());
        }
        let sup = Weight::sup_of(&battery[..3]).unwrap();
        assert!(!is_closed_weight(tag, &sup, &battery, &info).unwrap().is_refuted());
    }

    #[test]
    fn closure_examples() {
        let s = s2();
        let reps: Vec<Weight> = s.points().map(|x| Weight::yoneda(&s, x)).collect();
        for phi in gen_weights(&s, &GenConfig::default()) {
            let out = closure(WeightClassTag::BoundedIdeals, &phi, &reps, DEFAULT_CAP).unwrap();
            assert_eq!(out.weight, phi);
            assert_eq!(out.rounds, 0);
        }
    }

    #[test]
    fn kappa_examples() {
        let s = s2();
        let cfg = GenConfig::default();
        let (batt, log) = kappa_iterate(&s, WeightClassTag::BoundedIdeals, 4, &cfg).unwrap();
        assert_eq!(batt, BatterySubspace::representables(&s));
        assert_eq!(log.len(), 1);
        let (single, _) = kappa_iterate(&star(), WeightClassTag::BoundedIdeals, 4, &cfg).unwrap();
        assert_eq!(single.members(), &[Weight::yoneda(&star(), 0)]);
    }

    #[test]
    fn reflect_examples() {
        let s = s2();
        let tag = WeightClassTag::BoundedIdeals;
        let reps: Vec<Weight> = s.points().map(|x| Weight::yoneda(&s, x)).collect();
        let id = NonExpansiveMap::identity(&s);
        let r = reflect_map(&id, tag, &reps, &reps).unwrap();
        assert_eq!(r.images, reps);
        assert!(r.factorizes);
        let p = star();
        let to_star = NonExpansiveMap::constant(&s, &p, 0);
        let r = reflect_map(&to_star, tag, &reps, &[Weight::yoneda(&p, 0)]).unwrap();
        assert!(r.images.iter().all(|w| w == &Weight::yoneda(&p, 0)));
        assert!(r.factorizes);
        let kappa = BatterySubspace::representables(&s);
        let v = corollary_isometry_check(tag, &kappa, &gen_weights(&s, &GenConfig::default()), &BatteryInfo::default()).unwrap();
        assert!(!v.is_refuted());
    }
}
