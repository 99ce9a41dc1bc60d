//! Named property suites, their reports, and replay.

use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balls::streamed::{check_streamed_witness, qlo_colimit_refutation, qlo_local_dcpo_refutation};
use crate::balls::{
    direct_join, family_join, families_from, grid_lub_oracle, interpolation_check, j_algebra_verdict,
    j_below_estimate, lub_finite, theorem_consistency, waybelow_sharpness, waybelow_verify, FormalBall,
    WaybelowTable,
};
use crate::distributors::{adjunction_check, all_maps, compose, pushforward_adjunction_sides, Distributor};
use crate::ideals::{bounded_net_check, colimit_of, is_bounded, is_ideal, is_representable, NetPresentation, StreamNet};
use crate::monadics::{
    battery_weights, closure, is_closed_weight, kappa_iterate, kz_string_check, mult, saturation_check,
    BatterySubspace, MonadicsError, WeightClassTag, DEFAULT_CAP,
};
use crate::numerics::ExtNonneg;
use crate::space::{prefix, Qlo, SpaceRef};
use crate::verdict::{BatteryInfo, Status, Verdict, Witness};
use crate::verification::gen::{all_small_spaces, gen_space, gen_weights, GenConfig};
use crate::verification::oracle::{epsilon_grid_ideal, value_span, waybelow_from_ideals, weights_over_span, EPSILON_DEPTH};
use crate::weights::{yoneda_lemma_check, Weight};

pub const SUITES: [&str; 11] = [
    "yoneda-lemma",
    "yoneda-isometry",
    "distributor-laws",
    "ideal-oracle-gate",
    "formal-ball-coherence",
    "j-algebra-theorem",
    "saturation",
    "kz-string",
    "continuity",
    "qlo-refutations",
    "closure-laws",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("check {check:?} is not part of suite {suite:?}")]
    UnknownCheck { suite: String, check: String },
}

/// One check of a suite, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub config: GenConfig,
    pub expected: Status,
    pub instances: usize,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckRecord {
    pub fn check(&self) -> &str {
        &self.verdict.check
    }

    /// The verdict is what the suite expects: a pass where a theorem applies,
    /// a refutation where the suite is built to produce one.
    pub fn as_expected(&self) -> bool {
        match self.expected {
            Status::Refuted => self.verdict.status == Status::Refuted,
            _ => self.verdict.status != Status::Refuted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: GenConfig,
    pub checks: Vec<CheckRecord>,
    pub non_convergence: bool,
    /// Wall-clock time; excluded from comparisons.
    pub elapsed_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.non_convergence && self.checks.iter().all(CheckRecord::as_expected)
    }

    /// 0 when every check is as expected, 3 on non-convergence, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.non_convergence {
            3
        } else if self.passed() {
            0
        } else {
            2
        }
    }

    /// The report with timing zeroed, for comparisons.
    pub fn canonical(&self) -> SuiteReport {
        SuiteReport {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    pub fn find(&self, check: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check() == check)
    }
}

/// Collects the first failure of a check over many instances.
struct Tally {
    check: String,
    instances: usize,
    witness: Option<Witness>,
}

impl Tally {
    fn new(check: &str) -> Self {
        Tally {
            check: check.into(),
            instances: 0,
            witness: None,
        }
    }

    fn observe(&mut self, failure: Option<Witness>) {
        self.observe_many(1, failure);
    }

    fn observe_many(&mut self, n: usize, failure: Option<Witness>) {
        self.instances += n;
        if self.witness.is_none() {
            self.witness = failure;
        }
    }

    fn finish(self, ok: Status, ctx: &Ctx) -> CheckRecord {
        let verdict = match self.witness {
            Some(w) => Verdict::refuted(self.check, w, ctx.info(self.instances)),
            None => Verdict::new(self.check, ok, ctx.info(self.instances)),
        };
        ctx.record(verdict, Status::BatteryPassed, self.instances)
    }
}

struct Ctx {
    suite: String,
    cfg: GenConfig,
}

impl Ctx {
    fn info(&self, size: usize) -> BatteryInfo {
        BatteryInfo {
            seed: Some(self.cfg.seed),
            size,
            horizon: None,
        }
    }

    fn record(&self, verdict: Verdict, expected: Status, instances: usize) -> CheckRecord {
        CheckRecord {
            suite: self.suite.clone(),
            config: self.cfg.clone(),
            expected,
            instances,
            verdict,
            notes: Vec::new(),
        }
    }
}

fn mismatch(detail: impl Into<String>, left: impl ToString, right: impl ToString) -> Witness {
    Witness::Mismatch {
        detail: detail.into(),
        left: left.to_string(),
        right: right.to_string(),
    }
}

fn weight_witness(detail: impl Into<String>, phi: &Weight) -> Witness {
    Witness::Weight {
        detail: detail.into(),
        labels: phi.space().labels().to_vec(),
        values: phi.values().to_vec(),
    }
}

fn check_if(cond: bool, w: impl FnOnce() -> Witness) -> Option<Witness> {
    (!cond).then(w)
}

/// Generated `(space, weights)` pairs until `count(weights)` reaches `target`.
fn corpus(cfg: &GenConfig, target: usize, per: impl Fn(&SpaceRef, &[Weight]) -> usize) -> Vec<(SpaceRef, Vec<Weight>)> {
    let mut out = Vec::new();
    let mut total = 0;
    for space in gen_space(cfg) {
        if total >= target {
            break;
        }
        let ws = gen_weights(&space, cfg);
        total += per(&space, &ws).max(1);
        out.push((space, ws));
    }
    out
}

pub fn run_suite(name: &str, cfg: &GenConfig) -> Result<SuiteReport, SuiteError> {
    let cfg = cfg.clone().normalized();
    let ctx = Ctx {
        suite: name.to_string(),
        cfg: cfg.clone(),
    };
    let start = Instant::now();
    let mut non_convergence = false;
    let checks = match name {
        "yoneda-lemma" => yoneda_lemma(&ctx),
        "yoneda-isometry" => yoneda_isometry(&ctx),
        "distributor-laws" => distributor_laws(&ctx),
        "ideal-oracle-gate" => ideal_oracle_gate(&ctx),
        "formal-ball-coherence" => formal_ball_coherence(&ctx),
        "j-algebra-theorem" => j_algebra_theorem(&ctx),
        "saturation" => saturation(&ctx),
        "kz-string" => kz_string(&ctx),
        "continuity" => continuity(&ctx),
        "qlo-refutations" => qlo_refutations(&ctx),
        "closure-laws" => closure_laws(&ctx, &mut non_convergence),
        other => return Err(SuiteError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        config: cfg,
        checks,
        non_convergence,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

fn yoneda_lemma(ctx: &Ctx) -> Vec<CheckRecord> {
    let mut t = Tally::new("yoneda-lemma");
    for (space, ws) in corpus(&ctx.cfg, ctx.cfg.trials, |s, ws| s.len() * ws.len()) {
        for phi in &ws {
            for x in space.points() {
                let (l, r) = yoneda_lemma_check(x, phi);
                t.observe(check_if(l == r, || mismatch(format!("ρ(y({}), {phi:?}) vs φ", space.label(x)), &l, &r)));
            }
        }
    }
    vec![t.finish(Status::BatteryPassed, ctx)]
}

fn yoneda_isometry(ctx: &Ctx) -> Vec<CheckRecord> {
    let mut t = Tally::new("yoneda-isometry");
    for (space, _) in corpus(&ctx.cfg, ctx.cfg.trials, |s, _| s.len() * s.len()) {
        for x in space.points() {
            for y in space.points() {
                let r = Weight::yoneda(&space, x).rho(&Weight::yoneda(&space, y)).expect("same space");
                let d = space.d(x, y);
                t.observe(check_if(&r == d, || mismatch(format!("ρ(y({x}), y({y})) vs d in {space:?}"), &r, d)));
            }
        }
    }
    vec![t.finish(Status::BatteryPassed, ctx)]
}

fn random_distributor(rng: &mut impl Rng, grid: &[ExtNonneg], s: &SpaceRef, t: &SpaceRef) -> Distributor {
    let table = (0..s.len())
        .map(|_| (0..t.len()).map(|_| grid.choose(rng).expect("grid").clone()).collect())
        .collect();
    Distributor::envelope(s.clone(), t.clone(), table).expect("shape")
}

fn distributor_laws(ctx: &Ctx) -> Vec<CheckRecord> {
    let cfg = GenConfig {
        max_points: ctx.cfg.max_points.min(4),
        ..ctx.cfg.clone()
    };
    let grid = &cfg.entry_grid;
    let mut rng = cfg.rng(2);
    let mut spaces = gen_space(&cfg);
    let mut assoc = Tally::new("composition-associative");
    let mut unit = Tally::new("composition-unital");
    let mut adj = Tally::new("graph-cograph-adjunction");
    let mut push = Tally::new("pushforward-pullback-adjunction");
    let mut naturality = Tally::new("pushforward-preserves-representables");
    for _ in 0..cfg.trials {
        let (x, y, z, w) = (
            spaces.next().expect("endless"),
            spaces.next().expect("endless"),
            spaces.next().expect("endless"),
            spaces.next().expect("endless"),
        );
        let phi = random_distributor(&mut rng, grid, &x, &y);
        let psi = random_distributor(&mut rng, grid, &y, &z);
        let chi = random_distributor(&mut rng, grid, &z, &w);
        let left = compose(&chi, &compose(&psi, &phi).expect("chain"));
        let right = compose(&compose(&chi, &psi).expect("chain"), &phi);
        assoc.observe(check_if(left == right, || mismatch("(χψ)φ vs χ(ψφ)", format!("{left:?}"), format!("{right:?}"))));
        let u1 = compose(&Distributor::identity(&y), &phi).expect("chain");
        let u2 = compose(&phi, &Distributor::identity(&x)).expect("chain");
        unit.observe(check_if(u1 == phi && u2 == phi, || mismatch("d∘φ, φ∘d vs φ", format!("{u1:?}"), format!("{phi:?}"))));

        let maps = all_maps(&x, &y);
        let Some(f) = maps.choose(&mut rng) else { continue };
        let check = adjunction_check(f);
        adj.observe(check_if(check.holds(), || mismatch("graph/cograph adjunction", format!("{check:?}"), "")));
        let xs = gen_weights(&x, &cfg);
        let ys = gen_weights(&y, &cfg);
        let a = xs.choose(&mut rng).expect("nonempty");
        let b = ys.choose(&mut rng).expect("nonempty");
        let (l, r) = pushforward_adjunction_sides(f, a, b).expect("spaces match");
        push.observe(check_if(l == r, || mismatch(format!("ρ(f→ {a:?}, {b:?}) vs ρ({a:?}, f← {b:?})"), &l, &r)));
        for p in x.points() {
            let pushed = f.pushforward(&Weight::yoneda(&x, p)).expect("spaces match");
            let expected = Weight::yoneda(&y, f.apply(p));
            naturality.observe(check_if(pushed == expected, || weight_witness("f→ y(x) ≠ y(f x)", &pushed)));
        }
    }
    [assoc, unit, adj, push, naturality]
        .into_iter()
        .map(|t| t.finish(Status::BatteryPassed, ctx))
        .collect()
}

fn ideal_oracle_gate(ctx: &Ctx) -> Vec<CheckRecord> {
    let grid = &ctx.cfg.entry_grid;
    let span = value_span(grid);
    let mut agree = Tally::new("criterion-vs-epsilon-oracle");
    let mut enumeration = Tally::new("criterion-vs-enumeration");
    let mut representable = Tally::new("finite-ideals-representable");
    let mut waybelow = Tally::new("waybelow-equals-distance");
    let mut spaces = 0;
    let mut ideals_found = 0;
    for space in all_small_spaces(3, grid) {
        spaces += 1;
        let mut enumerated = Vec::new();
        let mut by_criterion = Vec::new();
        for phi in weights_over_span(&space, &span) {
            let criterion = is_ideal(&phi).holds();
            let oracle = epsilon_grid_ideal(&phi, EPSILON_DEPTH);
            agree.observe(check_if(criterion == oracle, || weight_witness(format!("criterion {criterion}, oracle {oracle}"), &phi)));
            if criterion {
                by_criterion.push(phi.clone());
            }
            if oracle {
                enumerated.push(phi);
            }
        }
        enumeration.observe(check_if(enumerated == by_criterion, || {
            mismatch(format!("ideal lists on {space:?}"), enumerated.len(), by_criterion.len())
        }));
        for phi in &enumerated {
            representable.observe(check_if(is_representable(phi).is_some(), || weight_witness("ideal without a representing point", phi)));
        }
        ideals_found += enumerated.len();
        let w = waybelow_from_ideals(&space, &enumerated);
        waybelow.observe(check_if(w == space.table(), || mismatch(format!("exact table on {space:?}"), format!("{w:?}"), format!("{:?}", space.table()))));
    }
    let mut out: Vec<CheckRecord> = [agree, enumeration, representable, waybelow]
        .into_iter()
        .map(|t| t.finish(Status::Proven, ctx))
        .collect();
    out[0].notes.push(format!("{spaces} spaces, span of {} values, {ideals_found} ideals", span.len()));
    out
}

fn offsets() -> Vec<ExtNonneg> {
    vec![ExtNonneg::zero(), ExtNonneg::ratio(1, 2), ExtNonneg::from_integer(1)]
}

fn formal_ball_coherence(ctx: &Ctx) -> Vec<CheckRecord> {
    let mut radius = Tally::new("join-radius-is-offset");
    let mut routes = Tally::new("join-is-colimit-plus-offset");
    let mut shift = Tally::new("shifted-join");
    let mut lub = Tally::new("lub-vs-grid-oracle");
    let step = ExtNonneg::ratio(1, 4);
    let cap = ExtNonneg::from_integer(4);
    let radii: Vec<ExtNonneg> = ["0", "1/4", "1", "3/2", "3"].iter().map(|t| t.parse().expect("literal")).collect();
    for (space, ws) in corpus(&ctx.cfg, ctx.cfg.trials, |_, _| 1) {
        for fam in families_from(&ws, &offsets()) {
            let j = direct_join(&fam);
            let c = family_join(&fam);
            routes.observe(check_if(j == c, || mismatch("direct join vs (colim, offset)", format!("{j:?}"), format!("{c:?}"))));
            if let Some(j) = &j {
                radius.observe(check_if(&j.radius == fam.offset(), || mismatch("join radius vs offset", &j.radius, fam.offset())));
            }
            for t in offsets() {
                let shifted = direct_join(&fam.shifted(&t));
                let expected = j.as_ref().map(|b| b.shifted(&t));
                shift.observe(check_if(shifted == expected, || mismatch(format!("shift by {t}"), format!("{shifted:?}"), format!("{expected:?}"))));
            }
        }
        if space.len() <= 3 {
            for x in space.points() {
                for y in space.points() {
                    for r in &radii {
                        for s in &radii {
                            let balls = [
                                FormalBall::new(x, r.clone()).expect("finite"),
                                FormalBall::new(y, s.clone()).expect("finite"),
                            ];
                            let a = lub_finite(&space, &balls).expect("nonempty");
                            let b = grid_lub_oracle(&space, &balls, &step, &cap);
                            lub.observe(check_if(a == b, || mismatch(format!("lub of {balls:?} in {space:?}"), format!("{a:?}"), format!("{b:?}"))));
                        }
                    }
                }
            }
        }
    }
    [radius, routes, shift, lub]
        .into_iter()
        .map(|t| t.finish(Status::BatteryPassed, ctx))
        .collect()
}

fn bounded_ideals(ws: &[Weight]) -> Vec<Weight> {
    ws.iter()
        .filter(|w| is_ideal(w).holds() && is_bounded(w).is_some())
        .cloned()
        .collect()
}

fn j_algebra_theorem(ctx: &Ctx) -> Vec<CheckRecord> {
    let mut consistent = Tally::new("j-algebra-biconditional");
    let mut j_alg = Tally::new("finite-j-algebra");
    for (_, ws) in corpus(&ctx.cfg, ctx.cfg.trials, |_, _| 1) {
        let ideals = bounded_ideals(&ws);
        let info = ctx.info(ideals.len());
        let v = theorem_consistency(&ideals, &offsets(), &info).expect("bounded ideals");
        consistent.observe(v.witness);
        let v = j_algebra_verdict(&ideals, &info).expect("bounded ideals");
        j_alg.observe(v.witness);
    }
    [consistent, j_alg]
        .into_iter()
        .map(|t| t.finish(Status::BatteryPassed, ctx))
        .collect()
}

fn saturation(ctx: &Ctx) -> Vec<CheckRecord> {
    let mut tallies: Vec<(WeightClassTag, Tally)> = [WeightClassTag::BoundedIdeals, WeightClassTag::BoundedWeights, WeightClassTag::Ideals]
        .into_iter()
        .map(|tag| (tag, Tally::new(&format!("saturation:{}", tag_name(tag)))))
        .collect();
    let mut unit_law = Tally::new("mult-after-unit");
    for space in gen_space(&ctx.cfg) {
        if tallies[0].1.instances >= ctx.cfg.trials {
            break;
        }
        let ws = gen_weights(&space, &ctx.cfg);
        for (tag, t) in &mut tallies {
            let members: Vec<Weight> = ws.iter().filter(|w| tag.admits(w)).take(8).cloned().collect();
            let batt = BatterySubspace::new(&space, members).expect("representables are members");
            let phis = battery_weights(&batt, &ctx.cfg);
            let v = saturation_check(*tag, &batt, &phis, &ctx.info(batt.len())).expect("members in class");
            t.observe_many(phis.iter().filter(|p| tag.admits(p)).count(), v.witness);
            if *tag == WeightClassTag::BoundedIdeals {
                for i in batt.space().points() {
                    let m = mult(&batt, &Weight::yoneda(batt.space(), i)).expect("battery weight");
                    unit_law.observe(check_if(m == batt.members()[i], || weight_witness("m(y(φ)) ≠ φ", &m)));
                }
            }
        }
    }
    let mut out: Vec<CheckRecord> = tallies.into_iter().map(|(_, t)| t.finish(Status::BatteryPassed, ctx)).collect();
    out.push(unit_law.finish(Status::BatteryPassed, ctx));
    out
}

fn tag_name(tag: WeightClassTag) -> String {
    serde_json::to_value(tag).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn kz_string(ctx: &Ctx) -> Vec<CheckRecord> {
    let mut t = Tally::new("kz-string");
    let mut largest = 0;
    for (space, ws) in corpus(&ctx.cfg, ctx.cfg.trials, |_, _| 1) {
        let batt = BatterySubspace::new(&space, ws.iter().take(8.max(space.len())).cloned().collect()).expect("valid");
        largest = largest.max(batt.len());
        let phis = battery_weights(&batt, &ctx.cfg);
        let v = kz_string_check(&batt, &phis, &ws, &ctx.info(batt.len())).expect("representables first");
        t.observe(v.witness);
    }
    let mut rec = t.finish(Status::BatteryPassed, ctx);
    rec.notes.push(format!("largest battery {largest}"));
    vec![rec]
}

fn continuity(ctx: &Ctx) -> Vec<CheckRecord> {
    let mut verify = Tally::new("waybelow-distance");
    let mut sharp = Tally::new("waybelow-sharpness");
    let mut interp = Tally::new("interpolation-distance");
    let mut below = Tally::new("j-below-estimate-bounded");
    let mut reaches = Tally::new("j-below-estimate-reaches-exact");
    let radii = offsets();
    let grid = &ctx.cfg.entry_grid;
    let span = value_span(grid);
    for (space, ws) in corpus(&ctx.cfg, ctx.cfg.trials, |_, _| 1) {
        let fams = families_from(&ws, &radii);
        let info = ctx.info(fams.len());
        let d = WaybelowTable::distance(&space);
        verify.observe(waybelow_verify(&space, &d, &fams, &radii, &info).expect("shapes").witness);
        sharp.observe(waybelow_sharpness(&space, &d, &fams, &radii, &info).expect("shapes").witness);
        interp.observe(interpolation_check(&d));
        if space.len() <= 3 {
            let ideals: Vec<Weight> = weights_over_span(&space, &span)
                .into_iter()
                .filter(|w| epsilon_grid_ideal(w, EPSILON_DEPTH))
                .collect();
            let exact = waybelow_from_ideals(&space, &ideals);
            let est = j_below_estimate(&space, &ws);
            let ok = est.table.iter().flatten().zip(exact.iter().flatten()).all(|(a, b)| a <= b);
            below.observe(check_if(ok, || mismatch(format!("estimate above exact on {space:?}"), format!("{:?}", est.table), format!("{exact:?}"))));
            let full = j_below_estimate(&space, &ideals);
            reaches.observe(check_if(full.table == exact, || mismatch("oracle battery estimate", format!("{:?}", full.table), format!("{exact:?}"))));
        }
    }
    [verify, sharp, interp, below, reaches]
        .into_iter()
        .map(|t| t.finish(Status::BatteryPassed, ctx))
        .collect()
}

fn streamed_record(ctx: &Ctx, verdict: Verdict, expected: Status) -> CheckRecord {
    let horizon = verdict.battery.horizon.unwrap_or(0);
    let mut rec = ctx.record(verdict, expected, horizon);
    if let Some(w) = &rec.verdict.witness {
        let ok = check_streamed_witness(w).unwrap_or(false);
        rec.notes.push(format!("witness rechecked: {ok}"));
    }
    rec
}

fn qlo_refutations(ctx: &Ctx) -> Vec<CheckRecord> {
    let h = ctx.cfg.horizon;
    let colim = qlo_colimit_refutation(h).expect("qlo prefix");
    let local = qlo_local_dcpo_refutation(h).expect("qlo prefix");
    let mut out = vec![
        streamed_record(ctx, colim, Status::Refuted),
        streamed_record(ctx, local, Status::Refuted),
    ];
    // both sides of the biconditional fail together on qlo
    let both = out.iter().all(|r| r.verdict.is_refuted());
    let agree = Verdict::new("qlo-biconditional-agrees", if both { Status::BatteryPassed } else { Status::Refuted }, BatteryInfo {
        seed: None,
        size: 2,
        horizon: Some(h),
    });
    out.push(ctx.record(agree, Status::BatteryPassed, 2));
    // unbounded control: the ascending naturals generate an unbounded ideal
    let nat = bounded_net_check(&NetPresentation::Streamed(StreamNet::NatAscending), Some(h)).expect("registered");
    let qlo_net = bounded_net_check(&NetPresentation::Streamed(StreamNet::QloAscending), Some(h)).expect("registered");
    let control = if !nat.is_bounded() && qlo_net.is_bounded() {
        Verdict::new("bounded-net-controls", Status::BatteryPassed, BatteryInfo { seed: None, size: 2, horizon: Some(h) })
    } else {
        Verdict::refuted(
            "bounded-net-controls",
            mismatch("nat must be unbounded, qlo bounded", format!("{nat:?}"), format!("{qlo_net:?}")),
            BatteryInfo { seed: None, size: 2, horizon: Some(h) },
        )
    };
    out.push(ctx.record(control, Status::BatteryPassed, 2));
    out
}

fn closure_laws(ctx: &Ctx, non_convergence: &mut bool) -> Vec<CheckRecord> {
    let tag = WeightClassTag::BoundedIdeals;
    let mut converges = Tally::new("closure-converges");
    let mut idempotent = Tally::new("closure-idempotent");
    let mut deflation = Tally::new("closure-deflationary");
    let mut closed = Tally::new("closure-output-closed");
    let mut identity = Tally::new("closure-identity-on-finite");
    for (_, ws) in corpus(&ctx.cfg, ctx.cfg.trials, |_, ws| ws.len()) {
        let battery = bounded_ideals(&ws);
        let info = ctx.info(battery.len());
        for phi in &ws {
            match closure(tag, phi, &battery, DEFAULT_CAP) {
                Err(MonadicsError::NonConvergence { cap }) => {
                    *non_convergence = true;
                    converges.observe(Some(weight_witness(format!("no fixpoint within {cap} rounds"), phi)));
                }
                Err(e) => converges.observe(Some(weight_witness(e.to_string(), phi))),
                Ok(out) => {
                    converges.observe(None);
                    let again = closure(tag, &out.weight, &battery, DEFAULT_CAP).map(|o| o.weight);
                    idempotent.observe(check_if(again.as_ref() == Ok(&out.weight), || weight_witness("closure moves its output", &out.weight)));
                    deflation.observe(check_if(out.weight.pointwise_leq(phi), || weight_witness("closure raised a value", &out.weight)));
                    let v = is_closed_weight(tag, &out.weight, &battery, &info).expect("battery");
                    closed.observe(v.witness);
                    identity.observe(check_if(&out.weight == phi, || weight_witness("closure changed a weight on a finite carrier", phi)));
                }
            }
        }
    }
    let mut out: Vec<CheckRecord> = [converges, idempotent, deflation, closed, identity]
        .into_iter()
        .map(|t| t.finish(Status::BatteryPassed, ctx))
        .collect();
    out.push(qlo_prefix_audit(ctx));
    out
}

/// κ and closure on prefix views of `qlo`: each view is finite, so both are
/// trivial there; the audit records how κ grows with the horizon.
fn qlo_prefix_audit(ctx: &Ctx) -> CheckRecord {
    let tag = WeightClassTag::BoundedIdeals;
    let mut notes = Vec::new();
    let mut failure = None;
    let horizons: Vec<usize> = [4usize, 8, 16, 32].into_iter().filter(|&h| h <= ctx.cfg.horizon.max(4)).collect();
    let mut previous = 0;
    for &h in &horizons {
        let view = prefix(&Qlo, h).expect("qlo prefix");
        let space = std::sync::Arc::new(view.space);
        let small = GenConfig {
            trials: 1,
            ..ctx.cfg.clone()
        };
        let (kappa, rounds) = kappa_iterate(&space, tag, 2, &small).expect("finite");
        let zero = Weight::constant(&space, ExtNonneg::zero());
        let battery: Vec<Weight> = kappa.members().to_vec();
        let c = closure(tag, &zero, &battery, DEFAULT_CAP);
        let colim = colimit_of(&zero).map(|i| space.label(i).to_string());
        notes.push(format!(
            "horizon {h}: kappa size {} after {} rounds, closure of zero {}, zero has colimit {colim:?}",
            kappa.len(),
            rounds.len() - 1,
            match &c {
                Ok(o) if o.weight == zero => "fixed".to_string(),
                Ok(o) => format!("moved to {:?}", o.weight),
                Err(e) => e.to_string(),
            }
        ));
        if kappa.len() <= previous || c.is_err() {
            failure.get_or_insert_with(|| mismatch(format!("horizon {h}"), kappa.len(), previous));
        }
        previous = kappa.len();
    }
    let info = BatteryInfo {
        seed: Some(ctx.cfg.seed),
        size: horizons.len(),
        horizon: horizons.last().copied(),
    };
    let verdict = match failure {
        Some(w) => Verdict::refuted("qlo-prefix-kappa-growth", w, info),
        None => Verdict::passed("qlo-prefix-kappa-growth", info),
    };
    let mut rec = ctx.record(verdict, Status::BatteryPassed, horizons.len());
    rec.notes = notes;
    rec
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayOutcome {
    /// The check reproduced byte-for-byte with this status.
    Reproduced(Status),
    /// The recorded check does not match a fresh run.
    Mismatch { recorded: String, fresh: String },
}

impl ReplayOutcome {
    /// 0 for a reproduced pass, 2 for a reproduced refutation, 4 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReplayOutcome::Reproduced(Status::Refuted) => 2,
            ReplayOutcome::Reproduced(_) => 0,
            ReplayOutcome::Mismatch { .. } => 4,
        }
    }
}

fn canonical_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

/// Re-runs the suite named in `record` under its recorded config and
/// compares the check byte-for-byte; streamed witnesses are also rechecked
/// against the distance oracle.
pub fn replay(record: &CheckRecord) -> Result<ReplayOutcome, SuiteError> {
    let report = run_suite(&record.suite, &record.config)?;
    let fresh = report.find(record.check()).ok_or_else(|| SuiteError::UnknownCheck {
        suite: record.suite.clone(),
        check: record.check().to_string(),
    })?;
    let (a, b) = (canonical_json(record), canonical_json(fresh));
    if a != b {
        return Ok(ReplayOutcome::Mismatch { recorded: a, fresh: b });
    }
    if let Some(w @ (Witness::NoColimit { .. } | Witness::NoJoin { .. })) = &record.verdict.witness {
        if w_is_streamed(w) && !check_streamed_witness(w).unwrap_or(false) {
            return Ok(ReplayOutcome::Mismatch {
                recorded: a,
                fresh: "witness does not recheck".into(),
            });
        }
    }
    Ok(ReplayOutcome::Reproduced(record.verdict.status))
}

fn w_is_streamed(w: &Witness) -> bool {
    matches!(w, Witness::NoColimit { space, .. } | Witness::NoJoin { space, .. } if space == "qlo")
}
