//! One line per criterion: `criterion N ... pass|FAIL`. Runs without the
//! test harness so the lines are always printed.

use std::time::{Duration, Instant};

use quasimetric::verdict::Status;
use quasimetric::verification::{replay, run_suite, GenConfig, ReplayOutcome, SuiteReport, SUITES};

struct Outcome {
    id: u32,
    title: &'static str,
    ok: bool,
    detail: String,
}

fn config(trials: usize, max_points: usize) -> GenConfig {
    GenConfig {
        trials,
        max_points,
        ..GenConfig::with_seed(2024)
    }
}

fn timed(suite: &str, cfg: &GenConfig) -> (SuiteReport, Duration) {
    let start = Instant::now();
    let report = run_suite(suite, cfg).expect("registered suite");
    (report, start.elapsed())
}

fn failures(report: &SuiteReport) -> Vec<String> {
    report
        .checks
        .iter()
        .filter(|c| !c.as_expected())
        .map(|c| format!("{}: {:?}", c.check(), c.verdict.witness))
        .collect()
}

fn instances(report: &SuiteReport, check: &str) -> usize {
    report.find(check).map_or(0, |c| c.instances)
}

fn suite_outcome(
    id: u32,
    title: &'static str,
    suite: &str,
    cfg: &GenConfig,
    limit: Option<Duration>,
    min_instances: &[(&str, usize)],
) -> Outcome {
    let (report, elapsed) = timed(suite, cfg);
    let mut problems = failures(&report);
    if report.non_convergence {
        problems.push("non-convergence".into());
    }
    for &(check, n) in min_instances {
        let got = instances(&report, check);
        if got < n {
            problems.push(format!("{check}: {got} instances < {n}"));
        }
    }
    if let Some(limit) = limit {
        if elapsed > limit {
            problems.push(format!("took {elapsed:?}, limit {limit:?}"));
        }
    }
    Outcome {
        id,
        title,
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{} checks in {elapsed:.2?}", report.checks.len())
        } else {
            problems.join("; ")
        },
    }
}

fn yoneda_lemma() -> Outcome {
    suite_outcome(1, "yoneda lemma", "yoneda-lemma", &config(500, 6), Some(Duration::from_secs(5)), &[("yoneda-lemma", 500)])
}

fn yoneda_isometry() -> Outcome {
    suite_outcome(2, "yoneda isometry", "yoneda-isometry", &config(500, 6), None, &[("yoneda-isometry", 500)])
}

fn distributor_laws() -> Outcome {
    suite_outcome(
        3,
        "distributor laws",
        "distributor-laws",
        &config(300, 4),
        Some(Duration::from_secs(10)),
        &[
            ("composition-associative", 300),
            ("composition-unital", 300),
            ("graph-cograph-adjunction", 300),
            ("pushforward-pullback-adjunction", 300),
        ],
    )
}

fn ideal_gate() -> Outcome {
    let (report, elapsed) = timed("ideal-oracle-gate", &GenConfig::default());
    let mut problems = failures(&report);
    for check in ["criterion-vs-epsilon-oracle", "criterion-vs-enumeration"] {
        match report.find(check) {
            Some(c) if c.verdict.status == Status::Proven => {}
            other => problems.push(format!("{check}: {:?}", other.map(|c| c.verdict.status))),
        }
    }
    if elapsed > Duration::from_secs(60) {
        problems.push(format!("took {elapsed:?}"));
    }
    Outcome {
        id: 4,
        title: "ideal criterion oracle gate",
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{} in {elapsed:.2?}", report.checks[0].notes.join(", "))
        } else {
            problems.join("; ")
        },
    }
}

fn formal_balls() -> Outcome {
    suite_outcome(
        5,
        "formal ball coherence",
        "formal-ball-coherence",
        &config(100, 4),
        None,
        &[("join-radius-is-offset", 1), ("shifted-join", 1), ("lub-vs-grid-oracle", 1)],
    )
}

fn theorem_consistency() -> Outcome {
    suite_outcome(6, "j-algebra biconditional", "j-algebra-theorem", &config(100, 5), None, &[("j-algebra-biconditional", 100)])
}

fn saturation() -> Outcome {
    suite_outcome(7, "saturation", "saturation", &config(200, 4), None, &[("saturation:bounded-ideals", 200)])
}

fn kz_string() -> Outcome {
    let cfg = config(100, 6);
    let mut out = suite_outcome(8, "kz string", "kz-string", &cfg, None, &[("kz-string", 100)]);
    let (report, _) = timed("kz-string", &cfg);
    let notes = &report.checks[0].notes;
    if !notes.iter().any(|n| n.starts_with("largest battery ") && n[16..].parse::<usize>().is_ok_and(|n| n <= 8)) {
        out.ok = false;
        out.detail = format!("battery size not within 8: {notes:?}");
    }
    out
}

fn continuity() -> Outcome {
    suite_outcome(
        9,
        "continuity and interpolation",
        "continuity",
        &config(100, 4),
        None,
        &[("waybelow-distance", 100), ("j-below-estimate-reaches-exact", 1)],
    )
}

fn streamed_refutations() -> Outcome {
    let start = Instant::now();
    let cfg = GenConfig {
        horizon: 32,
        ..GenConfig::default()
    };
    let report = run_suite("qlo-refutations", &cfg).expect("registered");
    let mut problems = failures(&report);
    for check in ["qlo-bounded-ideal-colimit", "qlo-local-dcpo"] {
        let Some(rec) = report.find(check) else {
            problems.push(format!("{check} missing"));
            continue;
        };
        if rec.verdict.status != Status::Refuted || rec.verdict.battery.horizon != Some(32) {
            problems.push(format!("{check}: {:?}", rec.verdict.status));
        }
        match replay(rec) {
            Ok(ReplayOutcome::Reproduced(Status::Refuted)) => {}
            other => problems.push(format!("{check} replay: {other:?}")),
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        problems.push(format!("took {elapsed:?}"));
    }
    Outcome {
        id: 10,
        title: "streamed refutations",
        ok: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("both refuted and replayed in {elapsed:.2?}")
        } else {
            problems.join("; ")
        },
    }
}

fn closure_laws() -> Outcome {
    suite_outcome(
        11,
        "closure laws",
        "closure-laws",
        &config(100, 5),
        None,
        &[("closure-converges", 100), ("closure-idempotent", 100)],
    )
}

fn determinism() -> Outcome {
    let cfg = GenConfig {
        trials: 30,
        horizon: 16,
        ..GenConfig::with_seed(99)
    };
    let mut differing = Vec::new();
    for suite in SUITES {
        let a = run_suite(suite, &cfg).expect("registered").canonical();
        let b = run_suite(suite, &cfg).expect("registered").canonical();
        if serde_json::to_string(&a).unwrap() != serde_json::to_string(&b).unwrap() {
            differing.push(suite);
        }
    }
    Outcome {
        id: 12,
        title: "determinism",
        ok: differing.is_empty(),
        detail: if differing.is_empty() {
            format!("{} suites identical across two runs", SUITES.len())
        } else {
            format!("differ: {differing:?}")
        },
    }
}

fn main() {
    let outcomes = [
        yoneda_lemma(),
        yoneda_isometry(),
        distributor_laws(),
        ideal_gate(),
        formal_balls(),
        theorem_consistency(),
        saturation(),
        kz_string(),
        continuity(),
        streamed_refutations(),
        closure_laws(),
        determinism(),
    ];
    for o in &outcomes {
        println!(
            "criterion {:>2} {:<32} {}  ({})",
            o.id,
            o.title,
            if o.ok { "pass" } else { "FAIL" },
            o.detail
        );
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.ok).map(|o| o.id).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
