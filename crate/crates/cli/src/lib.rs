//! The `qmet` command line: argument parsing, dispatch, and DOT export.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use quasimetric::balls::{direct_join, families_from, j_below_estimate, lub_finite, waybelow_verify, FormalBall, WaybelowTable};
use quasimetric::ideals::{bounded_net_check, colimit_of, is_bounded, is_ideal, IdealCheck};
use quasimetric::io::{BallDoc, BatteryDoc, FamilyDoc, LoadError, Loader, NetDoc, SpaceDoc, WeightDoc};
use quasimetric::monadics::{closure, MonadicsError, WeightClassTag, DEFAULT_CAP};
use quasimetric::numerics::ExtNonneg;
use quasimetric::verdict::{BatteryInfo, Verdict, Witness};
use quasimetric::verification::oracle::{oracle_ideal_enumeration, ORACLE_MAX_POINTS};
use quasimetric::verification::{gen_weights, replay, run_suite, CheckRecord, GenConfig, ReplayOutcome, SuiteReport};
use quasimetric::{FiniteSpace, SpaceRef, Weight};

pub mod dot;

#[derive(Debug, Parser)]
#[command(name = "qmet", version, about = "Exact checks on finite quasi-metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, global = true, default_value_t = 4)]
    pub max_points: usize,
    /// Points sampled from streamed spaces.
    #[arg(long, global = true, default_value_t = 32)]
    pub horizon: usize,
    #[arg(long, global = true)]
    pub grid_step: Option<String>,
    #[arg(long, global = true)]
    pub grid_max: Option<String>,
    /// Battery file: `{"space": …, "members": [<weight>…]}`.
    #[arg(long, global = true)]
    pub battery: Option<PathBuf>,
    /// Write the output document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms of a space file.
    Validate { space: PathBuf },
    /// Specialization order and its covers.
    Order { space: PathBuf },
    /// ρ(φ, ψ) between two weights on the same space.
    Rho {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
    },
    /// The point representing a weight, if any.
    Colim { weight: PathBuf },
    IdealCheck { weight: PathBuf },
    /// Boundedness of a weight or of the ideal generated by a net file.
    BoundedCheck { file: PathBuf },
    /// Least upper bound of formal balls in a space.
    BallLub { space: PathBuf, balls: Vec<PathBuf> },
    FamilyJoin { family: PathBuf },
    /// Way-below estimate from a battery of ideals, and the check of `w = d`.
    Waybelow { space: PathBuf },
    /// Closure of a weight against the battery.
    Closure {
        weight: PathBuf,
        #[arg(long, value_enum, default_value_t = ClassArg::BoundedIdeals)]
        class: ClassArg,
    },
    Suite { name: String },
    /// Re-run a recorded check and compare.
    Replay { record: PathBuf },
    ExportDot {
        space: PathBuf,
        #[arg(long, value_enum, default_value_t = DotKind::Order)]
        kind: DotKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    All,
    Ideals,
    BoundedWeights,
    BoundedIdeals,
    BallWeights,
}

impl From<ClassArg> for WeightClassTag {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::All => WeightClassTag::All,
            ClassArg::Ideals => WeightClassTag::Ideals,
            ClassArg::BoundedWeights => WeightClassTag::BoundedWeights,
            ClassArg::BoundedIdeals => WeightClassTag::BoundedIdeals,
            ClassArg::BallWeights => WeightClassTag::BallWeights,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DotKind {
    Order,
    Balls,
}

/// Exit code and output document of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

impl Outcome {
    fn json(code: i32, value: &impl Serialize) -> Self {
        let mut output = serde_json::to_string_pretty(value).expect("serializable");
        output.push('\n');
        Outcome { code, output }
    }

    fn verdict(v: &Verdict) -> Self {
        Self::json(if v.is_refuted() { 2 } else { 0 }, v)
    }
}

/// Failure before any result: exit code 1.
#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError(e.to_string())
    }
}

fn fail(e: impl ToString) -> CliError {
    CliError(e.to_string())
}

struct Ctx<'a> {
    flags: &'a Flags,
}

impl Ctx<'_> {
    fn loader(&self, path: &Path) -> Loader {
        Loader::new(path, self.flags.horizon)
    }

    fn space(&self, path: &Path) -> Result<SpaceRef, CliError> {
        let l = self.loader(path);
        let doc: SpaceDoc = l.read()?;
        Ok(l.space("", &doc)?)
    }

    fn weight(&self, path: &Path) -> Result<Weight, CliError> {
        let l = self.loader(path);
        let doc: WeightDoc = l.read()?;
        Ok(l.weight("", &doc, None)?)
    }

    fn battery(&self) -> Result<Option<(SpaceRef, Vec<Weight>)>, CliError> {
        let Some(path) = &self.flags.battery else { return Ok(None) };
        let l = self.loader(path);
        let doc: BatteryDoc = l.read()?;
        let batt = l.battery(&doc)?;
        Ok(Some((batt.base().clone(), batt.members().to_vec())))
    }

    fn gen_config(&self) -> GenConfig {
        GenConfig {
            trials: self.flags.trials,
            max_points: self.flags.max_points,
            horizon: self.flags.horizon,
            ..GenConfig::with_seed(self.flags.seed)
        }
    }

    fn grid_value(&self, flag: &Option<String>, name: &str, default: &str) -> Result<ExtNonneg, CliError> {
        let text = flag.as_deref().unwrap_or(default);
        text.parse().map_err(|e| fail(format!("--{name}: {e}")))
    }
}

fn info(size: usize) -> BatteryInfo {
    BatteryInfo {
        seed: None,
        size,
        horizon: None,
    }
}

fn weight_witness(detail: String, phi: &Weight) -> Witness {
    Witness::Weight {
        detail,
        labels: phi.space().labels().to_vec(),
        values: phi.values().to_vec(),
    }
}

fn ball_json(space: &FiniteSpace, b: &Option<FormalBall>) -> Value {
    b.as_ref().map_or(Value::Null, |b| json!(b.record(space)))
}

/// The battery for space-level commands: the file given by `--battery`,
/// otherwise every ideal of a small space, otherwise generated ideals.
fn default_ideals(ctx: &Ctx, space: &SpaceRef) -> Result<Vec<Weight>, CliError> {
    if let Some((base, members)) = ctx.battery()? {
        if *base != **space {
            return Err(fail("battery lives on a different space"));
        }
        return Ok(members);
    }
    if space.len() <= ORACLE_MAX_POINTS {
        let cfg = ctx.gen_config();
        let found = oracle_ideal_enumeration(space, &cfg.entry_grid).map_err(fail)?;
        return Ok(found.into_iter().map(|e| e.weight).collect());
    }
    Ok(gen_weights(space, &ctx.gen_config())
        .into_iter()
        .filter(|w| is_ideal(w).holds())
        .collect())
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let ctx = Ctx { flags: &cli.flags };
    match &cli.command {
        Command::Validate { space } => {
            let s = ctx.space(space)?;
            Ok(Outcome::verdict(&Verdict::proven("space-axioms", info(s.len()))))
        }
        Command::Order { space } => {
            let s = ctx.space(space)?;
            let order = s.specialization_order();
            let label = |(x, y): (usize, usize)| [s.label(x).to_string(), s.label(y).to_string()];
            let leq: Vec<_> = order.pairs().filter(|(x, y)| x != y).map(label).collect();
            let covers: Vec<_> = order.covers().into_iter().map(label).collect();
            Ok(Outcome::json(0, &json!({ "points": s.labels(), "below": leq, "covers": covers })))
        }
        Command::Rho { phi, psi } => {
            let (a, b) = (ctx.weight(phi)?, ctx.weight(psi)?);
            let r = a.rho(&b).map_err(fail)?;
            Ok(Outcome::json(0, &r))
        }
        Command::Colim { weight } => {
            let phi = ctx.weight(weight)?;
            let c = colimit_of(&phi).map(|i| phi.space().label(i).to_string());
            Ok(Outcome::json(0, &json!({ "colimit": c })))
        }
        Command::IdealCheck { weight } => {
            let phi = ctx.weight(weight)?;
            let v = match is_ideal(&phi) {
                IdealCheck::Ideal => Verdict::proven("ideal", info(phi.space().len())),
                IdealCheck::InfimumNotZero(m) => {
                    Verdict::refuted("ideal", weight_witness(format!("min φ = {m} > 0"), &phi), info(phi.space().len()))
                }
                IdealCheck::NotDirected(x, y) => {
                    let (x, y) = (phi.space().label(x), phi.space().label(y));
                    Verdict::refuted("ideal", weight_witness(format!("no common witness for {x}, {y}"), &phi), info(phi.space().len()))
                }
            };
            Ok(Outcome::verdict(&v))
        }
        Command::BoundedCheck { file } => {
            let l = ctx.loader(file);
            let text = fs::read_to_string(file).map_err(|e| fail(format!("{}: {e}", file.display())))?;
            let raw: Value = l.parse(&text)?;
            if raw.get("tail").is_some() {
                let doc: NetDoc = l.parse(&text)?;
                let net = l.net(&doc)?;
                let v = bounded_net_check(&net, Some(ctx.flags.horizon)).map_err(fail)?;
                Ok(Outcome::json(0, &v))
            } else {
                let doc: WeightDoc = l.parse(&text)?;
                let phi = l.weight("", &doc, None)?;
                let v = match is_bounded(&phi) {
                    Some((a, b)) => json!({ "verdict": "bounded", "anchor": phi.space().label(a), "bound": b }),
                    None => json!({ "verdict": "unbounded" }),
                };
                Ok(Outcome::json(0, &v))
            }
        }
        Command::BallLub { space, balls } => {
            let s = ctx.space(space)?;
            let mut list = Vec::new();
            for path in balls {
                let l = ctx.loader(path);
                let text = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
                let docs: Vec<BallDoc> = match l.parse::<BallDoc>(&text) {
                    Ok(one) => vec![one],
                    Err(_) => l.parse(&text)?,
                };
                for doc in &docs {
                    list.push(l.ball(doc, &s)?);
                }
            }
            let lub = lub_finite(&s, &list).map_err(fail)?;
            Ok(Outcome::json(0, &json!({ "lub": ball_json(&s, &lub) })))
        }
        Command::FamilyJoin { family } => {
            let l = ctx.loader(family);
            let doc: FamilyDoc = l.read()?;
            let fam = l.family(&doc, None)?;
            let s = fam.space();
            let join = direct_join(&fam);
            let bound = fam.upper_bound();
            Ok(Outcome::json(0, &json!({ "join": ball_json(s, &join), "upper_bound": ball_json(s, &bound) })))
        }
        Command::Waybelow { space } => {
            let s = ctx.space(space)?;
            let ideals = default_ideals(&ctx, &s)?;
            let estimate = j_below_estimate(&s, &ideals);
            let radii = [ExtNonneg::zero(), ExtNonneg::ratio(1, 2), ExtNonneg::from_integer(1)];
            let bounded: Vec<Weight> = ideals.iter().filter(|w| is_bounded(w).is_some()).cloned().collect();
            let fams = families_from(&bounded, &radii);
            let v = waybelow_verify(&s, &WaybelowTable::distance(&s), &fams, &radii, &info(fams.len())).map_err(fail)?;
            let doc = json!({ "points": s.labels(), "estimate": estimate.table, "verdict": v });
            Ok(Outcome::json(if v.is_refuted() { 2 } else { 0 }, &doc))
        }
        Command::Closure { weight, class } => {
            let phi = ctx.weight(weight)?;
            let battery = match ctx.battery()? {
                Some((_, members)) => members,
                None => default_ideals(&ctx, phi.space())?,
            };
            match closure((*class).into(), &phi, &battery, DEFAULT_CAP) {
                Ok(out) => Ok(Outcome::json(0, &json!({ "values": out.weight.values(), "rounds": out.rounds }))),
                Err(MonadicsError::NonConvergence { cap }) => {
                    Ok(Outcome::json(3, &json!({ "non_convergence": { "cap": cap } })))
                }
                Err(e) => Err(fail(e)),
            }
        }
        Command::Suite { name } => {
            let report = run_suite(name, &ctx.gen_config()).map_err(fail)?;
            Ok(Outcome::json(report.exit_code(), &report))
        }
        Command::Replay { record } => {
            let l = ctx.loader(record);
            let text = fs::read_to_string(record).map_err(|e| fail(format!("{}: {e}", record.display())))?;
            let records: Vec<CheckRecord> = match l.parse::<CheckRecord>(&text) {
                Ok(r) => vec![r],
                Err(_) => l.parse::<SuiteReport>(&text)?.checks,
            };
            let mut code = 0;
            let mut results = Vec::new();
            for r in &records {
                let outcome = replay(r).map_err(fail)?;
                code = code.max(outcome.exit_code());
                results.push(match outcome {
                    ReplayOutcome::Reproduced(status) => json!({ "check": r.check(), "reproduced": status }),
                    ReplayOutcome::Mismatch { recorded, fresh } => {
                        json!({ "check": r.check(), "mismatch": { "recorded": recorded, "fresh": fresh } })
                    }
                });
            }
            Ok(Outcome::json(code, &results))
        }
        Command::ExportDot { space, kind } => {
            let s = ctx.space(space)?;
            let output = match kind {
                DotKind::Order => dot::order_dot(&s),
                DotKind::Balls => {
                    let step = ctx.grid_value(&cli.flags.grid_step, "grid-step", "1")?;
                    let max = ctx.grid_value(&cli.flags.grid_max, "grid-max", "2")?;
                    dot::balls_dot(&s, &step, &max).map_err(fail)?
                }
            };
            Ok(Outcome { code: 0, output })
        }
    }
}

/// Runs `cli`, writes its output, and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(outcome) => {
            if let Some(path) = &cli.flags.out {
                if let Err(e) = fs::write(path, &outcome.output) {
                    eprintln!("error: {}: {e}", path.display());
                    return 1;
                }
            } else {
                print!("{}", outcome.output);
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
