use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use sstit_core::eval::{eval_bounded_with, generates, BoundedOptions};
use sstit_core::oracle::{random_model, EnumBounds};
use sstit_core::repr::{
    check_complete, extract_partial, repr_positional, repr_uniform, verify_all, write_report,
    CheckVerdict, HarnessBounds, TheoremId,
};
use sstit_core::strategy::{is_uniform_on, parse_positional, play_equivalent, UniformScope};
use sstit_core::{
    eval_exact, oracle_eval, parse_formula, parse_model, parse_rules, validate_model, write_model,
    Error, EvalPoint, Formula, History, Model, PositionalStrategy, Profile, RuleStrategy, Verdict,
};

/// Strategic STIT with knowledge: model checking and rule-strategy tools.
#[derive(Parser)]
#[command(name = "sstit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Bounded,
}

#[derive(clap::Args)]
struct Point {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    formula: String,
    /// Start state; shorthand for a one-state history.
    #[arg(long, conflicts_with = "history")]
    state: Option<String>,
    /// Comma-separated states, current state last.
    #[arg(long)]
    history: Option<String>,
    /// Positional profile for every agent.
    #[arg(long)]
    profile: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural constraints of a model.
    Validate { model: PathBuf },
    /// Evaluate a formula at a history under a positional profile.
    Eval {
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Steps past the current position (bounded mode).
        #[arg(long, default_value_t = 4)]
        horizon: usize,
        /// Do not close `G` on repeated plays (bounded mode).
        #[arg(long)]
        no_lasso: bool,
    },
    /// Evaluate with the brute-force reference semantics.
    Oracle {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Compile a rule set into a partial strategy and report its status per key.
    Extract {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rules: PathBuf,
    },
    /// Is the rule set complete at a state?
    CheckComplete {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        state: String,
    },
    /// Is an agent's part of a positional strategy uniform?
    CheckUniform {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// Agent number, starting at 1.
        #[arg(long)]
        agent: usize,
        /// Only histories starting indistinguishably from this state.
        #[arg(long)]
        from: Option<String>,
    },
    /// Do two strategies allow the same plays from a history?
    PlayEquiv {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        history: String,
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Proposition-action rules representing a positional strategy.
    ReprPositional {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Knowledge-action rules representing a uniform single-agent strategy.
    ReprUniform {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        state: String,
    },
    /// Check the representation theorems on the fixtures and random models; tsv on stdout.
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "P1a,P1b,P2,P3,COR,P4,P5")]
        theorems: Vec<TheoremId>,
        /// Random models added to the two fixtures.
        #[arg(long, default_value_t = 0)]
        random: u64,
        #[arg(long, env = "SSTIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Rule sets per coalition before sampling kicks in.
        #[arg(long, default_value_t = 2000)]
        rule_sets: usize,
        #[arg(long, default_value_t = 4)]
        max_rules: usize,
        #[arg(long, default_value_t = 3)]
        history_depth: usize,
        /// Where counterexamples are written.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print seeded random models.
    Gen {
        #[arg(long, env = "SSTIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Index of the first model.
        #[arg(long, default_value_t = 0)]
        index: u64,
        /// Use the larger bounds of `verify`.
        #[arg(long)]
        harness: bool,
    },
}

/// An error tagged with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::InvalidModel(_)) => 3,
            Some(Error::NonUniform(_) | Error::Undefinable { .. }) => 1,
            _ => 2,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::new(e).into()
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> anyhow::Result<Model> {
    let m = parse_model(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let diags = validate_model(&m);
    if !diags.is_empty() {
        return Err(Error::InvalidModel(diags)).with_context(|| format!("in {}", path.display()));
    }
    Ok(m)
}

fn load_rules(path: &Path) -> anyhow::Result<RuleStrategy> {
    parse_rules(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_positional(m: &Model, path: &Path) -> anyhow::Result<PositionalStrategy> {
    parse_positional(m, &read(path)?).with_context(|| format!("in {}", path.display()))
}

fn state(m: &Model, name: &str) -> anyhow::Result<usize> {
    match m.state_id(name) {
        Some(q) => Ok(q),
        None => bail!("unknown state `{name}`"),
    }
}

fn history(m: &Model, state: Option<&str>, hist: Option<&str>) -> anyhow::Result<History> {
    match (state, hist) {
        (Some(s), None) => Ok(History::initial(self::state(m, s)?)),
        (None, Some(h)) => Ok(History::parse(m, h)?),
        _ => bail!("give either --state or --history"),
    }
}

fn print_verdict(v: &Verdict) -> bool {
    match v {
        Verdict::True => println!("true"),
        Verdict::False => println!("false"),
        Verdict::Unknown(why) => println!("unknown: {why}"),
    }
    *v == Verdict::True
}

fn point(p: &Point) -> anyhow::Result<(Model, History, PositionalStrategy, Formula)> {
    let m = load_model(&p.model)?;
    let h = history(&m, p.state.as_deref(), p.history.as_deref())?;
    let s = load_positional(&m, &p.profile)?;
    let f = parse_formula(&p.formula)?;
    if !generates(&m, &s, h.states()) {
        bail!("the profile does not generate history {}", h.display(&m));
    }
    Ok((m, h, s, f))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { model } => {
            let m = parse_model(&read(&model)?).with_context(|| format!("in {}", model.display()))?;
            let diags = validate_model(&m);
            if diags.is_empty() {
                println!("valid");
                return Ok(true);
            }
            for d in &diags {
                eprintln!("{}: {d}", model.display());
            }
            Err(Failure {
                code: 3,
                error: anyhow::anyhow!("{} violation(s)", diags.len()),
            })
        }
        Command::Eval { point: p, mode, horizon, no_lasso } => {
            let (m, h, s, f) = point(&p)?;
            let pt = EvalPoint::new(&m, h, Profile::positional(&m, s)?);
            let v = match mode {
                Mode::Exact => Verdict::from_bool(eval_exact(&pt, &f)?),
                Mode::Bounded => {
                    let opts = BoundedOptions {
                        lasso: !no_lasso,
                        ..BoundedOptions::default()
                    };
                    eval_bounded_with(&pt, &f, horizon, opts)?
                }
            };
            Ok(print_verdict(&v))
        }
        Command::Oracle { point: p, depth } => {
            let (m, h, s, f) = point(&p)?;
            Ok(print_verdict(&oracle_eval(&m, &h, &s, &f, depth)?))
        }
        Command::Extract { model, rules } => {
            let m = load_model(&model)?;
            let rs = load_rules(&rules)?;
            let report = extract_partial(&m, &rs)?;
            print!("{}", report.render(&m));
            for k in &report.spot_check_failures {
                eprintln!("spot check disagrees at {}", k.display(&m, report.partial.key_agents()));
            }
            Ok(report.partial.is_total() && report.spot_check_failures.is_empty())
        }
        Command::CheckComplete { model, rules, state } => {
            let m = load_model(&model)?;
            let rs = load_rules(&rules)?;
            let ok = check_complete(&m, &rs, self::state(&m, &state)?)?;
            println!("{}", if ok { "complete" } else { "incomplete" });
            Ok(ok)
        }
        Command::CheckUniform { model, profile, agent, from } => {
            let m = load_model(&model)?;
            let s = load_positional(&m, &profile)?;
            if agent == 0 || agent > m.num_agents() {
                return Err(Error::Binding(format!("agent {agent} does not exist")).into());
            }
            let starts = match from {
                Some(q) => m.block(agent - 1, self::state(&m, &q)?),
                None => m.all_states(),
            };
            let ok = is_uniform_on(&m, &s, agent - 1, starts, UniformScope::Unbounded)?;
            println!("{}", if ok { "uniform" } else { "not uniform" });
            Ok(ok)
        }
        Command::PlayEquiv { model, history, left, right } => {
            let m = load_model(&model)?;
            let h = History::parse(&m, &history)?;
            let l = load_positional(&m, &left)?;
            let r = load_positional(&m, &right)?;
            let ok = play_equivalent(&m, &h, &l, &r)?;
            println!("{}", if ok { "equivalent" } else { "not equivalent" });
            Ok(ok)
        }
        Command::ReprPositional { model, profile } => {
            let m = load_model(&model)?;
            let s = load_positional(&m, &profile)?;
            print!("{}", repr_positional(&m, &s)?);
            Ok(true)
        }
        Command::ReprUniform { model, profile, state } => {
            let m = load_model(&model)?;
            let s = load_positional(&m, &profile)?;
            let r = repr_uniform(&m, &s, self::state(&m, &state)?)?;
            print!("{}", r.rules);
            let mark = |b: bool| if b { "holds" } else { "fails" };
            println!("# known complete: {}", mark(r.known_complete));
            println!("# known able: {}", mark(r.known_able));
            println!("# performs: {}", mark(r.performs));
            Ok(r.holds())
        }
        Command::Verify {
            theorems,
            random,
            seed,
            rule_sets,
            max_rules,
            history_depth,
            out_dir,
        } => {
            let mut models = vec![
                ("m1".to_string(), sstit_core::fixtures::m1()),
                ("m2".to_string(), sstit_core::fixtures::m2()),
            ];
            let bounds = EnumBounds::harness(seed);
            for k in 0..random {
                models.push((format!("rand{k}"), random_model(&bounds, k)?));
            }
            let hb = HarnessBounds {
                max_rules,
                rule_sets,
                history_depth,
                seed,
                ..HarnessBounds::default()
            };
            let reports = verify_all(&models, &theorems, &hb)?;
            print!("{}", write_report(&reports, out_dir.as_deref())?);
            Ok(reports.iter().all(|r| r.verdict == CheckVerdict::Pass))
        }
        Command::Gen { seed, count, index, harness } => {
            let bounds = if harness {
                EnumBounds::harness(seed)
            } else {
                EnumBounds::with_seed(seed)
            };
            for k in index..index + count {
                println!("# model {k} (seed {seed})");
                print!("{}", write_model(&random_model(&bounds, k)?));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
