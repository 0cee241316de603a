//! Command-line runner for the experiments in the `psro` library.
//!
//! Flags override values read from `--config`. Exit codes: 0 success, 2 bad
//! configuration or input, 3 walkthrough mismatch, 4 numerical failure, 1 I/O.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use psro::experiments::{run_experiment, ExperimentConfig, ExperimentKind, GameSpec, Walkthrough};
use psro::game::Fixture;
use psro::graph::{AlphaPolicy, PopulationMode};
use psro::oracles::{OracleConfig, OracleKind};
use psro::psro::PayoffMode;
use psro::solvers::MetaSolverConfig;
use psro::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Experiment {
    OracleCompare,
    PokerMetaSolvers,
    FixtureWalkthrough,
    AlpharankSolve,
}

impl From<Experiment> for ExperimentKind {
    fn from(e: Experiment) -> Self {
        match e {
            Experiment::OracleCompare => ExperimentKind::OracleCompare,
            Experiment::PokerMetaSolvers => ExperimentKind::PokerMetaSolvers,
            Experiment::FixtureWalkthrough => ExperimentKind::FixtureWalkthrough,
            Experiment::AlpharankSolve => ExperimentKind::AlpharankSolve,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Single,
    Multi,
}

#[derive(Debug, Parser)]
#[command(
    name = "psro-cli",
    version,
    about = "Run PSRO, alpha-Rank and Kuhn poker experiments"
)]
struct Args {
    /// JSON experiment config; other flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long, value_enum)]
    experiment: Option<Experiment>,

    /// `random`, `kuhn`, a walkthrough name (example1..3, snowflake),
    /// a fixture name such as `chicken` or `table2(0.05,20)`, or a game file path.
    #[arg(long)]
    game: Option<String>,

    /// Player counts (comma separated for oracle_compare).
    #[arg(long, value_delimiter = ',')]
    players: Vec<usize>,

    /// Strategies per player (comma separated).
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<usize>,

    /// uniform, nash_lp, nash_support_enum, alpharank, prd (comma separated).
    #[arg(long = "meta-solver", value_delimiter = ',')]
    meta_solver: Vec<String>,

    /// br, pbr, pbr_novelty_bound, rectified_br (comma separated).
    #[arg(long, value_delimiter = ',')]
    oracle: Vec<String>,

    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Random games per (players, strategies) cell.
    #[arg(long)]
    games: Option<usize>,

    #[arg(long)]
    trials: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long = "max-iterations")]
    max_iterations: Option<usize>,

    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,

    /// `exact` or `simulate:N`; the simulation seed follows `--seed`.
    #[arg(long = "payoff-mode")]
    payoff_mode: Option<String>,

    /// `sweep`, `sweep:min:max:points`, `fixed:ALPHA` or `infinite`.
    #[arg(long = "alpha-policy")]
    alpha_policy: Option<String>,

    /// alpha-Rank population-size parameter.
    #[arg(long)]
    m: Option<usize>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::UnsupportedConfig(msg.into())
}

fn parse_alpha_policy(s: &str) -> Result<AlphaPolicy, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| config_error(format!("bad number {t:?} in alpha policy")))
    };
    match parts.as_slice() {
        ["sweep"] => Ok(AlphaPolicy::default_sweep()),
        ["sweep", min, max, points] => Ok(AlphaPolicy::Sweep {
            min: num(min)?,
            max: num(max)?,
            points: points
                .parse()
                .map_err(|_| config_error(format!("bad point count {points:?}")))?,
        }),
        ["fixed", a] => Ok(AlphaPolicy::Fixed { alpha: num(a)? }),
        ["infinite"] => Ok(AlphaPolicy::InfiniteLimit),
        _ => Err(config_error(format!("unknown alpha policy {s:?}"))),
    }
}

fn parse_solver(name: &str, kind: ExperimentKind) -> Result<MetaSolverConfig, Error> {
    Ok(match name.trim() {
        "uniform" => MetaSolverConfig::Uniform,
        "nash_lp" => MetaSolverConfig::NashLp,
        "nash_support_enum" => MetaSolverConfig::NashSupportEnum { max_support: 6 },
        // Inside PSRO an unsettled sweep is reported rather than fatal.
        "alpharank" if kind == ExperimentKind::AlpharankSolve => MetaSolverConfig::alpharank(),
        "alpharank" => MetaSolverConfig::alpharank_tolerant(),
        "prd" => MetaSolverConfig::prd(),
        other => return Err(config_error(format!("unknown meta-solver {other:?}"))),
    })
}

fn parse_oracle(name: &str) -> Result<OracleConfig, Error> {
    let kind = match name.trim() {
        "br" => OracleKind::Br,
        "pbr" => OracleKind::Pbr,
        "pbr_novelty_bound" => OracleKind::PbrNoveltyBound,
        "rectified_br" => OracleKind::RectifiedBr,
        other => return Err(config_error(format!("unknown oracle {other:?}"))),
    };
    Ok(OracleConfig::new(kind))
}

fn parse_game(s: &str, kind: ExperimentKind, args: &Args) -> Result<GameSpec, Error> {
    let players = || args.players.clone();
    match (kind, s) {
        (ExperimentKind::OracleCompare, "random") => Ok(GameSpec::Random {
            players: if args.players.is_empty() {
                vec![2]
            } else {
                players()
            },
            strategies: if args.strategies.is_empty() {
                vec![10]
            } else {
                args.strategies.clone()
            },
        }),
        (ExperimentKind::PokerMetaSolvers, "kuhn") => match args.players.as_slice() {
            [] => Ok(GameSpec::Kuhn { players: 2 }),
            [k] => Ok(GameSpec::Kuhn { players: *k }),
            _ => Err(config_error("poker experiments take a single player count")),
        },
        (ExperimentKind::FixtureWalkthrough, name) => Ok(GameSpec::Walkthrough {
            name: name
                .parse::<Walkthrough>()
                .map_err(|e| config_error(e.to_string()))?,
        }),
        (ExperimentKind::AlpharankSolve, name) => {
            if Path::new(name).is_file() {
                Ok(GameSpec::File { path: name.into() })
            } else {
                Ok(GameSpec::Fixture {
                    fixture: name.parse::<Fixture>()?,
                })
            }
        }
        (kind, s) => Err(config_error(format!(
            "game {s:?} does not fit experiment {kind:?}"
        ))),
    }
}

fn default_game(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::OracleCompare => "random",
        ExperimentKind::PokerMetaSolvers => "kuhn",
        ExperimentKind::FixtureWalkthrough => "example1",
        ExperimentKind::AlpharankSolve => "chicken",
    }
}

fn build_config(args: &Args) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            Some(serde_json::from_str::<ExperimentConfig>(&text)?)
        }
        None => None,
    };
    let kind = match (args.experiment, &cfg) {
        (Some(e), _) => e.into(),
        (None, Some(c)) => c.experiment,
        (None, None) => return Err(config_error("either --experiment or --config is required")),
    };
    let game_flags = args.game.is_some() || !args.players.is_empty() || !args.strategies.is_empty();
    let game = match (&cfg, game_flags) {
        (Some(c), false) if c.experiment == kind => c.game.clone(),
        _ => parse_game(
            args.game.as_deref().unwrap_or(default_game(kind)),
            kind,
            args,
        )?,
    };
    let mut cfg = match cfg.take() {
        Some(mut c) => {
            c.experiment = kind;
            c.game = game;
            c
        }
        None => {
            let mut c = ExperimentConfig::new(kind, game);
            if kind == ExperimentKind::AlpharankSolve {
                c.solvers = vec![MetaSolverConfig::alpharank()];
            }
            c
        }
    };
    if !args.meta_solver.is_empty() {
        cfg.solvers = args
            .meta_solver
            .iter()
            .map(|s| parse_solver(s, kind))
            .collect::<Result<_, _>>()?;
    }
    if !args.oracle.is_empty() {
        cfg.oracles = args
            .oracle
            .iter()
            .map(|s| parse_oracle(s))
            .collect::<Result<_, _>>()?;
    }
    if let Some(policy) = &args.alpha_policy {
        let policy = parse_alpha_policy(policy)?;
        for s in &mut cfg.solvers {
            if let MetaSolverConfig::AlphaRank(c) = s {
                c.alpha = policy;
            }
        }
    }
    if let Some(m) = args.m {
        for s in &mut cfg.solvers {
            if let MetaSolverConfig::AlphaRank(c) = s {
                c.m = m;
            }
        }
    }
    if let Some(mode) = args.mode {
        cfg.mode = match mode {
            Mode::Single => PopulationMode::Single,
            Mode::Multi => PopulationMode::Multi,
        };
    }
    if let Some(v) = args.games {
        cfg.games = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.max_iterations {
        cfg.max_iterations = v;
    }
    if let Some(dir) = &args.out_dir {
        cfg.out_dir = Some(dir.clone());
    }
    if let Some(p) = &args.payoff_mode {
        cfg.payoff_mode = match p.parse::<PayoffMode>()? {
            PayoffMode::Simulate { episodes, .. } => PayoffMode::Simulate {
                episodes,
                seed: cfg.seed,
            },
            exact => exact,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::UnsupportedGame(_)
        | Error::UnsupportedConfig(_)
        | Error::Json(_) => 2,
        Error::Mismatch { .. } => 3,
        Error::NumericalFailure { .. } => 4,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    match run_experiment(&cfg) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            match outcome.mismatch {
                Some(e) => fail(&e),
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => fail(&e),
    }
}
