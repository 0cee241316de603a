use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::Walkthrough;
use crate::error::{Error, Result};
use crate::game::Fixture;
use crate::graph::PopulationMode;
use crate::oracles::{OracleConfig, OracleKind};
use crate::psro::PayoffMode;
use crate::solvers::MetaSolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    OracleCompare,
    PokerMetaSolvers,
    FixtureWalkthrough,
    AlpharankSolve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameSpec {
    /// Seeded random games; every (players, strategies) pair is one cell.
    Random {
        players: Vec<usize>,
        strategies: Vec<usize>,
    },
    Fixture {
        fixture: Fixture,
    },
    File {
        path: PathBuf,
    },
    Kuhn {
        players: usize,
    },
    Walkthrough {
        name: Walkthrough,
    },
}

fn default_mode() -> PopulationMode {
    PopulationMode::Multi
}

fn default_solvers() -> Vec<MetaSolverConfig> {
    vec![MetaSolverConfig::alpharank_tolerant()]
}

fn default_games() -> usize {
    100
}

fn default_trials() -> usize {
    10
}

fn default_max_iterations() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub game: GameSpec,
    #[serde(default = "default_mode")]
    pub mode: PopulationMode,
    /// Meta-solvers; experiments that use one solver take the first.
    #[serde(default = "default_solvers")]
    pub solvers: Vec<MetaSolverConfig>,
    /// Oracles; empty means the experiment's default set.
    #[serde(default)]
    pub oracles: Vec<OracleConfig>,
    /// Random games per cell.
    #[serde(default = "default_games")]
    pub games: usize,
    /// Runs per game, each from its own random start.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub payoff_mode: PayoffMode,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Config with every optional field at its default.
    pub fn new(experiment: ExperimentKind, game: GameSpec) -> Self {
        ExperimentConfig {
            experiment,
            game,
            mode: default_mode(),
            solvers: default_solvers(),
            oracles: Vec::new(),
            games: default_games(),
            trials: default_trials(),
            seed: 0,
            max_iterations: default_max_iterations(),
            payoff_mode: PayoffMode::Exact,
            out_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Oracles to run, falling back to the experiment's defaults.
    pub fn oracle_list(&self) -> Vec<OracleConfig> {
        if !self.oracles.is_empty() {
            return self.oracles.clone();
        }
        match self.experiment {
            ExperimentKind::OracleCompare => vec![
                OracleConfig::new(OracleKind::Br),
                OracleConfig::new(OracleKind::Pbr),
            ],
            _ => vec![OracleConfig::new(OracleKind::Br)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::UnsupportedConfig(m.to_string()));
        if self.games == 0 || self.trials == 0 || self.max_iterations == 0 {
            return bad("games, trials and max_iterations must be positive");
        }
        if let PayoffMode::Simulate { episodes: 0, .. } = self.payoff_mode {
            return bad("simulation needs at least one episode");
        }
        if self.solvers.is_empty() {
            return bad("at least one meta-solver is required");
        }
        for s in &self.solvers {
            s.validate()?;
        }
        for o in &self.oracles {
            o.validate()?;
        }
        match (self.experiment, &self.game) {
            (
                ExperimentKind::OracleCompare,
                GameSpec::Random {
                    players,
                    strategies,
                },
            ) => {
                if players.is_empty() || strategies.is_empty() {
                    return bad(
                        "oracle_compare needs at least one player count and strategy count",
                    );
                }
                if players.iter().any(|&k| !(2..=5).contains(&k))
                    || strategies.iter().any(|&n| n < 1)
                {
                    return bad("oracle_compare supports 2 to 5 players and at least one strategy");
                }
                Ok(())
            }
            (ExperimentKind::PokerMetaSolvers, GameSpec::Kuhn { players }) => {
                if !(2..=5).contains(players) {
                    return bad("Kuhn poker supports 2 to 5 players");
                }
                if *players > 2 && self.solvers.contains(&MetaSolverConfig::NashLp) {
                    return bad("the LP meta-solver is limited to two-player poker");
                }
                Ok(())
            }
            (ExperimentKind::FixtureWalkthrough, GameSpec::Walkthrough { .. }) => Ok(()),
            (ExperimentKind::AlpharankSolve, GameSpec::Fixture { .. } | GameSpec::File { .. }) => {
                Ok(())
            }
            (kind, game) => Err(Error::UnsupportedConfig(format!(
                "game spec {game:?} does not fit experiment {kind:?}"
            ))),
        }
    }
}
