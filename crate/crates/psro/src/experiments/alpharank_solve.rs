//! Standalone α-Rank on a fixture or a game file.

use serde::Serialize;

use super::{ExperimentConfig, GameSpec};
use crate::error::{Error, Result};
use crate::game::{fixture_game, NormalFormGame};
use crate::graph::{alpharank, AlphaRankConfig, AlphaUsed, PopulationMode, SweepStep};
use crate::solvers::MetaSolverConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeReport {
    pub profile: Vec<String>,
    pub mass: f64,
    pub sink_component: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRankReport {
    pub mode: PopulationMode,
    pub alpha_used: AlphaUsed,
    pub stabilized: bool,
    pub residual: f64,
    pub off_sink_mass: f64,
    pub support: Vec<Vec<String>>,
    pub sink_components: Vec<Vec<Vec<String>>>,
    pub nodes: Vec<NodeReport>,
    pub trajectory: Vec<SweepStep>,
}

fn node_profile(game: &NormalFormGame<f64>, mode: PopulationMode, v: usize) -> Vec<String> {
    match mode {
        PopulationMode::Single => vec![game.strategy_label(0, v)],
        PopulationMode::Multi => game
            .profile_of(v)
            .into_iter()
            .enumerate()
            .map(|(k, s)| game.strategy_label(k, s))
            .collect(),
    }
}

pub fn alpharank_report(
    game: &NormalFormGame<f64>,
    mode: PopulationMode,
    config: &AlphaRankConfig,
) -> Result<AlphaRankReport> {
    let res = alpharank(game, mode, config)?;
    let sinks = res.graph.sink_components();
    let mut sink_of = vec![None; res.graph.num_nodes()];
    for (i, c) in sinks.iter().enumerate() {
        for &v in c {
            sink_of[v] = Some(i);
        }
    }
    Ok(AlphaRankReport {
        mode,
        alpha_used: res.alpha_used,
        stabilized: res.stabilized,
        residual: res.residual,
        off_sink_mass: res.off_sink_mass(),
        support: res
            .support
            .iter()
            .map(|&v| node_profile(game, mode, v))
            .collect(),
        sink_components: sinks
            .iter()
            .map(|c| c.iter().map(|&v| node_profile(game, mode, v)).collect())
            .collect(),
        nodes: (0..res.graph.num_nodes())
            .map(|v| NodeReport {
                profile: node_profile(game, mode, v),
                mass: res.distribution[v],
                sink_component: sink_of[v],
            })
            .collect(),
        trajectory: res.trajectory.clone(),
    })
}

pub fn alpharank_solve(cfg: &ExperimentConfig) -> Result<AlphaRankReport> {
    cfg.validate()?;
    let game: NormalFormGame<f64> = match &cfg.game {
        GameSpec::Fixture { fixture } => fixture_game(fixture)?,
        GameSpec::File { path } => NormalFormGame::load(path)?,
        _ => {
            return Err(Error::UnsupportedConfig(
                "alpharank_solve needs a fixture or a game file".into(),
            ))
        }
    };
    let config = match &cfg.solvers[0] {
        MetaSolverConfig::AlphaRank(c) => c.clone(),
        other => {
            return Err(Error::UnsupportedConfig(format!(
                "alpharank_solve needs an alpharank solver config, got {}",
                other.name()
            )))
        }
    };
    alpharank_report(&game, cfg.mode, &config)
}
