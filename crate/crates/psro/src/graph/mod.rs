//! Response graphs, their sink strongly-connected components, and α-Rank.

mod alpharank;
mod dot;
mod markov;
mod scc;

pub use alpharank::{
    alpharank, AlphaPolicy, AlphaRankConfig, AlphaRankResult, AlphaUsed, SweepStep,
};
pub use markov::{
    stationary_distribution, transition_matrix, MarkovChain, StationaryMethod, StationaryResult,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::scalar::Scalar;

/// Whether one population plays every seat (symmetric two-player games) or each
/// player has its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationMode {
    Single,
    Multi,
}

/// Directed graph of strictly improving unilateral deviations.
///
/// Multi-population nodes are flat profile indices; single-population nodes are
/// strategies of the shared population.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseGraph {
    pub mode: PopulationMode,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    scc_id: Vec<usize>,
    components: Vec<Vec<usize>>,
    sink: Vec<bool>,
}

pub(crate) fn check_single_population<T: Scalar>(game: &NormalFormGame<T>) -> Result<()> {
    if game.num_players() != 2 || !game.is_symmetric() {
        return Err(Error::invalid(
            "single-population analysis needs a symmetric two-player game",
        ));
    }
    Ok(())
}

/// Builds the response graph; an edge needs a payoff gain strictly above `tie_tol`.
pub fn build_response_graph<T: Scalar>(
    game: &NormalFormGame<T>,
    mode: PopulationMode,
    tie_tol: T,
) -> Result<ResponseGraph> {
    let mut offsets = vec![0usize];
    let mut targets = Vec::new();
    match mode {
        PopulationMode::Single => {
            check_single_population(game)?;
            let n = game.strategy_counts()[0];
            for s in 0..n {
                for sigma in 0..n {
                    if sigma != s
                        && game.payoff(0, &[sigma, s]) > game.payoff(0, &[s, sigma]) + tie_tol
                    {
                        targets.push(sigma);
                    }
                }
                offsets.push(targets.len());
            }
        }
        PopulationMode::Multi => {
            let counts = game.strategy_counts();
            for flat in 0..game.num_profiles() {
                for (k, &nk) in counts.iter().enumerate() {
                    let cur = game.strategy_at(flat, k);
                    let base = game.payoff_flat(k, flat);
                    for sigma in 0..nk {
                        if sigma == cur {
                            continue;
                        }
                        let dev = game.deviate(flat, k, sigma);
                        if game.payoff_flat(k, dev) > base + tie_tol {
                            targets.push(dev);
                        }
                    }
                }
                offsets.push(targets.len());
            }
        }
    }
    Ok(ResponseGraph::from_csr(mode, offsets, targets))
}

impl ResponseGraph {
    pub(crate) fn from_csr(mode: PopulationMode, offsets: Vec<usize>, targets: Vec<usize>) -> Self {
        let n = offsets.len() - 1;
        let (scc_id, components) = scc::tarjan(n, &offsets, &targets);
        let mut sink = vec![true; components.len()];
        for v in 0..n {
            for &w in &targets[offsets[v]..offsets[v + 1]] {
                if scc_id[w] != scc_id[v] {
                    sink[scc_id[v]] = false;
                }
            }
        }
        ResponseGraph {
            mode,
            offsets,
            targets,
            scc_id,
            components,
            sink,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors(from).contains(&to)
    }

    pub fn scc_id(&self, v: usize) -> usize {
        self.scc_id[v]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn is_sink_component(&self, id: usize) -> bool {
        self.sink[id]
    }

    pub fn is_in_sink(&self, v: usize) -> bool {
        self.sink[self.scc_id[v]]
    }

    /// Sink components ordered by their smallest node.
    pub fn sink_components(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .components
            .iter()
            .enumerate()
            .filter(|(i, _)| self.sink[*i])
            .map(|(_, c)| c.clone())
            .collect();
        out.sort_by_key(|c| c[0]);
        out
    }

    /// Sorted list of nodes that belong to some sink component.
    pub fn sink_nodes(&self) -> Vec<usize> {
        (0..self.num_nodes())
            .filter(|&v| self.is_in_sink(v))
            .collect()
    }
}
