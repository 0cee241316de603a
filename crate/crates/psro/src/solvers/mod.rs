//! Meta-solvers: map a (meta-)game payoff tensor to a distribution over each
//! population.

mod lp;
mod prd;
mod support_enum;

pub use lp::{solve_matrix_game, MatrixGameSolution};
pub use prd::{project_lower_bounded_simplex, PrdConfig};
pub use support_enum::{all_equilibria, first_equilibrium, BimatrixEquilibrium};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{MixedProfile, NormalFormGame};
use crate::graph::{alpharank, AlphaRankConfig, AlphaUsed, PopulationMode};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetaSolverConfig {
    Uniform,
    NashLp,
    NashSupportEnum {
        #[serde(default = "default_max_support")]
        max_support: usize,
    },
    #[serde(rename = "alpharank")]
    AlphaRank(AlphaRankConfig),
    Prd(PrdConfig),
}

fn default_max_support() -> usize {
    6
}

impl MetaSolverConfig {
    pub fn name(&self) -> &'static str {
        match self {
            MetaSolverConfig::Uniform => "uniform",
            MetaSolverConfig::NashLp => "nash_lp",
            MetaSolverConfig::NashSupportEnum { .. } => "nash_support_enum",
            MetaSolverConfig::AlphaRank(_) => "alpharank",
            MetaSolverConfig::Prd(_) => "prd",
        }
    }

    pub fn alpharank() -> Self {
        MetaSolverConfig::AlphaRank(AlphaRankConfig::default())
    }

    /// α-Rank as used inside PSRO: a sweep that never stabilizes falls back
    /// to the last grid point instead of aborting the run.
    pub fn alpharank_tolerant() -> Self {
        MetaSolverConfig::AlphaRank(AlphaRankConfig {
            allow_unstable: true,
            ..AlphaRankConfig::default()
        })
    }

    pub fn prd() -> Self {
        MetaSolverConfig::Prd(PrdConfig::default())
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            MetaSolverConfig::Prd(c) => c.validate(),
            MetaSolverConfig::NashSupportEnum { max_support: 0 } => Err(Error::UnsupportedConfig(
                "max_support must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub solver: String,
    pub residual: f64,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaUsed>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilized: Option<bool>,
}

/// Solver output over the current populations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaDistribution<T> {
    pub mode: PopulationMode,
    /// One vector per player (a single vector in single-population mode).
    pub marginals: Vec<Vec<T>>,
    /// Correlated distribution over meta-game profiles, when the solver produces one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint: Option<Vec<T>>,
    /// Sink components of the meta-game response graph, when the solver computed them.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sink_components: Vec<Vec<usize>>,
    pub diagnostics: SolverDiagnostics,
}

impl<T: Scalar> MetaDistribution<T> {
    pub fn marginal(&self, player: usize) -> &[T] {
        match self.mode {
            PopulationMode::Single => &self.marginals[0],
            PopulationMode::Multi => &self.marginals[player],
        }
    }

    /// Factorized profile over the meta-game built from the marginals.
    pub fn profile(&self, num_players: usize) -> MixedProfile<T> {
        MixedProfile {
            per_player: (0..num_players)
                .map(|k| self.marginal(k).to_vec())
                .collect(),
        }
    }

    /// Mass of one response-graph node: a meta-game profile (multi-population)
    /// or a population member (single-population).
    pub fn node_mass(&self, meta: &NormalFormGame<T>, node: usize) -> T {
        match (self.mode, &self.joint) {
            (PopulationMode::Single, _) => self.marginals[0][node],
            (PopulationMode::Multi, Some(j)) => j[node],
            (PopulationMode::Multi, None) => (0..meta.num_players())
                .map(|k| self.marginals[k][meta.strategy_at(node, k)])
                .fold(T::one(), |a, b| a * b),
        }
    }
}

impl<T: Scalar> MetaDistribution<T> {
    pub fn to_f64(&self) -> MetaDistribution<f64> {
        let conv = |v: &Vec<T>| v.iter().map(|x| x.to_f64_lossy()).collect::<Vec<f64>>();
        MetaDistribution {
            mode: self.mode,
            marginals: self.marginals.iter().map(conv).collect(),
            joint: self.joint.as_ref().map(conv),
            sink_components: self.sink_components.clone(),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

fn marginals_of_joint<T: Scalar>(meta: &NormalFormGame<T>, joint: &[T]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = meta
        .strategy_counts()
        .iter()
        .map(|&n| vec![T::zero(); n])
        .collect();
    for (flat, &p) in joint.iter().enumerate() {
        for (k, m) in out.iter_mut().enumerate() {
            m[meta.strategy_at(flat, k)] += p;
        }
    }
    out
}

/// Runs the configured meta-solver on `meta`.
pub fn solve<T: Scalar>(
    meta: &NormalFormGame<T>,
    mode: PopulationMode,
    config: &MetaSolverConfig,
) -> Result<MetaDistribution<T>> {
    config.validate()?;
    if mode == PopulationMode::Single {
        crate::graph::check_single_population(meta)?;
    }
    let mut diagnostics = SolverDiagnostics {
        solver: config.name().to_string(),
        ..Default::default()
    };
    let players = match mode {
        PopulationMode::Single => 1,
        PopulationMode::Multi => meta.num_players(),
    };
    let (marginals, joint, sink_components) = match config {
        MetaSolverConfig::Uniform => {
            let m = (0..players)
                .map(|k| {
                    let n = meta.strategy_counts()[k];
                    vec![T::one() / T::from_usize_lossy(n); n]
                })
                .collect();
            (m, None, Vec::new())
        }
        MetaSolverConfig::NashLp => {
            if meta.num_players() != 2 || !meta.is_zero_sum() {
                return Err(Error::UnsupportedGame(
                    "the LP solver needs a two-player zero-sum meta-game".into(),
                ));
            }
            let sol = solve_matrix_game(meta)?;
            diagnostics.iterations = sol.pivots;
            let m = match mode {
                PopulationMode::Single => vec![sol.row],
                PopulationMode::Multi => vec![sol.row, sol.col],
            };
            (m, None, Vec::new())
        }
        MetaSolverConfig::NashSupportEnum { max_support } => {
            if meta.num_players() != 2 {
                return Err(Error::UnsupportedGame(
                    "support enumeration needs two players".into(),
                ));
            }
            let eq = first_equilibrium(meta, *max_support, mode == PopulationMode::Single)?;
            diagnostics.iterations = eq.supports_tried;
            let m = match mode {
                PopulationMode::Single => vec![eq.row],
                PopulationMode::Multi => vec![eq.row, eq.col],
            };
            (m, None, Vec::new())
        }
        MetaSolverConfig::AlphaRank(cfg) => {
            let res = alpharank(meta, mode, cfg)?;
            diagnostics.residual = res.residual.to_f64_lossy();
            diagnostics.iterations = res.trajectory.len();
            diagnostics.alpha = Some(res.alpha_used);
            diagnostics.stabilized = Some(res.stabilized);
            let sinks = res.graph.sink_components();
            match mode {
                PopulationMode::Single => (vec![res.distribution], None, sinks),
                PopulationMode::Multi => {
                    let m = marginals_of_joint(meta, &res.distribution);
                    (m, Some(res.distribution), sinks)
                }
            }
        }
        MetaSolverConfig::Prd(cfg) => {
            let (m, iterations) = prd::solve_prd(meta, mode, cfg)?;
            diagnostics.iterations = iterations;
            (m, None, Vec::new())
        }
    };
    Ok(MetaDistribution {
        mode,
        marginals,
        joint,
        sink_components,
        diagnostics,
    })
}
