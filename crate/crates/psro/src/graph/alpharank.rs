//! α-Rank: stationary distribution of the response-graph Markov chain.

use serde::{Deserialize, Serialize};

use super::markov::{stationary_distribution, transition_matrix, StationaryMethod};
use super::{build_response_graph, PopulationMode, ResponseGraph};
use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::scalar::Scalar;

/// Choice of ranking intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaPolicy {
    Fixed {
        alpha: f64,
    },
    /// Geometric grid from `min` to `max` with `points` values.
    Sweep {
        min: f64,
        max: f64,
        points: usize,
    },
    /// Stabilized sweep, additionally requiring all mass inside sink components.
    InfiniteLimit,
}

impl AlphaPolicy {
    pub fn default_sweep() -> Self {
        AlphaPolicy::Sweep {
            min: 1e-2,
            max: 1e4,
            points: 20,
        }
    }

    fn grid(&self) -> Vec<f64> {
        let (min, max, points) = match *self {
            AlphaPolicy::Sweep { min, max, points } => (min, max, points),
            _ => (1e-2, 1e4, 20),
        };
        if points <= 1 {
            return vec![max];
        }
        (0..points)
            .map(|i| min * (max / min).powf(i as f64 / (points - 1) as f64))
            .collect()
    }
}

impl Default for AlphaPolicy {
    fn default() -> Self {
        Self::default_sweep()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlphaRankConfig {
    pub alpha: AlphaPolicy,
    pub m: usize,
    /// Nodes with more mass than this form the reported support.
    pub support_threshold: f64,
    /// Sweep stops once successive distributions differ by less than this (L1).
    pub stabilization_tol: f64,
    /// Sweep stops only once mass outside sink components is below this.
    pub off_sink_tol: f64,
    pub stationary: StationaryMethod,
    /// Payoff gain that still counts as a tie when building the response graph.
    pub tie_tol: f64,
    /// Return the last grid point instead of failing when the sweep never stabilizes.
    pub allow_unstable: bool,
}

impl Default for AlphaRankConfig {
    fn default() -> Self {
        AlphaRankConfig {
            alpha: AlphaPolicy::default_sweep(),
            m: 50,
            support_threshold: 1e-6,
            stabilization_tol: 1e-4,
            off_sink_tol: 1e-6,
            stationary: StationaryMethod::default(),
            tie_tol: 0.0,
            allow_unstable: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaUsed {
    Finite(f64),
    Infinite,
}

/// One evaluated grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub alpha: f64,
    pub l1_change: Option<f64>,
    pub off_sink_mass: f64,
}

#[derive(Debug, Clone)]
pub struct AlphaRankResult<T> {
    pub distribution: Vec<T>,
    pub alpha_used: AlphaUsed,
    pub support: Vec<usize>,
    /// `‖πC − π‖₁` at the returned α.
    pub residual: T,
    pub stabilized: bool,
    pub trajectory: Vec<SweepStep>,
    pub graph: ResponseGraph,
}

impl<T: Scalar> AlphaRankResult<T> {
    pub fn off_sink_mass(&self) -> T {
        off_sink(&self.graph, &self.distribution)
    }
}

fn off_sink<T: Scalar>(graph: &ResponseGraph, pi: &[T]) -> T {
    pi.iter()
        .enumerate()
        .filter(|(v, _)| !graph.is_in_sink(*v))
        .fold(T::zero(), |a, (_, &x)| a + x)
}

fn support<T: Scalar>(pi: &[T], threshold: f64) -> Vec<usize> {
    let t = T::lit(threshold);
    (0..pi.len()).filter(|&v| pi[v] > t).collect()
}

/// Runs α-Rank on `game` under the given population mode and α policy.
pub fn alpharank<T: Scalar>(
    game: &NormalFormGame<T>,
    mode: PopulationMode,
    config: &AlphaRankConfig,
) -> Result<AlphaRankResult<T>> {
    let graph = build_response_graph(game, mode, T::lit(config.tie_tol))?;
    let n = graph.num_nodes();
    if n == 1 {
        return Ok(AlphaRankResult {
            distribution: vec![T::one()],
            alpha_used: match config.alpha {
                AlphaPolicy::Fixed { alpha } => AlphaUsed::Finite(alpha),
                AlphaPolicy::InfiniteLimit => AlphaUsed::Infinite,
                AlphaPolicy::Sweep { .. } => AlphaUsed::Finite(config.alpha.grid()[0]),
            },
            support: vec![0],
            residual: T::zero(),
            stabilized: true,
            trajectory: Vec::new(),
            graph,
        });
    }
    if let AlphaPolicy::Fixed { alpha } = config.alpha {
        let chain = transition_matrix(game, mode, T::lit(alpha), config.m)?;
        let st = stationary_distribution(&chain, config.stationary, None)?;
        let mass = off_sink(&graph, &st.distribution);
        return Ok(AlphaRankResult {
            support: support(&st.distribution, config.support_threshold),
            distribution: st.distribution,
            alpha_used: AlphaUsed::Finite(alpha),
            residual: st.residual,
            stabilized: true,
            trajectory: vec![SweepStep {
                alpha,
                l1_change: None,
                off_sink_mass: mass.to_f64_lossy(),
            }],
            graph,
        });
    }

    let grid = config.alpha.grid();
    let mut trajectory = Vec::with_capacity(grid.len());
    let mut prev: Option<Vec<T>> = None;
    let mut last = None;
    for &alpha in &grid {
        let chain = transition_matrix(game, mode, T::lit(alpha), config.m)?;
        let st = stationary_distribution(&chain, config.stationary, prev.as_deref())?;
        let mass = off_sink(&graph, &st.distribution).to_f64_lossy();
        let change = prev
            .as_ref()
            .map(|p| crate::scalar::l1_distance(p, &st.distribution).to_f64_lossy());
        trajectory.push(SweepStep {
            alpha,
            l1_change: change,
            off_sink_mass: mass,
        });
        let done =
            matches!(change, Some(c) if c < config.stabilization_tol) && mass < config.off_sink_tol;
        if done {
            let alpha_used = match config.alpha {
                AlphaPolicy::InfiniteLimit => AlphaUsed::Infinite,
                _ => AlphaUsed::Finite(alpha),
            };
            return Ok(AlphaRankResult {
                support: support(&st.distribution, config.support_threshold),
                distribution: st.distribution,
                alpha_used,
                residual: st.residual,
                stabilized: true,
                trajectory,
                graph,
            });
        }
        prev = Some(st.distribution.clone());
        last = Some((alpha, st));
    }
    let (alpha, st) = last.expect("grid is nonempty");
    if config.allow_unstable && !matches!(config.alpha, AlphaPolicy::InfiniteLimit) {
        return Ok(AlphaRankResult {
            support: support(&st.distribution, config.support_threshold),
            distribution: st.distribution,
            alpha_used: AlphaUsed::Finite(alpha),
            residual: st.residual,
            stabilized: false,
            trajectory,
            graph,
        });
    }
    let summary: Vec<String> = trajectory
        .iter()
        .map(|s| {
            format!(
                "alpha={:.4e} change={} off_sink={:.3e}",
                s.alpha,
                s.l1_change.map_or("-".to_string(), |c| format!("{c:.3e}")),
                s.off_sink_mass
            )
        })
        .collect();
    Err(Error::numerical(
        format!("alpha sweep did not stabilize: {}", summary.join("; ")),
        trajectory
            .last()
            .and_then(|s| s.l1_change)
            .unwrap_or(f64::NAN),
    ))
}
