//! Oracles that propose new strategies for the populations.

pub mod nfg;
pub mod poker;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::graph::{build_response_graph, PopulationMode};
use crate::scalar::Scalar;
use crate::solvers::MetaDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Br,
    Pbr,
    PbrNoveltyBound,
    RectifiedBr,
}

impl OracleKind {
    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Br => "br",
            OracleKind::Pbr => "pbr",
            OracleKind::PbrNoveltyBound => "pbr_novelty_bound",
            OracleKind::RectifiedBr => "rectified_br",
        }
    }
}

/// How PBR picks one strategy out of its argmax set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Highest expected payoff against the (restricted) meta-distribution, then lowest index.
    #[default]
    PayoffThenIndex,
    LexicographicMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub kind: OracleKind,
    pub tie_break: TieBreak,
    /// Extra margin a strategy must clear to count as beating another in PBR.
    pub beats_tolerance: f64,
    /// Rectified BR only trains from population members with more mass than this.
    pub rectify_threshold: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            kind: OracleKind::Br,
            tie_break: TieBreak::default(),
            beats_tolerance: 0.0,
            rectify_threshold: 1e-6,
        }
    }
}

impl OracleConfig {
    pub fn new(kind: OracleKind) -> Self {
        OracleConfig {
            kind,
            ..Default::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.beats_tolerance >= 0.0) || !(self.rectify_threshold >= 0.0) {
            return Err(Error::UnsupportedConfig(
                "beats_tolerance and rectify_threshold must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// One proposed strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<S> {
    pub strategy: S,
    /// Objective value: expected payoff for BR variants, PBR-Score for PBR variants.
    pub score: f64,
    /// Meta-SSCC the candidate responds to (PBR, multi-population).
    pub component: Option<usize>,
    /// Population member it was trained from (rectified BR).
    pub source: Option<usize>,
}

/// Oracle output for one strategy list.
#[derive(Debug, Clone, PartialEq)]
pub struct ListOutput<S> {
    /// Deduplicated candidates in deterministic order.
    pub candidates: Vec<Candidate<S>>,
    /// True iff every candidate is already in the population (or there are none).
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutput<S> {
    /// One entry per strategy list (a single entry in single-population mode).
    pub lists: Vec<ListOutput<S>>,
    pub diagnostics: Vec<String>,
}

impl<S> OracleOutput<S> {
    pub fn converged(&self) -> bool {
        self.lists.iter().all(|l| l.converged)
    }
}

/// Sink components of the meta-game: taken from the solver when it computed
/// them, otherwise from a fresh response graph.
pub fn meta_sink_components<T: Scalar>(
    meta: &NormalFormGame<T>,
    dist: &MetaDistribution<T>,
) -> Result<Vec<Vec<usize>>> {
    if !dist.sink_components.is_empty() {
        return Ok(dist.sink_components.clone());
    }
    Ok(build_response_graph(meta, dist.mode, T::zero())?.sink_components())
}

/// Keeps the first occurrence of each strategy and sets the converged flag.
pub(crate) fn finish_list<S>(
    candidates: Vec<Candidate<S>>,
    same: impl Fn(&S, &S) -> bool,
    in_population: impl Fn(&S) -> bool,
) -> ListOutput<S> {
    let mut out: Vec<Candidate<S>> = Vec::with_capacity(candidates.len());
    for c in candidates {
        if !out.iter().any(|o| same(&o.strategy, &c.strategy)) {
            out.push(c);
        }
    }
    let converged = out.iter().all(|c| in_population(&c.strategy));
    ListOutput {
        candidates: out,
        converged,
    }
}

pub(crate) fn num_lists(mode: PopulationMode, num_players: usize) -> usize {
    match mode {
        PopulationMode::Single => 1,
        PopulationMode::Multi => num_players,
    }
}
