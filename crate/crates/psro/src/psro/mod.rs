//! The PSRO loop: complete the meta-game, solve it, expand the populations.

mod domain;
mod population;
mod trace;

pub use domain::{Domain, MetricValues, MetricsSelection, NfgDomain, PayoffMode, PokerDomain};
pub use population::Population;
pub use trace::{IterationRecord, Proposal, PsroTrace};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PopulationMode;
use crate::oracles::{OracleConfig, OracleOutput};
use crate::scalar::Scalar;
use crate::solvers::{solve, MetaSolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsroConfig {
    pub mode: PopulationMode,
    pub solver: MetaSolverConfig,
    pub oracle: OracleConfig,
    /// Expansion steps; 0 evaluates the initial population only.
    pub max_iterations: usize,
    #[serde(default)]
    pub metrics: MetricsSelection,
    /// Store wall-clock time per iteration (makes traces non-reproducible).
    #[serde(default)]
    pub record_timings: bool,
}

/// Result of a run: the trace plus the final population.
#[derive(Debug, Clone)]
pub struct PsroRun<S, T> {
    pub trace: PsroTrace,
    pub population: Population<S, T>,
}

/// Builds the population, checking the initial lists for duplicates.
pub fn initialize<D: Domain<T>, T: Scalar>(
    domain: &D,
    mode: PopulationMode,
    initial: Vec<Vec<D::Strategy>>,
) -> Result<Population<D::Strategy, T>> {
    for (l, list) in initial.iter().enumerate() {
        for (i, a) in list.iter().enumerate() {
            if list[..i].iter().any(|b| domain.same(a, b)) {
                return Err(Error::invalid(format!(
                    "initial list {l} contains a duplicate"
                )));
            }
        }
    }
    Population::new(mode, domain.num_players(), initial)
}

/// Completes, solves and (when `expand` is set) grows the population once.
fn iterate<D: Domain<T>, T: Scalar>(
    domain: &D,
    pop: &mut Population<D::Strategy, T>,
    config: &PsroConfig,
    iteration: usize,
    expand: bool,
) -> Result<IterationRecord> {
    let start = Instant::now();
    let fresh = pop.complete(|idx, profile| domain.evaluate(idx, profile))?;
    let meta = pop.meta_game()?;
    let dist = solve(&meta, config.mode, &config.solver)?;
    let metrics = domain.metrics(pop, &meta, &dist, &config.metrics)?;
    let sizes: Vec<usize> = pop.lists().iter().map(Vec::len).collect();
    let total = pop.total_pool_length();

    let mut record = IterationRecord {
        iteration,
        population_sizes: sizes,
        total_pool_length: total,
        new_evaluations: fresh,
        meta_distribution: dist.to_f64(),
        proposals: Vec::new(),
        added: Vec::new(),
        converged: false,
        metrics,
        diagnostics: Vec::new(),
        wall_clock_ms: None,
    };
    if expand {
        let output: OracleOutput<D::Strategy> = domain.expand(pop, &meta, &dist, &config.oracle)?;
        record.converged = output.converged();
        record.diagnostics = output.diagnostics.clone();
        for (l, list) in output.lists.into_iter().enumerate() {
            let mut proposals = Vec::new();
            let mut added = Vec::new();
            for c in list.candidates {
                let existing = pop.position(l, &c.strategy, |a, b| domain.same(a, b));
                let position = existing.unwrap_or(pop.lists()[l].len());
                let name = domain.describe(l, &c.strategy, position);
                proposals.push(Proposal {
                    strategy: name.clone(),
                    score: c.score,
                    component: c.component,
                    source: c.source,
                    duplicate: existing.is_some(),
                });
                if existing.is_none() {
                    pop.push(l, c.strategy);
                    added.push(name);
                }
            }
            record.proposals.push(proposals);
            record.added.push(added);
        }
    }
    if config.record_timings {
        record.wall_clock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(record)
}

/// One PSRO iteration on an existing population.
pub fn step<D: Domain<T>, T: Scalar>(
    domain: &D,
    pop: &mut Population<D::Strategy, T>,
    config: &PsroConfig,
    iteration: usize,
) -> Result<IterationRecord> {
    domain.check(config)?;
    iterate(domain, pop, config, iteration, true)
}

/// Runs PSRO until every list's oracle output is duplicate-only or the
/// iteration budget is spent. The trace has one record per solved population.
pub fn run<D: Domain<T>, T: Scalar>(
    domain: &D,
    config: &PsroConfig,
    initial: Vec<Vec<D::Strategy>>,
) -> Result<PsroRun<D::Strategy, T>> {
    domain.check(config)?;
    let mut pop = initialize(domain, config.mode, initial)?;
    let mut records = Vec::new();
    let mut converged = false;
    for it in 0..=config.max_iterations {
        let record = iterate(domain, &mut pop, config, it, it < config.max_iterations)?;
        converged = record.converged;
        records.push(record);
        if converged {
            break;
        }
    }
    Ok(PsroRun {
        trace: PsroTrace { records, converged },
        population: pop,
    })
}
