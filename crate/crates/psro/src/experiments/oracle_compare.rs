//! PSRO with BR versus PBR on seeded random games.

use serde::Serialize;

use super::{ExperimentConfig, GameSpec};
use crate::error::{Error, Result};
use crate::game::generate_random_game;
use crate::psro::{run, MetricsSelection, NfgDomain, PsroConfig};
use crate::seeds::derive_seed;

/// Final metrics of one PSRO run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub players: usize,
    pub strategies: usize,
    pub game: usize,
    pub trial: usize,
    pub oracle: String,
    pub iterations: usize,
    pub total_pool_length: usize,
    pub converged: bool,
    pub alpha_conv: f64,
    pub pcs_score: f64,
}

/// Aggregate over every run of one oracle in one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub players: usize,
    pub strategies: usize,
    pub oracle: String,
    pub runs: usize,
    pub mean_alpha_conv: f64,
    pub mean_pcs_score: f64,
    /// Fraction of runs with PCS-Score strictly between 0.05 and 0.95.
    pub pcs_mid_fraction: f64,
    pub mean_pool_length: f64,
    pub converged_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCompareResult {
    pub runs: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
}

fn summarize(rows: &[&RunRow]) -> SummaryRow {
    let n = rows.len() as f64;
    let mean = |f: &dyn Fn(&RunRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
    SummaryRow {
        players: rows[0].players,
        strategies: rows[0].strategies,
        oracle: rows[0].oracle.clone(),
        runs: rows.len(),
        mean_alpha_conv: mean(&|r| r.alpha_conv),
        mean_pcs_score: mean(&|r| r.pcs_score),
        pcs_mid_fraction: mean(&|r| f64::from(u8::from(r.pcs_score > 0.05 && r.pcs_score < 0.95))),
        mean_pool_length: mean(&|r| r.total_pool_length as f64),
        converged_fraction: mean(&|r| f64::from(u8::from(r.converged))),
    }
}

/// Runs every (cell, game, trial, oracle) combination in a fixed order.
pub fn oracle_compare(cfg: &ExperimentConfig) -> Result<OracleCompareResult> {
    cfg.validate()?;
    let GameSpec::Random {
        players,
        strategies,
    } = &cfg.game
    else {
        return Err(Error::UnsupportedConfig(
            "oracle_compare needs a random game spec".into(),
        ));
    };
    let oracles = cfg.oracle_list();
    let solver = cfg.solvers[0].clone();
    let mut runs = Vec::new();
    let mut summary = Vec::new();
    for &k in players {
        for &n in strategies {
            let cell_start = runs.len();
            for g in 0..cfg.games {
                let game_seed = derive_seed(cfg.seed, [k as u64, n as u64, g as u64]);
                let domain = NfgDomain::new(generate_random_game::<f64>(n, k, game_seed)?);
                for t in 0..cfg.trials {
                    let initial =
                        domain.random_initial(cfg.mode, derive_seed(game_seed, [t as u64]));
                    for oracle in &oracles {
                        let psro = PsroConfig {
                            mode: cfg.mode,
                            solver: solver.clone(),
                            oracle: oracle.clone(),
                            max_iterations: cfg.max_iterations,
                            metrics: MetricsSelection {
                                alpha_conv: true,
                                pcs_score: true,
                                ..Default::default()
                            },
                            record_timings: false,
                        };
                        let out = run(&domain, &psro, initial.clone())?;
                        let last = out.trace.final_record();
                        runs.push(RunRow {
                            players: k,
                            strategies: n,
                            game: g,
                            trial: t,
                            oracle: oracle.kind.name().to_string(),
                            iterations: out.trace.records.len() - 1,
                            total_pool_length: last.total_pool_length,
                            converged: out.trace.converged,
                            alpha_conv: last.metrics.alpha_conv.unwrap_or(f64::NAN),
                            pcs_score: last.metrics.pcs_score.unwrap_or(f64::NAN),
                        });
                    }
                }
            }
            for oracle in &oracles {
                let rows: Vec<&RunRow> = runs[cell_start..]
                    .iter()
                    .filter(|r| r.oracle == oracle.kind.name())
                    .collect();
                summary.push(summarize(&rows));
            }
        }
    }
    Ok(OracleCompareResult { runs, summary })
}

pub(crate) fn write_rows<R: Serialize>(rows: &[R], out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

impl OracleCompareResult {
    pub fn summary_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_rows(&self.summary, &mut buf)?;
        Ok(buf)
    }

    pub fn runs_csv(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        write_rows(&self.runs, &mut buf)?;
        Ok(buf)
    }
}
