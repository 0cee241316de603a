//! Experiment drivers behind the command-line runner.

mod alpharank_solve;
mod config;
mod oracle_compare;
mod poker;
pub mod walkthrough;

pub use alpharank_solve::{alpharank_report, alpharank_solve, AlphaRankReport, NodeReport};
pub use config::{ExperimentConfig, ExperimentKind, GameSpec};
pub use oracle_compare::{oracle_compare, OracleCompareResult, RunRow, SummaryRow};
pub use poker::{poker_meta_solvers, PokerTrace};
pub use walkthrough::{run_walkthrough, Walkthrough, WalkthroughLog};

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// What an experiment produced.
#[derive(Debug)]
pub struct ExperimentOutcome {
    /// Human-readable summary for the terminal.
    pub summary: String,
    pub files: Vec<PathBuf>,
    /// Set when a walkthrough deviates from its expected trace.
    pub mismatch: Option<Error>,
}

fn write_file(
    dir: Option<&Path>,
    name: &str,
    bytes: &[u8],
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        files.push(path);
    }
    Ok(())
}

/// Runs the configured experiment, writing outputs under `out_dir` when set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let dir = cfg.out_dir.as_deref();
    let mut files = Vec::new();
    let mut mismatch = None;
    let summary = match cfg.experiment {
        ExperimentKind::OracleCompare => {
            let res = oracle_compare(cfg)?;
            let csv = res.summary_csv()?;
            write_file(dir, "oracle_compare_summary.csv", &csv, &mut files)?;
            write_file(dir, "oracle_compare_runs.csv", &res.runs_csv()?, &mut files)?;
            String::from_utf8_lossy(&csv).into_owned()
        }
        ExperimentKind::PokerMetaSolvers => {
            let traces = poker_meta_solvers(cfg)?;
            let mut text = String::new();
            for t in &traces {
                let mut csv = Vec::new();
                t.trace.write_csv(&mut csv)?;
                let mut jsonl = Vec::new();
                t.trace.write_jsonl(&mut jsonl)?;
                write_file(dir, &format!("{}.csv", t.name), &csv, &mut files)?;
                write_file(dir, &format!("{}.jsonl", t.name), &jsonl, &mut files)?;
                let last = t.trace.final_record();
                text.push_str(&format!(
                    "{}: pool length {}, NashConv {}, converged {}\n",
                    t.name,
                    last.total_pool_length,
                    last.metrics
                        .nashconv
                        .map_or("-".into(), |v| format!("{v:.6}")),
                    t.trace.converged
                ));
            }
            text
        }
        ExperimentKind::FixtureWalkthrough => {
            let GameSpec::Walkthrough { name } = cfg.game else {
                unreachable!("validated above");
            };
            let log = run_walkthrough(name)?;
            write_file(
                dir,
                &format!("walkthrough_{name}.json"),
                &serde_json::to_vec_pretty(&log)?,
                &mut files,
            )?;
            mismatch = log.first_mismatch();
            let mut text = String::new();
            for s in &log.steps {
                text.push_str(&format!(
                    "step {}: population {:?}, meta-support {:?}, added {:?}{}\n",
                    s.step,
                    s.population,
                    s.meta_support,
                    s.added,
                    if s.converged { ", converged" } else { "" }
                ));
            }
            for c in &log.checks {
                text.push_str(&format!(
                    "[{}] step {}: {}{}\n",
                    if c.passed { "ok" } else { "MISMATCH" },
                    c.step,
                    c.description,
                    if c.passed {
                        String::new()
                    } else {
                        format!(" ({})", c.detail)
                    }
                ));
            }
            text
        }
        ExperimentKind::AlpharankSolve => {
            let report = alpharank_solve(cfg)?;
            let json = serde_json::to_vec_pretty(&report)?;
            write_file(dir, "alpharank.json", &json, &mut files)?;
            String::from_utf8_lossy(&json).into_owned()
        }
    };
    Ok(ExperimentOutcome {
        summary,
        files,
        mismatch,
    })
}
