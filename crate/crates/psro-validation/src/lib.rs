//! Helpers for the acceptance run: per-criterion outcomes and readers for
//! the CSV files the experiments write.

use std::fmt;
use std::path::Path;
use std::time::Duration;

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub criterion: usize,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// One row of a PSRO trace CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub total_pool_length: usize,
    pub nashconv: Option<f64>,
    /// Unique policies per population list.
    pub diversity: Vec<usize>,
}

impl TraceRow {
    pub fn total_diversity(&self) -> usize {
        self.diversity.iter().sum()
    }
}

fn parse_opt<T: std::str::FromStr>(s: &str) -> Result<Option<T>, String> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| format!("bad cell {s:?}"))
}

/// Reads a trace CSV (`iteration,total_pool_length,nashconv,...,diversity_k`).
pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>, String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or(format!("missing column {name}"))
    };
    let (it, pool, nc) = (
        col("iteration")?,
        col("total_pool_length")?,
        col("nashconv")?,
    );
    let div: Vec<usize> = (0..header.len())
        .filter(|&i| header[i].starts_with("diversity_"))
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        rows.push(TraceRow {
            iteration: rec[it].parse().map_err(|_| "bad iteration".to_string())?,
            total_pool_length: rec[pool]
                .parse()
                .map_err(|_| "bad pool length".to_string())?,
            nashconv: parse_opt(&rec[nc])?,
            diversity: div
                .iter()
                .map(|&i| parse_opt(&rec[i]).map(Option::unwrap_or_default))
                .collect::<Result<_, _>>()?,
        });
    }
    Ok(rows)
}

/// NashConv of the last row whose pool length is at most `pool_length`.
/// A run that stopped early keeps its final value.
pub fn nashconv_at(rows: &[TraceRow], pool_length: usize) -> Option<f64> {
    rows.iter()
        .filter(|r| r.total_pool_length <= pool_length)
        .filter_map(|r| r.nashconv)
        .next_back()
}

/// Smallest NashConv seen at pool length at most `pool_length`.
pub fn best_nashconv_within(rows: &[TraceRow], pool_length: usize) -> Option<f64> {
    rows.iter()
        .filter(|r| r.total_pool_length <= pool_length)
        .filter_map(|r| r.nashconv)
        .reduce(f64::min)
}

/// Total unique-policy count at which the run stops discovering policies:
/// the first count that holds for `window` consecutive later rows, or the
/// final count of a run that terminated before its budget.
pub fn diversity_plateau(
    rows: &[TraceRow],
    window: usize,
    terminated_early: bool,
) -> Option<usize> {
    let totals: Vec<usize> = rows.iter().map(TraceRow::total_diversity).collect();
    for i in 0..totals.len() {
        if i + window < totals.len() && totals[i..=i + window].iter().all(|&t| t == totals[i]) {
            return Some(totals[i]);
        }
    }
    if terminated_early {
        totals.last().copied()
    } else {
        None
    }
}
