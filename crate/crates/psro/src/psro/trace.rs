use std::io::Write;

use serde::Serialize;

use super::MetricValues;
use crate::error::Result;
use crate::solvers::MetaDistribution;

/// A strategy an oracle proposed in one iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Proposal {
    pub strategy: String,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
    /// Already present in the population, so not added.
    pub duplicate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub population_sizes: Vec<usize>,
    pub total_pool_length: usize,
    /// Meta-game entries evaluated while completing this population.
    pub new_evaluations: usize,
    pub meta_distribution: MetaDistribution<f64>,
    /// Per list, every proposal the oracle made (empty on the final budget record).
    pub proposals: Vec<Vec<Proposal>>,
    /// Per list, the strategies actually appended.
    pub added: Vec<Vec<String>>,
    pub converged: bool,
    pub metrics: MetricValues,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsroTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl PsroTrace {
    pub fn final_record(&self) -> &IterationRecord {
        self.records
            .last()
            .expect("a trace has at least one record")
    }

    /// Last recorded value of a metric at or below the given pool length.
    pub fn metric_at(
        &self,
        pool_length: usize,
        metric: impl Fn(&MetricValues) -> Option<f64>,
    ) -> Option<f64> {
        self.records
            .iter()
            .filter(|r| r.total_pool_length <= pool_length)
            .filter_map(|r| metric(&r.metrics))
            .last()
    }

    /// One JSON object per iteration.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Flat metric table: iteration, total_pool_length, nashconv, alpha_conv,
    /// pcs_score, diversity_k.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let lists = self.records.first().map_or(0, |r| r.population_sizes.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "iteration".to_string(),
            "total_pool_length".into(),
            "nashconv".into(),
            "alpha_conv".into(),
            "pcs_score".into(),
        ];
        header.extend((0..lists).map(|k| format!("diversity_{k}")));
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.iteration.to_string(),
                r.total_pool_length.to_string(),
                cell(r.metrics.nashconv),
                cell(r.metrics.alpha_conv),
                cell(r.metrics.pcs_score),
            ];
            for k in 0..lists {
                row.push(
                    r.metrics
                        .diversity
                        .as_ref()
                        .map(|d| d[k].to_string())
                        .unwrap_or_default(),
                );
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
