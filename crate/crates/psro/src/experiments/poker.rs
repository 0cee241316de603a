//! PSRO on Kuhn poker under several meta-solvers.

use super::{ExperimentConfig, GameSpec};
use crate::error::{Error, Result};
use crate::psro::{run, MetricsSelection, PokerDomain, PsroConfig, PsroTrace};

#[derive(Debug, Clone, PartialEq)]
pub struct PokerTrace {
    /// File stem, unique within the experiment.
    pub name: String,
    pub solver: String,
    pub oracle: String,
    pub trace: PsroTrace,
}

/// One PSRO run per (solver, oracle) pair, all from the uniform start.
pub fn poker_meta_solvers(cfg: &ExperimentConfig) -> Result<Vec<PokerTrace>> {
    cfg.validate()?;
    let GameSpec::Kuhn { players } = cfg.game else {
        return Err(Error::UnsupportedConfig(
            "poker_meta_solvers needs a Kuhn game spec".into(),
        ));
    };
    let domain = PokerDomain::new(players, cfg.payoff_mode)?;
    let mut out: Vec<PokerTrace> = Vec::new();
    for oracle in cfg.oracle_list() {
        for solver in &cfg.solvers {
            let psro = PsroConfig {
                mode: cfg.mode,
                solver: solver.clone(),
                oracle: oracle.clone(),
                max_iterations: cfg.max_iterations,
                metrics: MetricsSelection {
                    nashconv: true,
                    diversity: true,
                    ..Default::default()
                },
                record_timings: false,
            };
            let result = run(&domain, &psro, domain.uniform_initial::<f64>())?;
            let mut name = format!("kuhn{players}_{}_{}", solver.name(), oracle.kind.name());
            let dup = out.iter().filter(|t| t.name.starts_with(&name)).count();
            if dup > 0 {
                name = format!("{name}_{dup}");
            }
            out.push(PokerTrace {
                name,
                solver: solver.name().to_string(),
                oracle: oracle.kind.name().to_string(),
                trace: result.trace,
            });
        }
    }
    Ok(out)
}
