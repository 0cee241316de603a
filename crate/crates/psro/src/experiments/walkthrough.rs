//! Step-by-step replays of the small fixture runs, checked against their
//! known traces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{fixture_game, Fixture, NormalFormGame};
use crate::graph::PopulationMode;
use crate::oracles::nfg::NfgContext;
use crate::oracles::{OracleConfig, OracleKind};
use crate::psro::{initialize, step, Domain, NfgDomain, Population, PsroConfig};
use crate::solvers::MetaSolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Walkthrough {
    /// Single-population α-Rank with BR on table2, from {C}.
    Example1,
    /// Multi-population α-Rank with BR on table2, from (C, C).
    Example2,
    /// Single-population α-Rank with PBR on table2, from {C}.
    Example3,
    /// Multi-population α-Rank with PBR on the snowflake game, from ([2], [1], [1]).
    Snowflake,
}

impl Walkthrough {
    pub const ALL: [Walkthrough; 4] = [
        Walkthrough::Example1,
        Walkthrough::Example2,
        Walkthrough::Example3,
        Walkthrough::Snowflake,
    ];
}

impl fmt::Display for Walkthrough {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Walkthrough::Example1 => "example1",
            Walkthrough::Example2 => "example2",
            Walkthrough::Example3 => "example3",
            Walkthrough::Snowflake => "snowflake",
        })
    }
}

impl FromStr for Walkthrough {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Walkthrough::ALL
            .into_iter()
            .find(|w| w.to_string() == s)
            .ok_or_else(|| Error::invalid(format!("unknown walkthrough {s:?}")))
    }
}

/// One PSRO step as seen by the walkthrough.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkthroughStep {
    pub step: usize,
    /// Strategy labels per list.
    pub population: Vec<Vec<String>>,
    /// Meta-profiles (or members) with mass above 1e-6, with their mass.
    pub meta_support: Vec<(String, f64)>,
    /// PBR-Score of every strategy of the first list, for PBR runs.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pbr_scores: Vec<(String, f64)>,
    pub proposals: Vec<Vec<String>>,
    pub added: Vec<Vec<String>>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub step: usize,
    pub description: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkthroughLog {
    pub name: String,
    pub steps: Vec<WalkthroughStep>,
    pub checks: Vec<Check>,
    /// Step number of the first PSRO iteration (the snowflake trace counts
    /// initialization as step 1).
    pub first_step: usize,
}

impl WalkthroughLog {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Error naming the first failed check, if any.
    pub fn first_mismatch(&self) -> Option<Error> {
        self.checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| Error::Mismatch {
                step: format!("{} step {}", self.name, c.step),
                detail: format!("{}: {}", c.description, c.detail),
            })
    }

    fn check(
        &mut self,
        step: usize,
        description: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) {
        self.checks.push(Check {
            step,
            description: description.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn step(&self, n: usize) -> Option<&WalkthroughStep> {
        n.checked_sub(self.first_step)
            .and_then(|i| self.steps.get(i))
    }

    fn check_population(&mut self, n: usize, want: &[&[&str]]) {
        let want: Vec<Vec<String>> = want
            .iter()
            .map(|l| l.iter().map(|s| s.to_string()).collect())
            .collect();
        let got = self.step(n).map(|s| s.population.clone());
        let ok = got.as_ref() == Some(&want);
        self.check(
            n,
            format!("population {want:?}"),
            ok,
            format!("got {got:?}"),
        );
    }

    fn check_dirac(&mut self, n: usize, profile: &str) {
        let support = self
            .step(n)
            .map(|s| s.meta_support.clone())
            .unwrap_or_default();
        let ok = support.len() == 1 && support[0].0 == profile && (support[0].1 - 1.0).abs() < 1e-6;
        self.check(
            n,
            format!("meta-distribution is a Dirac on {profile}"),
            ok,
            format!("got {support:?}"),
        );
    }

    fn check_added(&mut self, n: usize, want: &[&[&str]]) {
        let want: Vec<Vec<String>> = want
            .iter()
            .map(|l| l.iter().map(|s| s.to_string()).collect())
            .collect();
        let got = self.step(n).map(|s| s.added.clone());
        let ok = got.as_ref() == Some(&want);
        self.check(n, format!("adds {want:?}"), ok, format!("got {got:?}"));
    }

    fn check_terminates_at(&mut self, n: usize) {
        let ok = self
            .steps
            .last()
            .is_some_and(|s| s.step == n && s.converged);
        self.check(
            n,
            "run terminates here",
            ok,
            format!(
                "{} steps, converged {:?}",
                self.steps.len(),
                self.steps.last().map(|s| s.converged)
            ),
        );
    }

    fn check_never_added(&mut self, label: &str) {
        let ok = self
            .steps
            .iter()
            .all(|s| s.population.iter().all(|l| !l.iter().any(|x| x == label)));
        let last = self.steps.last().map_or(0, |s| s.step);
        self.check(
            last,
            format!("{label} never enters the population"),
            ok,
            String::new(),
        );
    }
}

fn profile_label(
    game: &NormalFormGame<f64>,
    pop: &Population<usize, f64>,
    meta: &NormalFormGame<f64>,
    node: usize,
) -> String {
    match pop.mode() {
        PopulationMode::Single => game.strategy_label(0, pop.list(0)[node]),
        PopulationMode::Multi => {
            let parts: Vec<String> = (0..meta.num_players())
                .map(|k| game.strategy_label(k, pop.list(k)[meta.strategy_at(node, k)]))
                .collect();
            format!("({})", parts.join(","))
        }
    }
}

/// Runs the walkthrough and checks every enumerated step.
pub fn run_walkthrough(which: Walkthrough) -> Result<WalkthroughLog> {
    let (fixture, mode, oracle, initial): (Fixture, PopulationMode, OracleKind, Vec<Vec<usize>>) =
        match which {
            Walkthrough::Example1 => (
                Fixture::table2(),
                PopulationMode::Single,
                OracleKind::Br,
                vec![vec![2]],
            ),
            Walkthrough::Example2 => (
                Fixture::table2(),
                PopulationMode::Multi,
                OracleKind::Br,
                vec![vec![2], vec![2]],
            ),
            Walkthrough::Example3 => (
                Fixture::table2(),
                PopulationMode::Single,
                OracleKind::Pbr,
                vec![vec![2]],
            ),
            Walkthrough::Snowflake => (
                Fixture::Snowflake3p,
                PopulationMode::Multi,
                OracleKind::Pbr,
                vec![vec![1], vec![0], vec![0]],
            ),
        };
    let game: NormalFormGame<f64> = fixture_game(&fixture)?;
    let domain = NfgDomain::new(game.clone());
    let config = PsroConfig {
        mode,
        solver: MetaSolverConfig::alpharank_tolerant(),
        oracle: OracleConfig::new(oracle),
        max_iterations: 10,
        metrics: Default::default(),
        record_timings: false,
    };
    let mut pop = initialize(&domain, mode, initial)?;
    let mut log = WalkthroughLog {
        name: which.to_string(),
        steps: Vec::new(),
        checks: Vec::new(),
        first_step: if which == Walkthrough::Snowflake {
            2
        } else {
            1
        },
    };
    for it in 0..config.max_iterations {
        pop.complete(|idx, profile| domain.evaluate(idx, profile))?;
        let before = pop.clone();
        let record = step(&domain, &mut pop, &config, it)?;
        let meta = before.meta_game()?;
        let dist = &record.meta_distribution;
        let nodes = match mode {
            PopulationMode::Single => before.list(0).len(),
            PopulationMode::Multi => meta.num_profiles(),
        };
        let meta_support = (0..nodes)
            .map(|v| (v, dist.node_mass(&meta, v)))
            .filter(|(_, w)| *w > 1e-6)
            .map(|(v, w)| (profile_label(&game, &before, &meta, v), w))
            .collect();
        let pbr_scores = if oracle == OracleKind::Pbr {
            let ctx = NfgContext {
                game: &game,
                population: &before,
                meta: &meta,
                dist,
            };
            ctx.pbr_scores(0, 0.0)?
                .into_iter()
                .enumerate()
                .map(|(s, v)| (game.strategy_label(0, s), v))
                .collect()
        } else {
            Vec::new()
        };
        log.steps.push(WalkthroughStep {
            step: it + log.first_step,
            population: before
                .lists()
                .iter()
                .enumerate()
                .map(|(l, list)| list.iter().map(|&s| game.strategy_label(l, s)).collect())
                .collect(),
            meta_support,
            pbr_scores,
            proposals: record
                .proposals
                .iter()
                .map(|l| l.iter().map(|p| p.strategy.clone()).collect())
                .collect(),
            added: record.added.clone(),
            converged: record.converged,
        });
        if record.converged {
            break;
        }
    }

    match which {
        Walkthrough::Example1 => {
            log.check_population(1, &[&["C"]]);
            log.check_added(1, &[&["D"]]);
            log.check_population(2, &[&["C", "D"]]);
            log.check_dirac(2, "D");
            log.check_added(2, &[&["A"]]);
            log.check_population(3, &[&["C", "D", "A"]]);
            log.check_dirac(3, "A");
            log.check_added(3, &[&["B"]]);
            log.check_population(4, &[&["C", "D", "A", "B"]]);
            let br = log.step(4).map(|s| s.proposals.clone());
            log.check(
                4,
                "best response is C",
                br == Some(vec![vec!["C".to_string()]]),
                format!("got {br:?}"),
            );
            log.check_terminates_at(4);
            log.check_never_added("X");
        }
        Walkthrough::Example2 => {
            log.check_dirac(1, "(C,C)");
            log.check_added(1, &[&["D"], &["D"]]);
            log.check_dirac(2, "(D,D)");
            log.check_added(2, &[&["A"], &["A"]]);
            log.check_dirac(3, "(A,A)");
            log.check_added(3, &[&["B"], &["B"]]);
            log.check_population(4, &[&["C", "D", "A", "B"], &["C", "D", "A", "B"]]);
            let last = log.steps.last().map_or(0, |s| s.step);
            let converged = log.steps.last().is_some_and(|s| s.converged);
            log.check(last, "run terminates", converged, String::new());
            log.check_never_added("X");
        }
        Walkthrough::Example3 => {
            log.check_population(1, &[&["C"]]);
            log.check_added(1, &[&["D"]]);
            log.check_population(2, &[&["C", "D"]]);
            log.check_added(2, &[&["A"]]);
            log.check_population(3, &[&["C", "D", "A"]]);
            log.check_added(3, &[&["B"]]);
            log.check_population(4, &[&["C", "D", "A", "B"]]);
            let want = [
                ("A", 1.0 / 3.0),
                ("B", 0.5),
                ("C", 1.0 / 3.0),
                ("D", 1.0 / 6.0),
                ("X", 1.0),
            ];
            let got = log
                .step(4)
                .map(|s| s.pbr_scores.clone())
                .unwrap_or_default();
            for (label, w) in want {
                let v = got.iter().find(|(l, _)| l == label).map(|x| x.1);
                let ok = v.is_some_and(|v| (v - w).abs() < 1e-3);
                log.check(
                    4,
                    format!("PBR score of {label} is {w:.4}"),
                    ok,
                    format!("got {v:?}"),
                );
            }
            log.check_added(4, &[&["X"]]);
            let last = log.steps.last().map_or(0, |s| s.step);
            let support = log
                .steps
                .last()
                .map(|s| s.meta_support.clone())
                .unwrap_or_default();
            let ok = log.steps.last().is_some_and(|s| s.converged)
                && support.len() == 1
                && support[0].0 == "X";
            log.check(
                last,
                "terminates with support {X}",
                ok,
                format!("got {support:?}"),
            );
        }
        Walkthrough::Snowflake => {
            log.check_population(2, &[&["2"], &["1"], &["1"]]);
            log.check_added(2, &[&[], &["2"], &[]]);
            log.check_dirac(3, "(2,2,1)");
            log.check_added(3, &[&[], &[], &["2"]]);
            log.check_dirac(4, "(2,2,2)");
            log.check_added(4, &[&["1"], &[], &[]]);
            log.check_population(5, &[&["2", "1"], &["1", "2"], &["1", "2"]]);
            let scores = log
                .step(5)
                .map(|s| s.pbr_scores.clone())
                .unwrap_or_default();
            let score = |l: &str| {
                scores
                    .iter()
                    .find(|(x, _)| x == l)
                    .map_or(f64::NAN, |x| x.1)
            };
            log.check(
                5,
                "player 1 strategy 3 scores below strategy 2",
                score("3") < score("2"),
                format!("got {scores:?}"),
            );
            log.check_terminates_at(5);
            let reached = log.steps.iter().any(|s| {
                s.population[0].iter().any(|x| x == "3") && s.population[2].iter().any(|x| x == "3")
            });
            log.check(5, "(3,2,3) is never reachable", !reached, String::new());
        }
    }
    Ok(log)
}
