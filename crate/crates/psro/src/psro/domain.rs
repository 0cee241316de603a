use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Population, PsroConfig};
use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::graph::{PopulationMode, ResponseGraph};
use crate::kuhn::{BehavioralPolicy, KuhnPoker};
use crate::metrics;
use crate::oracles::nfg::NfgContext;
use crate::oracles::poker::PokerContext;
use crate::oracles::{OracleConfig, OracleKind, OracleOutput};
use crate::scalar::Scalar;
use crate::seeds::derive_seed;
use crate::solvers::{MetaDistribution, MetaSolverConfig};

/// Which metrics to compute on every iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsSelection {
    pub nashconv: bool,
    pub alpha_conv: bool,
    pub pcs_score: bool,
    pub diversity: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricValues {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nashconv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_conv: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pcs_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diversity: Option<Vec<usize>>,
}

/// The underlying game PSRO operates on.
pub trait Domain<T: Scalar> {
    type Strategy: Clone;

    fn num_players(&self) -> usize;

    /// Payoffs of one meta-game profile; `index` holds the population indices.
    fn evaluate(&self, index: &[usize], profile: &[&Self::Strategy]) -> Result<Vec<T>>;

    fn same(&self, a: &Self::Strategy, b: &Self::Strategy) -> bool;

    /// Human-readable name for a strategy at `position` in list `list`.
    fn describe(&self, list: usize, s: &Self::Strategy, position: usize) -> String;

    /// Rejects configurations the domain cannot run.
    fn check(&self, config: &PsroConfig) -> Result<()>;

    fn expand(
        &self,
        pop: &Population<Self::Strategy, T>,
        meta: &NormalFormGame<T>,
        dist: &MetaDistribution<T>,
        oracle: &OracleConfig,
    ) -> Result<OracleOutput<Self::Strategy>>;

    fn metrics(
        &self,
        pop: &Population<Self::Strategy, T>,
        meta: &NormalFormGame<T>,
        dist: &MetaDistribution<T>,
        which: &MetricsSelection,
    ) -> Result<MetricValues>;
}

fn check_common(config: &PsroConfig) -> Result<()> {
    config.oracle.validate()?;
    config.solver.validate()
}

/// A normal-form game with pure strategies as population members.
#[derive(Debug)]
pub struct NfgDomain<T> {
    game: NormalFormGame<T>,
    full_graphs: [OnceCell<ResponseGraph>; 2],
}

impl<T: Scalar> NfgDomain<T> {
    pub fn new(game: NormalFormGame<T>) -> Self {
        NfgDomain {
            game,
            full_graphs: [OnceCell::new(), OnceCell::new()],
        }
    }

    pub fn game(&self) -> &NormalFormGame<T> {
        &self.game
    }

    /// Response graph of the full game (built once per mode).
    pub fn full_graph(&self, mode: PopulationMode) -> Result<&ResponseGraph> {
        let cell = &self.full_graphs[mode as usize];
        if let Some(g) = cell.get() {
            return Ok(g);
        }
        let g = metrics::full_game_graph(&self.game, mode)?;
        Ok(cell.get_or_init(|| g))
    }

    /// One seeded random pure strategy per list.
    pub fn random_initial(&self, mode: PopulationMode, seed: u64) -> Vec<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lists = match mode {
            PopulationMode::Single => 1,
            PopulationMode::Multi => self.game.num_players(),
        };
        (0..lists)
            .map(|k| vec![rng.random_range(0..self.game.strategy_counts()[k])])
            .collect()
    }

    fn context<'a>(
        &'a self,
        pop: &'a Population<usize, T>,
        meta: &'a NormalFormGame<T>,
        dist: &'a MetaDistribution<T>,
    ) -> NfgContext<'a, T> {
        NfgContext {
            game: &self.game,
            population: pop,
            meta,
            dist,
        }
    }
}

impl<T: Scalar> Domain<T> for NfgDomain<T> {
    type Strategy = usize;

    fn num_players(&self) -> usize {
        self.game.num_players()
    }

    fn evaluate(&self, _index: &[usize], profile: &[&usize]) -> Result<Vec<T>> {
        let p: Vec<usize> = profile.iter().map(|&&s| s).collect();
        let flat = self.game.checked_flat_index(&p)?;
        Ok((0..self.game.num_players())
            .map(|k| self.game.payoff_flat(k, flat))
            .collect())
    }

    fn same(&self, a: &usize, b: &usize) -> bool {
        a == b
    }

    fn describe(&self, list: usize, s: &usize, _position: usize) -> String {
        self.game.strategy_label(list, *s)
    }

    fn check(&self, config: &PsroConfig) -> Result<()> {
        check_common(config)?;
        if config.mode == PopulationMode::Single
            && (self.game.num_players() != 2 || !self.game.is_symmetric())
        {
            return Err(Error::UnsupportedConfig(
                "single-population PSRO needs a symmetric two-player game".into(),
            ));
        }
        if config.solver == MetaSolverConfig::NashLp
            && (self.game.num_players() != 2 || !self.game.is_zero_sum())
        {
            return Err(Error::UnsupportedConfig(
                "the LP meta-solver needs a two-player zero-sum game".into(),
            ));
        }
        if config.oracle.kind == OracleKind::RectifiedBr && self.game.num_players() != 2 {
            return Err(Error::UnsupportedConfig(
                "rectified BR needs a two-player game".into(),
            ));
        }
        Ok(())
    }

    fn expand(
        &self,
        pop: &Population<usize, T>,
        meta: &NormalFormGame<T>,
        dist: &MetaDistribution<T>,
        oracle: &OracleConfig,
    ) -> Result<OracleOutput<usize>> {
        crate::oracles::nfg::expand(&self.context(pop, meta, dist), oracle)
    }

    fn metrics(
        &self,
        pop: &Population<usize, T>,
        meta: &NormalFormGame<T>,
        dist: &MetaDistribution<T>,
        which: &MetricsSelection,
    ) -> Result<MetricValues> {
        let ctx = self.context(pop, meta, dist);
        let mut out = MetricValues::default();
        if which.nashconv {
            out.nashconv = Some(metrics::nfg_nashconv(&ctx)?.to_f64_lossy());
        }
        if which.alpha_conv {
            out.alpha_conv = Some(metrics::alpha_conv(&ctx)?.to_f64_lossy());
        }
        if which.pcs_score {
            out.pcs_score = Some(metrics::pcs_score(&ctx, self.full_graph(pop.mode())?)?);
        }
        Ok(out)
    }
}

/// How poker meta-game entries are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayoffMode {
    #[default]
    Exact,
    /// Seeded Monte Carlo mean over `episodes` rollouts per entry.
    Simulate { episodes: usize, seed: u64 },
}

impl fmt::Display for PayoffMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PayoffMode::Exact => f.write_str("exact"),
            PayoffMode::Simulate { episodes, .. } => write!(f, "simulate:{episodes}"),
        }
    }
}

impl FromStr for PayoffMode {
    type Err = Error;

    /// `exact` or `simulate:N` (seed 0; set it through the config for other seeds).
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "exact" => Ok(PayoffMode::Exact),
            Some(("simulate", n)) => {
                let episodes: usize = n
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad episode count in {s:?}")))?;
                if episodes == 0 {
                    return Err(Error::invalid("simulation needs at least one episode"));
                }
                Ok(PayoffMode::Simulate { episodes, seed: 0 })
            }
            _ => Err(Error::invalid(format!("unknown payoff mode {s:?}"))),
        }
    }
}

/// Kuhn poker with behavioral policies as population members.
#[derive(Debug, Clone)]
pub struct PokerDomain {
    tree: KuhnPoker,
    payoff_mode: PayoffMode,
}

impl PokerDomain {
    pub fn new(num_players: usize, payoff_mode: PayoffMode) -> Result<Self> {
        Ok(PokerDomain {
            tree: KuhnPoker::new(num_players)?,
            payoff_mode,
        })
    }

    pub fn tree(&self) -> &KuhnPoker {
        &self.tree
    }

    /// Uniform random policy for every seat.
    pub fn uniform_initial<T: Scalar>(&self) -> Vec<Vec<BehavioralPolicy<T>>> {
        (0..self.tree.num_players())
            .map(|k| vec![BehavioralPolicy::uniform(&self.tree, k)])
            .collect()
    }
}

impl<T: Scalar> Domain<T> for PokerDomain {
    type Strategy = BehavioralPolicy<T>;

    fn num_players(&self) -> usize {
        self.tree.num_players()
    }

    fn evaluate(&self, index: &[usize], profile: &[&BehavioralPolicy<T>]) -> Result<Vec<T>> {
        let joint: Vec<BehavioralPolicy<T>> = profile.iter().map(|&p| p.clone()).collect();
        match self.payoff_mode {
            PayoffMode::Exact => self.tree.expected_payoffs(&joint),
            PayoffMode::Simulate { episodes, seed } => self.tree.simulate(
                &joint,
                episodes,
                derive_seed(seed, index.iter().map(|&i| i as u64)),
            ),
        }
    }

    fn same(&self, a: &BehavioralPolicy<T>, b: &BehavioralPolicy<T>) -> bool {
        crate::kuhn::policy_equal(a, b)
    }

    fn describe(&self, list: usize, _s: &BehavioralPolicy<T>, position: usize) -> String {
        format!("p{list}#{position}")
    }

    fn check(&self, config: &PsroConfig) -> Result<()> {
        check_common(config)?;
        if config.mode != PopulationMode::Multi {
            return Err(Error::UnsupportedConfig(
                "poker runs use one population per seat".into(),
            ));
        }
        if config.solver == MetaSolverConfig::NashLp && self.tree.num_players() != 2 {
            return Err(Error::UnsupportedConfig(
                "the LP meta-solver is limited to two-player poker".into(),
            ));
        }
        if matches!(config.solver, MetaSolverConfig::NashSupportEnum { .. })
            && self.tree.num_players() != 2
        {
            return Err(Error::UnsupportedConfig(
                "support enumeration needs two players".into(),
            ));
        }
        match config.oracle.kind {
            OracleKind::Pbr | OracleKind::PbrNoveltyBound => Err(Error::UnsupportedConfig(
                "PBR oracles are available for normal-form games only".into(),
            )),
            OracleKind::RectifiedBr if self.tree.num_players() != 2 => Err(
                Error::UnsupportedConfig("rectified BR needs two players".into()),
            ),
            _ => Ok(()),
        }
    }

    fn expand(
        &self,
        pop: &Population<BehavioralPolicy<T>, T>,
        meta: &NormalFormGame<T>,
        dist: &MetaDistribution<T>,
        oracle: &OracleConfig,
    ) -> Result<OracleOutput<BehavioralPolicy<T>>> {
        let ctx = PokerContext {
            tree: &self.tree,
            population: pop,
            meta,
            dist,
        };
        crate::oracles::poker::expand(&ctx, oracle)
    }

    fn metrics(
        &self,
        pop: &Population<BehavioralPolicy<T>, T>,
        meta: &NormalFormGame<T>,
        dist: &MetaDistribution<T>,
        which: &MetricsSelection,
    ) -> Result<MetricValues> {
        let ctx = PokerContext {
            tree: &self.tree,
            population: pop,
            meta,
            dist,
        };
        let mut out = MetricValues::default();
        if which.nashconv {
            out.nashconv = Some(metrics::poker_nashconv(&ctx)?.to_f64_lossy());
        }
        if which.diversity {
            out.diversity = Some(metrics::diversity(pop.lists()));
        }
        if which.alpha_conv || which.pcs_score {
            return Err(Error::UnsupportedConfig(
                "α-Conv and PCS-Score are defined for normal-form games only".into(),
            ));
        }
        Ok(out)
    }
}
