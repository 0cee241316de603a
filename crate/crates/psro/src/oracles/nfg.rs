//! Oracles over the pure strategies of a normal-form game.

use super::{
    finish_list, meta_sink_components, num_lists, Candidate, OracleConfig, OracleKind,
    OracleOutput, TieBreak,
};
use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::graph::PopulationMode;
use crate::psro::Population;
use crate::scalar::Scalar;
use crate::solvers::MetaDistribution;

/// Everything an oracle sees in one PSRO iteration.
#[derive(Clone, Copy)]
pub struct NfgContext<'a, T> {
    pub game: &'a NormalFormGame<T>,
    pub population: &'a Population<usize, T>,
    pub meta: &'a NormalFormGame<T>,
    pub dist: &'a MetaDistribution<T>,
}

fn near<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= T::lit(1e-12) * T::one().max(a.abs()).max(b.abs())
}

impl<T: Scalar> NfgContext<'_, T> {
    fn mode(&self) -> PopulationMode {
        self.population.mode()
    }

    /// Underlying-game flat index of a meta-game profile.
    pub fn underlying_flat(&self, meta_flat: usize) -> usize {
        let strides = self.game.strides();
        (0..self.meta.num_players())
            .map(|k| strides[k] * self.population.list(k)[self.meta.strategy_at(meta_flat, k)])
            .sum()
    }

    /// Expected payoff of every pure strategy of `player` against the
    /// meta-distribution (weights given per meta-profile node).
    fn values_against(&self, player: usize, nodes: &[(usize, T)]) -> Vec<T> {
        let n = self.game.strategy_counts()[player];
        let mut values = vec![T::zero(); n];
        match self.mode() {
            PopulationMode::Single => {
                let list = self.population.list(0);
                for &(i, w) in nodes {
                    for (sigma, v) in values.iter_mut().enumerate() {
                        *v += w * self.game.payoff(0, &[sigma, list[i]]);
                    }
                }
            }
            PopulationMode::Multi => {
                for &(f, w) in nodes {
                    let u = self.underlying_flat(f);
                    for (sigma, v) in values.iter_mut().enumerate() {
                        *v += w * self
                            .game
                            .payoff_flat(player, self.game.deviate(u, player, sigma));
                    }
                }
            }
        }
        values
    }

    /// Nodes of the meta response graph with positive mass.
    fn weighted_nodes(&self, nodes: impl Iterator<Item = usize>) -> Vec<(usize, T)> {
        nodes
            .map(|v| (v, self.dist.node_mass(self.meta, v)))
            .filter(|(_, w)| *w > T::zero())
            .collect()
    }

    fn all_nodes(&self) -> Vec<(usize, T)> {
        let n = match self.mode() {
            PopulationMode::Single => self.population.list(0).len(),
            PopulationMode::Multi => self.meta.num_profiles(),
        };
        self.weighted_nodes(0..n)
    }

    /// Best-response payoffs of every pure strategy of `player` against π.
    pub fn best_response_values(&self, player: usize) -> Vec<T> {
        self.values_against(player, &self.all_nodes())
    }

    /// PBR scores of every pure strategy of `player` against the weighted nodes.
    fn pbr_against(&self, player: usize, nodes: &[(usize, T)], tol: T) -> Vec<T> {
        let n = self.game.strategy_counts()[player];
        let mut scores = vec![T::zero(); n];
        match self.mode() {
            PopulationMode::Single => {
                let list = self.population.list(0);
                for &(i, w) in nodes {
                    for (sigma, s) in scores.iter_mut().enumerate() {
                        let pair = [sigma, list[i]];
                        if self.game.payoff(0, &pair) > self.game.payoff(1, &pair) + tol {
                            *s += w;
                        }
                    }
                }
            }
            PopulationMode::Multi => {
                for &(f, w) in nodes {
                    let u = self.underlying_flat(f);
                    let base = self.game.payoff_flat(player, u);
                    for (sigma, s) in scores.iter_mut().enumerate() {
                        if self
                            .game
                            .payoff_flat(player, self.game.deviate(u, player, sigma))
                            > base + tol
                        {
                            *s += w;
                        }
                    }
                }
            }
        }
        scores
    }

    /// Meta-SSCCs as weighted node lists; single-population PBR uses the full
    /// distribution as one group.
    fn pbr_groups(&self) -> Result<Vec<Vec<(usize, T)>>> {
        match self.mode() {
            PopulationMode::Single => Ok(vec![self.all_nodes()]),
            PopulationMode::Multi => Ok(meta_sink_components(self.meta, self.dist)?
                .into_iter()
                .map(|c| self.weighted_nodes(c.into_iter()))
                .collect()),
        }
    }

    /// PBR-Score of every pure strategy of `player`, summed over meta-SSCCs.
    pub fn pbr_scores(&self, player: usize, beats_tolerance: f64) -> Result<Vec<T>> {
        let tol = T::lit(beats_tolerance);
        let mut total = vec![T::zero(); self.game.strategy_counts()[player]];
        for group in self.pbr_groups()? {
            for (t, s) in total.iter_mut().zip(self.pbr_against(player, &group, tol)) {
                *t += s;
            }
        }
        Ok(total)
    }
}

/// Index of the best allowed entry of `scores`; ties broken by `values`
/// (when given) and then by lowest index.
fn select<T: Scalar>(
    scores: &[T],
    values: Option<&[T]>,
    allowed: impl Fn(usize) -> bool,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in (0..scores.len()).filter(|&i| allowed(i)) {
        best = match best {
            None => Some(i),
            Some(b) => {
                let better = if near(scores[i], scores[b]) {
                    values.is_some_and(|v| v[i] > v[b] && !near(v[i], v[b]))
                } else {
                    scores[i] > scores[b]
                };
                if better {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best
}

/// Full argmax set of `scores` (ties within a relative 1e-12).
pub fn argmax_set<T: Scalar>(scores: &[T]) -> Vec<usize> {
    let Some(max) = scores.iter().copied().reduce(T::max) else {
        return Vec::new();
    };
    (0..scores.len())
        .filter(|&i| near(scores[i], max))
        .collect()
}

fn in_list(pop: &Population<usize, impl Scalar>, list: usize, s: usize) -> bool {
    pop.lists()[list].contains(&s)
}

fn best_response<T: Scalar>(ctx: &NfgContext<'_, T>) -> Vec<Vec<Candidate<usize>>> {
    (0..num_lists(ctx.mode(), ctx.game.num_players()))
        .map(|k| {
            let values = ctx.best_response_values(k);
            let s = select(&values, None, |_| true).expect("at least one strategy");
            vec![Candidate {
                strategy: s,
                score: values[s].to_f64_lossy(),
                component: None,
                source: None,
            }]
        })
        .collect()
}

fn pbr<T: Scalar>(
    ctx: &NfgContext<'_, T>,
    cfg: &OracleConfig,
    novelty: bool,
) -> Result<Vec<Vec<Candidate<usize>>>> {
    let tol = T::lit(cfg.beats_tolerance);
    let groups = ctx.pbr_groups()?;
    let lists = num_lists(ctx.mode(), ctx.game.num_players());
    let mut out = vec![Vec::new(); lists];
    for (l, group) in groups.iter().enumerate() {
        for (k, cands) in out.iter_mut().enumerate() {
            let scores = ctx.pbr_against(k, group, tol);
            let values = match cfg.tie_break {
                TieBreak::PayoffThenIndex => Some(ctx.values_against(k, group)),
                TieBreak::LexicographicMin => None,
            };
            let allowed =
                |s: usize| !novelty || (!in_list(ctx.population, k, s) && scores[s] > T::zero());
            let Some(s) = select(&scores, values.as_deref(), allowed) else {
                continue;
            };
            // A zero best score means nothing beats the component: no proposal.
            if scores[s] <= T::zero() {
                continue;
            }
            cands.push(Candidate {
                strategy: s,
                score: scores[s].to_f64_lossy(),
                component: (ctx.mode() == PopulationMode::Multi).then_some(l),
                source: None,
            });
        }
    }
    Ok(out)
}

fn rectified<T: Scalar>(
    ctx: &NfgContext<'_, T>,
    cfg: &OracleConfig,
    diagnostics: &mut Vec<String>,
) -> Result<Vec<Vec<Candidate<usize>>>> {
    if ctx.game.num_players() != 2 {
        return Err(Error::UnsupportedConfig(
            "rectified BR needs a two-player game".into(),
        ));
    }
    let lists = num_lists(ctx.mode(), 2);
    let thr = T::lit(cfg.rectify_threshold);
    let mut out = vec![Vec::new(); lists];
    for (k, cands) in out.iter_mut().enumerate() {
        let opp = 1 - k;
        let own = ctx.dist.marginal(k);
        let opp_mass = ctx.dist.marginal(opp);
        for (i, &p) in own.iter().enumerate() {
            if p <= thr {
                continue;
            }
            let mut weights = Vec::new();
            let mut ties = 0;
            for (j, &w) in opp_mass.iter().enumerate() {
                let mut prof = [0usize; 2];
                prof[k] = i;
                prof[opp] = j;
                let v = ctx.meta.payoff(k, &prof);
                if v >= T::zero() && w > T::zero() {
                    weights.push((j, w));
                    if v == T::zero() {
                        ties += 1;
                    }
                }
            }
            let mass = weights.iter().fold(T::zero(), |a, &(_, w)| a + w);
            if mass <= T::zero() {
                diagnostics.push(format!(
                    "player {k}: member {i} beats no weighted opponent; skipped"
                ));
                continue;
            }
            if ties > 0 {
                diagnostics.push(format!(
                    "player {k}: member {i} trains against {ties} tied opponent(s)"
                ));
            }
            let n = ctx.game.strategy_counts()[k];
            let opp_list = ctx.population.list(opp);
            let mut values = vec![T::zero(); n];
            for &(j, w) in &weights {
                for (sigma, v) in values.iter_mut().enumerate() {
                    let mut prof = [0usize; 2];
                    prof[k] = sigma;
                    prof[opp] = opp_list[j];
                    *v += w / mass * ctx.game.payoff(k, &prof);
                }
            }
            let s = select(&values, None, |_| true).expect("at least one strategy");
            cands.push(Candidate {
                strategy: s,
                score: values[s].to_f64_lossy(),
                component: None,
                source: Some(i),
            });
        }
    }
    Ok(out)
}

/// Runs the configured oracle on a normal-form game.
pub fn expand<T: Scalar>(
    ctx: &NfgContext<'_, T>,
    cfg: &OracleConfig,
) -> Result<OracleOutput<usize>> {
    cfg.validate()?;
    let mut diagnostics = Vec::new();
    let raw = match cfg.kind {
        OracleKind::Br => best_response(ctx),
        OracleKind::Pbr => pbr(ctx, cfg, false)?,
        OracleKind::PbrNoveltyBound => pbr(ctx, cfg, true)?,
        OracleKind::RectifiedBr => rectified(ctx, cfg, &mut diagnostics)?,
    };
    let lists = raw
        .into_iter()
        .enumerate()
        .map(|(l, c)| finish_list(c, |a, b| a == b, |s| in_list(ctx.population, l, *s)))
        .collect();
    Ok(OracleOutput { lists, diagnostics })
}
