//! Oracles over behavioral policies of Kuhn poker.

use super::{finish_list, Candidate, OracleConfig, OracleKind, OracleOutput};
use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::graph::PopulationMode;
use crate::kuhn::{best_response, policy_equal, BehavioralPolicy, KuhnPoker, PolicyMixture};
use crate::psro::Population;
use crate::scalar::Scalar;
use crate::solvers::MetaDistribution;

#[derive(Clone, Copy)]
pub struct PokerContext<'a, T> {
    pub tree: &'a KuhnPoker,
    pub population: &'a Population<BehavioralPolicy<T>, T>,
    pub meta: &'a NormalFormGame<T>,
    pub dist: &'a MetaDistribution<T>,
}

impl<'a, T: Scalar> PokerContext<'a, T> {
    /// Policy mixture induced by the meta-distribution: correlated when the
    /// solver produced a joint distribution, otherwise one mixture per seat.
    pub fn mixture(&self) -> PolicyMixture<'a, T> {
        let pop = self.population;
        let k_players = self.tree.num_players();
        match &self.dist.joint {
            Some(joint) => PolicyMixture::Joint(
                joint
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > T::zero())
                    .map(|(f, &w)| {
                        let seats = (0..k_players)
                            .map(|k| &pop.list(k)[self.meta.strategy_at(f, k)])
                            .collect();
                        (w, seats)
                    })
                    .collect(),
            ),
            None => self.marginal_mixture(),
        }
    }

    /// Independent per-seat mixtures from the marginals.
    pub fn marginal_mixture(&self) -> PolicyMixture<'a, T> {
        let pop = self.population;
        let dist = self.dist;
        PolicyMixture::Factorized(
            (0..self.tree.num_players())
                .map(|k| {
                    dist.marginal(k)
                        .iter()
                        .zip(pop.list(k))
                        .filter(|(w, _)| **w > T::zero())
                        .map(|(&w, p)| (w, p))
                        .collect()
                })
                .collect(),
        )
    }
}

fn contains<T: Scalar>(list: &[BehavioralPolicy<T>], p: &BehavioralPolicy<T>) -> bool {
    list.iter().any(|q| policy_equal(p, q))
}

pub fn expand<T: Scalar>(
    ctx: &PokerContext<'_, T>,
    cfg: &OracleConfig,
) -> Result<OracleOutput<BehavioralPolicy<T>>> {
    cfg.validate()?;
    if ctx.population.mode() != PopulationMode::Multi {
        return Err(Error::UnsupportedConfig(
            "poker runs use one population per seat".into(),
        ));
    }
    let k_players = ctx.tree.num_players();
    let mut diagnostics = Vec::new();
    let mut raw: Vec<Vec<Candidate<BehavioralPolicy<T>>>> = vec![Vec::new(); k_players];
    match cfg.kind {
        OracleKind::Br => {
            let mix = ctx.mixture();
            for (k, cands) in raw.iter_mut().enumerate() {
                let br = best_response(ctx.tree, k, &mix)?;
                cands.push(Candidate {
                    strategy: br.policy,
                    score: br.value.to_f64_lossy(),
                    component: None,
                    source: None,
                });
            }
        }
        OracleKind::RectifiedBr => {
            if k_players != 2 {
                return Err(Error::UnsupportedConfig(
                    "rectified BR needs two players".into(),
                ));
            }
            let thr = T::lit(cfg.rectify_threshold);
            for (k, cands) in raw.iter_mut().enumerate() {
                let opp = 1 - k;
                for (i, &p) in ctx.dist.marginal(k).iter().enumerate() {
                    if p <= thr {
                        continue;
                    }
                    let mut beaten = Vec::new();
                    for (j, &w) in ctx.dist.marginal(opp).iter().enumerate() {
                        let mut prof = [0usize; 2];
                        prof[k] = i;
                        prof[opp] = j;
                        if w > T::zero() && ctx.meta.payoff(k, &prof) >= T::zero() {
                            beaten.push((w, &ctx.population.list(opp)[j]));
                        }
                    }
                    let mass = beaten.iter().fold(T::zero(), |a, (w, _)| a + *w);
                    for (w, _) in &mut beaten {
                        *w /= mass;
                    }
                    if beaten.is_empty() {
                        diagnostics.push(format!(
                            "player {k}: member {i} beats no weighted opponent; skipped"
                        ));
                        continue;
                    }
                    let mut seats = vec![Vec::new(); 2];
                    seats[opp] = beaten;
                    let br = best_response(ctx.tree, k, &PolicyMixture::Factorized(seats))?;
                    cands.push(Candidate {
                        strategy: br.policy,
                        score: br.value.to_f64_lossy(),
                        component: None,
                        source: Some(i),
                    });
                }
            }
        }
        OracleKind::Pbr | OracleKind::PbrNoveltyBound => {
            return Err(Error::UnsupportedConfig(
                "PBR oracles are available for normal-form games only".into(),
            ));
        }
    }
    let lists = raw
        .into_iter()
        .enumerate()
        .map(|(k, c)| finish_list(c, policy_equal, |p| contains(ctx.population.list(k), p)))
        .collect();
    Ok(OracleOutput { lists, diagnostics })
}
