//! Convergence and quality measures.

use crate::error::{Error, Result};
use crate::game::{MixedProfile, NormalFormGame};
use crate::graph::{PopulationMode, ResponseGraph};
use crate::kuhn::{nashconv as kuhn_nashconv, policy_equal, BehavioralPolicy};
use crate::oracles::meta_sink_components;
use crate::oracles::nfg::NfgContext;
use crate::oracles::poker::PokerContext;
use crate::scalar::Scalar;

/// Largest underlying game for which PCS-Score builds the full response graph.
pub const PCS_PROFILE_BUDGET: usize = 5_000_000;

/// Σ_k [best-response payoff − current payoff] under a factorized profile.
pub fn nashconv<T: Scalar>(game: &NormalFormGame<T>, profile: &MixedProfile<T>) -> Result<T> {
    let current = game.expected_payoffs(profile)?;
    let mut total = T::zero();
    for (k, v) in current.into_iter().enumerate() {
        let dev = game.deviation_payoffs(profile, k)?;
        let best = dev.into_iter().fold(T::neg_infinity(), T::max);
        total += best - v;
    }
    Ok(total)
}

/// Meta-distribution marginals placed on the underlying game's strategies.
pub fn lift_profile<T: Scalar>(ctx: &NfgContext<'_, T>) -> MixedProfile<T> {
    let k_players = ctx.game.num_players();
    MixedProfile {
        per_player: (0..k_players)
            .map(|k| {
                let mut v = vec![T::zero(); ctx.game.strategy_counts()[k]];
                for (&s, &p) in ctx.population.list(k).iter().zip(ctx.dist.marginal(k)) {
                    v[s] += p;
                }
                v
            })
            .collect(),
    }
}

/// NashConv of the lifted meta-distribution on the underlying game.
pub fn nfg_nashconv<T: Scalar>(ctx: &NfgContext<'_, T>) -> Result<T> {
    nashconv(ctx.game, &lift_profile(ctx))
}

/// PBR-Score of one pure strategy of the underlying game.
pub fn pbr_score<T: Scalar>(ctx: &NfgContext<'_, T>, player: usize, candidate: usize) -> Result<T> {
    if candidate >= ctx.game.strategy_counts()[player] {
        return Err(Error::invalid(format!(
            "strategy {candidate} out of range for player {player}"
        )));
    }
    Ok(ctx.pbr_scores(player, 0.0)?[candidate])
}

/// Gap between the best PBR-Score over the whole game and the best inside the
/// population, summed over players (one term in single-population mode).
pub fn alpha_conv<T: Scalar>(ctx: &NfgContext<'_, T>) -> Result<T> {
    let lists = match ctx.population.mode() {
        PopulationMode::Single => 1,
        PopulationMode::Multi => ctx.game.num_players(),
    };
    let mut total = T::zero();
    for k in 0..lists {
        let scores = ctx.pbr_scores(k, 0.0)?;
        let global = scores.iter().copied().fold(T::neg_infinity(), T::max);
        let inside = ctx
            .population
            .list(k)
            .iter()
            .map(|&s| scores[s])
            .fold(T::neg_infinity(), T::max);
        total += global - inside;
    }
    Ok(total)
}

/// Response graph of the full game, refusing games above the profile budget.
pub fn full_game_graph<T: Scalar>(
    game: &NormalFormGame<T>,
    mode: PopulationMode,
) -> Result<ResponseGraph> {
    if game.num_profiles() > PCS_PROFILE_BUDGET {
        return Err(Error::UnsupportedGame(format!(
            "{} profiles exceed the PCS-Score budget of {PCS_PROFILE_BUDGET}",
            game.num_profiles()
        )));
    }
    crate::graph::build_response_graph(game, mode, T::zero())
}

/// Fraction of meta-SSCC profiles (counted once each) that lie in a sink
/// component of the full game.
pub fn pcs_score<T: Scalar>(ctx: &NfgContext<'_, T>, full: &ResponseGraph) -> Result<f64> {
    let mut nodes: Vec<usize> = meta_sink_components(ctx.meta, ctx.dist)?
        .into_iter()
        .flatten()
        .map(|v| match ctx.population.mode() {
            PopulationMode::Single => ctx.population.list(0)[v],
            PopulationMode::Multi => ctx.underlying_flat(v),
        })
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.is_empty() {
        return Err(Error::invalid("meta-game has no sink component"));
    }
    let inside = nodes.iter().filter(|&&v| full.is_in_sink(v)).count();
    Ok(inside as f64 / nodes.len() as f64)
}

/// Exact NashConv of the policy mixture given by the meta-distribution marginals.
pub fn poker_nashconv<T: Scalar>(ctx: &PokerContext<'_, T>) -> Result<T> {
    kuhn_nashconv(ctx.tree, &ctx.marginal_mixture())
}

/// Pairwise-distinct policies per list.
pub fn diversity<T: Scalar>(lists: &[Vec<BehavioralPolicy<T>>]) -> Vec<usize> {
    lists
        .iter()
        .map(|list| {
            let mut unique: Vec<&BehavioralPolicy<T>> = Vec::new();
            for p in list {
                if !unique.iter().any(|q| policy_equal(p, q)) {
                    unique.push(p);
                }
            }
            unique.len()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{fixture_game, Fixture};

    #[test]
    fn matching_pennies_nashconv() {
        let g = fixture_game::<f64>(&Fixture::MatchingPennies).unwrap();
        let eq = MixedProfile::uniform(g.strategy_counts());
        assert!(nashconv(&g, &eq).unwrap().abs() < 1e-15);
        let pure = MixedProfile::pure(g.strategy_counts(), &[0, 0]);
        assert!((nashconv(&g, &pure).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn diversity_counts_unique() {
        let tree = crate::kuhn::KuhnPoker::new(2).unwrap();
        let u = BehavioralPolicy::<f64>::uniform(&tree, 0);
        let r = BehavioralPolicy::<f64>::random(&tree, 0, 3);
        assert_eq!(diversity(&[vec![u.clone(), u.clone(), u.clone()]]), vec![1]);
        assert_eq!(diversity(&[vec![u, r]]), vec![2]);
    }
}
