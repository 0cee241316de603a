//! Seeded property checks used by the focused tests and by the acceptance
//! run. Each returns `Ok(summary)` or `Err(first violation)`.

#![allow(dead_code)]

use std::collections::BTreeSet;

use psro::game::{fixture_game, Fixture, NormalFormGame};
use psro::graph::{
    alpharank, build_response_graph, stationary_distribution, transition_matrix, AlphaPolicy,
    AlphaRankConfig, PopulationMode, StationaryMethod,
};
use psro::oracles::nfg::{argmax_set, NfgContext};
use psro::oracles::OracleKind;
use psro::psro::{run, NfgDomain, Population};
use psro::seeds::derive_seed;
use psro::solvers::{all_equilibria, MetaDistribution};
use rand::Rng;

use super::*;

type Check = Result<String, String>;

/// Rows of C, πC = π and sink sets on `count` random games (K ≤ 3, |S^k| ≤ 8).
pub fn markov_properties(count: usize) -> Check {
    let alphas = [0.5, 5.0, 50.0];
    let mut worst_row = 0.0f64;
    let mut worst_res = 0.0f64;
    for i in 0..count as u64 {
        let game = random_shaped_game(derive_seed(300, [i]), 8);
        let alpha = alphas[i as usize % alphas.len()];
        let chain = transition_matrix(&game, PopulationMode::Multi, alpha, 50)
            .map_err(|e| e.to_string())?;
        let candidates: usize = game.strategy_counts().iter().map(|n| n - 1).sum();
        for v in 0..chain.num_nodes() {
            let err = (chain.row_sum(v) - 1.0).abs();
            worst_row = worst_row.max(err);
            if err > 1e-12 {
                return Err(format!("game {i}: row {v} sums to 1{err:+e}"));
            }
            let off = chain.row(v).filter(|&(w, _)| w != v).count();
            if off > candidates || chain.row(v).any(|(_, p)| !(0.0..=1.0).contains(&p)) {
                return Err(format!(
                    "game {i}: row {v} has {off} off-diagonal entries or an entry outside [0,1]"
                ));
            }
        }
        let st = stationary_distribution(&chain, StationaryMethod::default(), None)
            .map_err(|e| e.to_string())?;
        worst_res = worst_res.max(st.residual);
        if st.residual > 1e-10 {
            return Err(format!("game {i}: ‖πC − π‖₁ = {:e}", st.residual));
        }
        let graph = full_multi_graph(&game);
        if graph_sinks(&graph) != brute_force_sinks(&adjacency(&graph)) {
            return Err(format!(
                "game {i}: sink components differ from the reachability oracle"
            ));
        }
    }
    Ok(format!(
        "{count} games, max row error {worst_row:.1e}, max residual {worst_res:.1e}"
    ))
}

/// Starting inside an SSCC, α-PSRO ends holding that SSCC or a cycle of it.
pub fn partial_convergence(count: usize) -> Check {
    for i in 0..count as u64 {
        let seed = derive_seed(3, [i]);
        let game = random_shaped_game(seed, 8);
        let graph = full_multi_graph(&game);
        let sinks = graph.sink_components();
        let mut r = rng(seed);
        let sscc = &sinks[r.random_range(0..sinks.len())];
        let start = game.profile_of(sscc[r.random_range(0..sscc.len())]);
        let res = run_alpha_psro(&game, &start, OracleKind::Pbr);
        if !res.trace.converged {
            return Err(format!("game {i}: α-PSRO did not terminate"));
        }
        let profiles = population_profiles(&game, &res);
        if !partially_converged(&adjacency(&graph), sscc, &profiles) {
            return Err(format!(
                "game {i}: population holds no cycle of the starting SSCC"
            ));
        }
    }
    Ok(format!("{count} games"))
}

/// With the novelty-bound oracle some SSCC ends up fully inside.
pub fn novelty_bound_containment(count: usize) -> Check {
    for i in 0..count as u64 {
        let seed = derive_seed(4, [i]);
        let game = random_shaped_game(seed, 8);
        let graph = full_multi_graph(&game);
        let domain = NfgDomain::new(game.clone());
        let initial = domain.random_initial(PopulationMode::Multi, derive_seed(seed, [2]));
        let start: Vec<usize> = initial.iter().map(|l| l[0]).collect();
        let res = run_alpha_psro(&game, &start, OracleKind::PbrNoveltyBound);
        if !res.trace.converged {
            return Err(format!("game {i}: α-PSRO did not terminate"));
        }
        let profiles = population_profiles(&game, &res);
        if !graph
            .sink_components()
            .iter()
            .any(|c| c.iter().all(|v| profiles.contains(v)))
        {
            return Err(format!("game {i}: no SSCC fully contained"));
        }
    }
    Ok(format!("{count} games"))
}

/// Single-population α-PSRO reaches the unique SSCC of a symmetric game.
pub fn single_population_sscc(count: usize) -> Check {
    for i in 0..count as u64 {
        let seed = derive_seed(5, [i]);
        let n = rng(seed).random_range(2..=8);
        let game = random_symmetric(seed, n);
        let graph =
            build_response_graph(&game, PopulationMode::Single, 0.0).map_err(|e| e.to_string())?;
        let sinks = graph.sink_components();
        if sinks.len() != 1 {
            return Err(format!(
                "game {i}: {} sink components in a tournament",
                sinks.len()
            ));
        }
        let domain = NfgDomain::new(game.clone());
        let initial = domain.random_initial(PopulationMode::Single, derive_seed(seed, [2]));
        let res = run(
            &domain,
            &alpha_psro(PopulationMode::Single, OracleKind::Pbr, 200),
            initial,
        )
        .map_err(|e| e.to_string())?;
        if !res.trace.converged {
            return Err(format!("game {i}: did not terminate"));
        }
        if !res.population.list(0).iter().any(|s| sinks[0].contains(s)) {
            return Err(format!("game {i}: population misses the SSCC"));
        }
    }
    Ok(format!("{count} games"))
}

/// Witness that multi-population α-PSRO on the snowflake game stalls outside its SSCC.
pub fn snowflake_stall() -> Check {
    let game: NormalFormGame<f64> =
        fixture_game(&Fixture::Snowflake3p).map_err(|e| e.to_string())?;
    let graph = full_multi_graph(&game);
    let res = run_alpha_psro(&game, &[1, 0, 0], OracleKind::Pbr);
    let profiles = population_profiles(&game, &res);
    let hit = graph
        .sink_components()
        .iter()
        .flatten()
        .any(|v| profiles.contains(v));
    if !res.trace.converged || hit {
        return Err("snowflake run reached the SSCC or did not terminate".into());
    }
    Ok("snowflake terminates outside the SSCC".into())
}

/// PBR and BR argmax sets for player 0 against a single-population mixture.
fn single_pop_argmaxes(
    game: &NormalFormGame<f64>,
    members: Vec<usize>,
    pi: Vec<f64>,
) -> (Vec<usize>, Vec<usize>) {
    let mut pop = Population::<usize, f64>::new(PopulationMode::Single, 2, vec![members]).unwrap();
    pop.complete(|_, p| Ok(game.payoff_vector(&[*p[0], *p[1]])))
        .unwrap();
    let meta = pop.meta_game().unwrap();
    let dist = MetaDistribution {
        mode: PopulationMode::Single,
        marginals: vec![pi],
        joint: None,
        sink_components: Vec::new(),
        diagnostics: Default::default(),
    };
    let ctx = NfgContext {
        game,
        population: &pop,
        meta: &meta,
        dist: &dist,
    };
    let br = argmax_set(&ctx.best_response_values(0));
    let pbr = argmax_set(&ctx.pbr_scores(0, 0.0).unwrap());
    (br, pbr)
}

/// Random population of distinct strategies with a random distribution
/// (some weights may be zero).
fn random_population(r: &mut impl Rng, n: usize) -> (Vec<usize>, Vec<f64>) {
    let size = r.random_range(1..=n);
    let mut all: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        all.swap(i, r.random_range(0..=i));
    }
    let members = all[..size].to_vec();
    let mut w: Vec<f64> = (0..size)
        .map(|_| {
            if r.random_bool(0.2) {
                0.0
            } else {
                r.random::<f64>()
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let total: f64 = w.iter().sum();
    (members, w.into_iter().map(|x| x / total).collect())
}

fn compatible(br: &[usize], pbr: &[usize]) -> bool {
    br.iter().all(|s| pbr.contains(s))
}

/// BR maximizers are PBR maximizers in two-player win-loss games.
pub fn win_loss_compatibility(count: usize) -> Check {
    for i in 0..count as u64 {
        let mut r = rng(derive_seed(7, [i]));
        let n = r.random_range(2..=10);
        let game = random_win_loss(r.random(), n);
        assert!(game.is_win_loss());
        let (members, pi) = random_population(&mut r, n);
        let (br, pbr) = single_pop_argmaxes(&game, members, pi);
        if !compatible(&br, &pbr) {
            return Err(format!(
                "game {i}: BR argmax {br:?} not inside PBR argmax {pbr:?}"
            ));
        }
    }
    Ok(format!("{count} games"))
}

/// Monotonic game M1(s, ν) = σ(f(s) − f(ν)).
pub fn monotonic_game(f: &[f64], sigma: impl Fn(f64) -> f64) -> NormalFormGame<f64> {
    let a: Vec<Vec<f64>> = f
        .iter()
        .map(|&x| f.iter().map(|&y| sigma(x - y)).collect())
        .collect();
    symmetric_from(&a)
}

/// BR maximizers are PBR maximizers in monotonic games with strictly increasing σ.
pub fn monotonic_compatibility(count: usize) -> Check {
    for i in 0..count as u64 {
        let mut r = rng(derive_seed(8, [i]));
        let n = r.random_range(2..=10);
        let f: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let (a, b, c, d): (f64, f64, f64, f64) = (
            r.random_range(0.1..2.0),
            r.random_range(0.0..2.0),
            r.random_range(0.1..5.0),
            r.random_range(0.0..1.0),
        );
        let game = monotonic_game(&f, |x| a * x + b * (c * x).tanh() + d * x * x * x);
        let (members, pi) = random_population(&mut r, n);
        let (br, pbr) = single_pop_argmaxes(&game, members, pi);
        if !compatible(&br, &pbr) {
            return Err(format!(
                "game {i}: BR argmax {br:?} not inside PBR argmax {pbr:?}"
            ));
        }
    }
    Ok(format!("{count} games"))
}

pub fn flat_sigma_counterexample() -> (Vec<usize>, Vec<usize>) {
    let game = monotonic_game(&[1.0, 0.6, 0.2], |x| if x >= -0.5 { 1.0 } else { 0.0 });
    single_pop_argmaxes(&game, vec![2], vec![1.0])
}

fn support(x: &[f64]) -> BTreeSet<usize> {
    (0..x.len()).filter(|&i| x[i] > 1e-9).collect()
}

/// Equilibrium supports against the α-Rank support on symmetric zero-sum
/// games with |S| ≤ 5: with equal magnitudes every equilibrium lies inside,
/// otherwise at least one does.
pub fn equilibria_inside_alpharank(count: usize) -> Check {
    let cfg = AlphaRankConfig::default();
    // Near-tied payoffs need a larger α before the ranking settles.
    let wide = AlphaRankConfig {
        alpha: AlphaPolicy::Sweep {
            min: 1e-2,
            max: 1e9,
            points: 45,
        },
        ..AlphaRankConfig::default()
    };
    let mut widened = 0;
    for i in 0..count as u64 {
        let seed = derive_seed(10, [i]);
        let n = rng(seed).random_range(2..=5);
        for unit in [true, false] {
            let game = random_symmetric_zero_sum(seed, n, unit);
            let ar = match alpharank(&game, PopulationMode::Single, &cfg) {
                Ok(ar) => ar,
                Err(psro::Error::NumericalFailure { .. }) => {
                    widened += 1;
                    alpharank(&game, PopulationMode::Single, &wide)
                        .map_err(|e| format!("game {i}: {e}"))?
                }
                Err(e) => return Err(format!("game {i}: {e}")),
            };
            let ar_support: BTreeSet<usize> = ar.support.iter().copied().collect();
            let eqs = all_equilibria(&game, n).map_err(|e| e.to_string())?;
            if eqs.is_empty() {
                return Err(format!(
                    "game {i}: support enumeration found no equilibrium"
                ));
            }
            let inside = |e: &psro::solvers::BimatrixEquilibrium<f64>| {
                support(&e.row).is_subset(&ar_support) && support(&e.col).is_subset(&ar_support)
            };
            if unit && !eqs.iter().all(inside) {
                return Err(format!(
                    "game {i}: an equilibrium leaves the α-Rank support {ar_support:?}"
                ));
            }
            if !unit && !eqs.iter().any(inside) {
                return Err(format!(
                    "game {i}: no equilibrium inside the α-Rank support {ar_support:?}"
                ));
            }
        }
    }
    Ok(format!(
        "{count} games per variant, {widened} on the widened α grid"
    ))
}
