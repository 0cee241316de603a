//! Helpers shared by the integration tests: independent reference
//! computations and seeded game constructors.

#![allow(dead_code)]

pub mod props;

use std::collections::BTreeSet;

use psro::game::{generate_random_game, NormalFormGame};
use psro::graph::{build_response_graph, PopulationMode, ResponseGraph};
use psro::oracles::nfg::NfgContext;
use psro::oracles::{OracleConfig, OracleKind};
use psro::psro::{run, NfgDomain, Population, PsroConfig, PsroRun};
use psro::seeds::derive_seed;
use psro::solvers::{solve, MetaDistribution, MetaSolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Successor lists of a response graph.
pub fn adjacency(g: &ResponseGraph) -> Vec<Vec<usize>> {
    (0..g.num_nodes())
        .map(|v| g.successors(v).to_vec())
        .collect()
}

/// Nodes reachable from `start` (including `start`).
pub fn reachable(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Sink components by transitive closure: `v` is in a sink iff every node it
/// reaches reaches it back. Sorted node sets, sorted by first node.
pub fn brute_force_sinks(adj: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let n = adj.len();
    let reach: Vec<Vec<bool>> = (0..n).map(|v| reachable(adj, v)).collect();
    let mut out = BTreeSet::new();
    for v in 0..n {
        let closed = (0..n).all(|u| !reach[v][u] || reach[u][v]);
        if closed {
            let comp: Vec<usize> = (0..n).filter(|&u| reach[v][u] && reach[u][v]).collect();
            out.insert(comp);
        }
    }
    out
}

pub fn graph_sinks(g: &ResponseGraph) -> BTreeSet<Vec<usize>> {
    g.sink_components()
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect()
}

/// Random game with seeded shape: K in {2, 3}, 2 to `max_n` strategies.
pub fn random_shaped_game(seed: u64, max_n: usize) -> NormalFormGame<f64> {
    let mut r = rng(seed);
    let k = r.random_range(2..=3);
    let n = r.random_range(2..=max_n);
    generate_random_game(n, k, derive_seed(seed, [1])).unwrap()
}

/// Symmetric two-player game from a row-player matrix: M2(s, t) = M1(t, s).
pub fn symmetric_from(a: &[Vec<f64>]) -> NormalFormGame<f64> {
    let n = a.len();
    let mut m1 = Vec::with_capacity(n * n);
    let mut m2 = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            m1.push(a[i][j]);
            m2.push(a[j][i]);
        }
    }
    NormalFormGame::new(vec![n, n], vec![m1, m2]).unwrap()
}

/// Symmetric two-player game with Gaussian-ish payoffs (general sum).
pub fn random_symmetric(seed: u64, n: usize) -> NormalFormGame<f64> {
    let mut r = rng(seed);
    let a: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| r.random_range(-1.0..1.0)).collect())
        .collect();
    symmetric_from(&a)
}

/// Symmetric zero-sum game: antisymmetric row matrix.
pub fn random_symmetric_zero_sum(seed: u64, n: usize, unit_magnitude: bool) -> NormalFormGame<f64> {
    let mut r = rng(seed);
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x: f64 = if unit_magnitude {
                if r.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            } else {
                let v: f64 = r.random_range(-1.0..1.0);
                if v.abs() < 1e-6 {
                    0.5
                } else {
                    v
                }
            };
            a[i][j] = x;
            a[j][i] = -x;
        }
    }
    symmetric_from(&a)
}

/// Two-player constant-sum game with entries in {0, 1} (M1 + M2 = 1).
pub fn random_win_loss(seed: u64, n: usize) -> NormalFormGame<f64> {
    let mut r = rng(seed);
    let m1: Vec<f64> = (0..n * n)
        .map(|_| if r.random::<bool>() { 1.0 } else { 0.0 })
        .collect();
    let m2: Vec<f64> = m1.iter().map(|x| 1.0 - x).collect();
    NormalFormGame::new(vec![n, n], vec![m1, m2]).unwrap()
}

pub fn alpha_psro(mode: PopulationMode, oracle: OracleKind, max_iterations: usize) -> PsroConfig {
    PsroConfig {
        mode,
        solver: MetaSolverConfig::alpharank_tolerant(),
        oracle: OracleConfig::new(oracle),
        max_iterations,
        metrics: Default::default(),
        record_timings: false,
    }
}

/// Underlying flat indices of every profile spanned by the populations.
pub fn population_profiles(
    game: &NormalFormGame<f64>,
    run: &PsroRun<usize, f64>,
) -> BTreeSet<usize> {
    let lists = run.population.lists();
    let mut out = BTreeSet::new();
    let k = game.num_players();
    let mut idx = vec![0usize; k];
    loop {
        let prof: Vec<usize> = (0..k).map(|p| lists[p][idx[p]]).collect();
        out.insert(game.flat_index(&prof));
        let mut p = k;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < lists[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// True iff the subgraph induced by `nodes` contains a directed cycle.
pub fn induced_has_cycle(adj: &[Vec<usize>], nodes: &BTreeSet<usize>) -> bool {
    let sub: Vec<Vec<usize>> = (0..adj.len())
        .map(|v| {
            if nodes.contains(&v) {
                adj[v]
                    .iter()
                    .copied()
                    .filter(|w| nodes.contains(w))
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    nodes
        .iter()
        .any(|&v| sub[v].iter().any(|&w| reachable(&sub, w)[v]))
}

/// Partial convergence: the populations hold the whole SSCC or a cycle inside it.
pub fn partially_converged(adj: &[Vec<usize>], sscc: &[usize], profiles: &BTreeSet<usize>) -> bool {
    let inside: BTreeSet<usize> = sscc
        .iter()
        .copied()
        .filter(|v| profiles.contains(v))
        .collect();
    inside.len() == sscc.len() || induced_has_cycle(adj, &inside)
}

/// Runs α-PSRO (α-Rank, PBR) from the profile `start` of `game`.
pub fn run_alpha_psro(
    game: &NormalFormGame<f64>,
    start: &[usize],
    oracle: OracleKind,
) -> PsroRun<usize, f64> {
    let domain = NfgDomain::new(game.clone());
    let initial = start.iter().map(|&s| vec![s]).collect();
    run(
        &domain,
        &alpha_psro(PopulationMode::Multi, oracle, 500),
        initial,
    )
    .unwrap()
}

pub fn full_multi_graph(game: &NormalFormGame<f64>) -> ResponseGraph {
    build_response_graph(game, PopulationMode::Multi, 0.0).unwrap()
}

/// A completed population with its α-Rank meta-distribution.
pub struct Setup {
    pub game: NormalFormGame<f64>,
    pub pop: Population<usize, f64>,
    pub meta: NormalFormGame<f64>,
    pub dist: MetaDistribution<f64>,
}

impl Setup {
    pub fn new(game: NormalFormGame<f64>, mode: PopulationMode, lists: Vec<Vec<usize>>) -> Self {
        let mut pop = Population::new(mode, game.num_players(), lists).unwrap();
        pop.complete(|_, p| {
            let prof: Vec<usize> = p.iter().map(|&&s| s).collect();
            Ok(game.payoff_vector(&prof))
        })
        .unwrap();
        let meta = pop.meta_game().unwrap();
        let dist = solve(&meta, mode, &MetaSolverConfig::alpharank_tolerant()).unwrap();
        Setup {
            game,
            pop,
            meta,
            dist,
        }
    }

    pub fn ctx(&self) -> NfgContext<'_, f64> {
        NfgContext {
            game: &self.game,
            population: &self.pop,
            meta: &self.meta,
            dist: &self.dist,
        }
    }
}
