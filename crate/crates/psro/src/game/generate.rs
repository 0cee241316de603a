//! Seeded random-game generators with a fixed draw order.
//!
//! Draws are consumed player-major, then in row-major (action-lexicographic)
//! order, from a ChaCha8 stream. The transitive component reads stream 0 of the
//! seed and the cyclic component reads stream 1, so a random game with seed `s`
//! equals `generate_transitive(s) + generate_cyclic(s)` entry by entry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::NormalFormGame;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const TRANSITIVE_STREAM: u64 = 0;
const CYCLIC_STREAM: u64 = 1;

/// Parameters of the transitive component.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitiveParams {
    pub mean_values: Vec<f64>,
    pub mean_probs: Vec<f64>,
    /// Variance of the Gaussian draws.
    pub var: f64,
}

impl Default for TransitiveParams {
    fn default() -> Self {
        TransitiveParams {
            mean_values: vec![0.0, 1.0],
            mean_probs: vec![0.5, 0.5],
            var: 0.1,
        }
    }
}

pub const DEFAULT_CYCLIC_VAR: f64 = 0.4;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal(std: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, std).map_err(|e| Error::invalid(format!("bad variance: {e}")))
}

fn check_shape(strategy_count: usize, num_players: usize) -> Result<usize> {
    if strategy_count == 0 || num_players == 0 {
        return Err(Error::invalid(
            "strategy count and player count must be positive",
        ));
    }
    (0..num_players)
        .try_fold(1usize, |acc, _| acc.checked_mul(strategy_count))
        .ok_or_else(|| Error::invalid("game too large"))
}

/// Per-player, per-action fitness values `f_k[a]`.
fn transitive_fitness(
    strategy_count: usize,
    num_players: usize,
    params: &TransitiveParams,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if params.mean_values.is_empty() || params.mean_values.len() != params.mean_probs.len() {
        return Err(Error::invalid(
            "mean_values and mean_probs must have the same nonzero length",
        ));
    }
    let total: f64 = params.mean_probs.iter().sum();
    if params.mean_probs.iter().any(|&p| !(p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("mean_probs must be a probability vector"));
    }
    if !(params.var > 0.0) {
        return Err(Error::invalid("variance must be positive"));
    }
    let noise = normal(params.var.sqrt())?;
    let mut rng = rng_for(seed, TRANSITIVE_STREAM);
    let mut f = vec![vec![0.0; strategy_count]; num_players];
    for fk in f.iter_mut() {
        for fa in fk.iter_mut() {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut mu = *params.mean_values.last().unwrap();
            for (&m, &p) in params.mean_values.iter().zip(&params.mean_probs) {
                acc += p;
                if u < acc {
                    mu = m;
                    break;
                }
            }
            *fa = mu + noise.sample(&mut rng);
        }
    }
    Ok(f)
}

/// Adds the transitive payoff `f_k[a^k] − mean_{i≠k} f_i[a^i]` into `tensors`.
fn add_transitive(tensors: &mut [Vec<f64>], f: &[Vec<f64>], strategy_count: usize) {
    let k_players = f.len();
    let inv = 1.0 / (k_players as f64 - 1.0);
    let size = tensors[0].len();
    let mut idx = vec![0usize; k_players];
    let counts = vec![strategy_count; k_players];
    for flat in 0..size {
        let total: f64 = (0..k_players).map(|i| f[i][idx[i]]).sum();
        for k in 0..k_players {
            let own = f[k][idx[k]];
            tensors[k][flat] += own - (total - own) * inv;
        }
        super::increment(&mut idx, &counts);
    }
}

fn cyclic_tensors(
    strategy_count: usize,
    num_players: usize,
    var: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if !(var > 0.0) {
        return Err(Error::invalid("variance must be positive"));
    }
    let size = check_shape(strategy_count, num_players)?;
    let noise = normal(var.sqrt())?;
    let mut rng = rng_for(seed, CYCLIC_STREAM);
    let mut tensors = Vec::with_capacity(num_players);
    for _ in 0..num_players {
        let t: Vec<f64> = (0..size).map(|_| noise.sample(&mut rng)).collect();
        tensors.push(t);
    }
    // Center every own-action slice over the opponents' actions.
    let n = strategy_count;
    for (k, t) in tensors.iter_mut().enumerate() {
        let stride = n.pow((num_players - 1 - k) as u32);
        let slice_len = (size / n) as f64;
        let mut sums = vec![0.0; n];
        for (flat, &x) in t.iter().enumerate() {
            sums[(flat / stride) % n] += x;
        }
        for (flat, x) in t.iter_mut().enumerate() {
            *x -= sums[(flat / stride) % n] / slice_len;
        }
    }
    Ok(tensors)
}

fn to_game<T: Scalar>(
    strategy_count: usize,
    num_players: usize,
    tensors: Vec<Vec<f64>>,
) -> Result<NormalFormGame<T>> {
    let payoffs = tensors
        .into_iter()
        .map(|t| t.into_iter().map(T::lit).collect())
        .collect();
    NormalFormGame::new(vec![strategy_count; num_players], payoffs)
}

/// Transitive game: each player's payoff is its own fitness minus the mean
/// fitness of the others. Exactly zero-sum.
pub fn generate_transitive<T: Scalar>(
    strategy_count: usize,
    num_players: usize,
    params: &TransitiveParams,
    seed: u64,
) -> Result<NormalFormGame<T>> {
    let size = check_shape(strategy_count, num_players)?;
    if num_players < 2 {
        return Err(Error::invalid(
            "the transitive generator needs at least two players",
        ));
    }
    let f = transitive_fitness(strategy_count, num_players, params, seed)?;
    let mut tensors = vec![vec![0.0; size]; num_players];
    add_transitive(&mut tensors, &f, strategy_count);
    to_game(strategy_count, num_players, tensors)
}

/// Cyclic game: Gaussian tensors centered on every own-action slice.
pub fn generate_cyclic<T: Scalar>(
    strategy_count: usize,
    num_players: usize,
    var: f64,
    seed: u64,
) -> Result<NormalFormGame<T>> {
    let tensors = cyclic_tensors(strategy_count, num_players, var, seed)?;
    to_game(strategy_count, num_players, tensors)
}

/// Sum of the default transitive and cyclic components drawn from one seed.
pub fn generate_random_game<T: Scalar>(
    strategy_count: usize,
    num_players: usize,
    seed: u64,
) -> Result<NormalFormGame<T>> {
    if num_players < 2 {
        return Err(Error::invalid("random games need at least two players"));
    }
    let mut tensors = cyclic_tensors(strategy_count, num_players, DEFAULT_CYCLIC_VAR, seed)?;
    let f = transitive_fitness(
        strategy_count,
        num_players,
        &TransitiveParams::default(),
        seed,
    )?;
    add_transitive(&mut tensors, &f, strategy_count);
    to_game(strategy_count, num_players, tensors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitive_is_zero_sum() {
        for seed in 0..20 {
            for k in 2..=4 {
                let g: NormalFormGame<f64> =
                    generate_transitive(4, k, &TransitiveParams::default(), seed).unwrap();
                for flat in 0..g.num_profiles() {
                    let s: f64 = (0..k).map(|p| g.payoff_flat(p, flat)).sum();
                    assert!(s.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn transitive_is_deterministic() {
        let p = TransitiveParams::default();
        let a: NormalFormGame<f64> = generate_transitive(3, 2, &p, 7).unwrap();
        let b: NormalFormGame<f64> = generate_transitive(3, 2, &p, 7).unwrap();
        let c: NormalFormGame<f64> = generate_transitive(3, 2, &p, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn transitive_degenerate_limit_is_zero() {
        let p = TransitiveParams {
            mean_values: vec![1.0],
            mean_probs: vec![1.0],
            var: 1e-30,
        };
        let g: NormalFormGame<f64> = generate_transitive(3, 2, &p, 1).unwrap();
        assert!(g
            .tensor(0)
            .iter()
            .chain(g.tensor(1))
            .all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn transitive_rejects_bad_probabilities() {
        let p = TransitiveParams {
            mean_values: vec![0.0, 1.0],
            mean_probs: vec![0.7, 0.7],
            var: 0.1,
        };
        assert!(generate_transitive::<f64>(3, 2, &p, 1).is_err());
    }

    #[test]
    fn cyclic_slices_are_centered() {
        for seed in 0..10 {
            for k in 1..=3 {
                let g: NormalFormGame<f64> = generate_cyclic(4, k, 0.4, seed).unwrap();
                for p in 0..k {
                    let mut sums = vec![0.0; 4];
                    for flat in 0..g.num_profiles() {
                        sums[g.strategy_at(flat, p)] += g.payoff_flat(p, flat);
                    }
                    assert!(sums.iter().all(|s| s.abs() < 1e-9), "{sums:?}");
                }
            }
        }
    }

    #[test]
    fn cyclic_single_player_is_zero() {
        let g: NormalFormGame<f64> = generate_cyclic(5, 1, 0.4, 3).unwrap();
        assert!(g.tensor(0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn random_game_decomposes() {
        let t: NormalFormGame<f64> =
            generate_transitive(3, 3, &TransitiveParams::default(), 11).unwrap();
        let c: NormalFormGame<f64> = generate_cyclic(3, 3, DEFAULT_CYCLIC_VAR, 11).unwrap();
        let r: NormalFormGame<f64> = generate_random_game(3, 3, 11).unwrap();
        for k in 0..3 {
            for flat in 0..27 {
                let expect = t.payoff_flat(k, flat) + c.payoff_flat(k, flat);
                assert!((r.payoff_flat(k, flat) - expect).abs() < 1e-12);
            }
        }
    }
}
