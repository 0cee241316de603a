//! Projected replicator dynamics with explicit Euler steps and a time average.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{MixedProfile, NormalFormGame};
use crate::graph::PopulationMode;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrdConfig {
    pub dt: f64,
    pub iterations: usize,
    /// Exploration: every entry stays at or above `gamma / (n + 1)`.
    pub gamma: f64,
}

impl Default for PrdConfig {
    fn default() -> Self {
        PrdConfig {
            dt: 1e-3,
            iterations: 50_000,
            gamma: 1e-10,
        }
    }
}

impl PrdConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.gamma >= 0.0) || self.iterations == 0 {
            return Err(Error::UnsupportedConfig(
                "PRD needs dt > 0, gamma >= 0 and at least one iteration".into(),
            ));
        }
        Ok(())
    }
}

/// Euclidean projection of `v` onto `{x : Σx = 1, x_i ≥ lower}`.
pub fn project_lower_bounded_simplex<T: Scalar>(v: &[T], lower: T) -> Vec<T> {
    let n = v.len();
    let mass = T::one() - lower * T::from_usize_lossy(n);
    let shifted: Vec<T> = v.iter().map(|&x| x - lower).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - mass) / T::from_usize_lossy(i + 1);
        if u - t > T::zero() {
            theta = t;
        }
    }
    shifted
        .into_iter()
        .map(|x| (x - theta).max(T::zero()) + lower)
        .collect()
}

pub(crate) fn solve_prd<T: Scalar>(
    meta: &NormalFormGame<T>,
    mode: PopulationMode,
    cfg: &PrdConfig,
) -> Result<(Vec<Vec<T>>, usize)> {
    let k_players = meta.num_players();
    let vectors = match mode {
        PopulationMode::Single => 1,
        PopulationMode::Multi => k_players,
    };
    let counts = meta.strategy_counts();
    let dt = T::lit(cfg.dt);
    let lower: Vec<T> = (0..vectors)
        .map(|k| T::lit(cfg.gamma) / T::from_usize_lossy(counts[k] + 1))
        .collect();
    let mut pi: Vec<Vec<T>> = (0..vectors)
        .map(|k| {
            let u = vec![T::one() / T::from_usize_lossy(counts[k]); counts[k]];
            project_lower_bounded_simplex(&u, lower[k])
        })
        .collect();
    let mut total: Vec<Vec<T>> = pi.clone();

    for _ in 0..cfg.iterations {
        let profile = MixedProfile {
            per_player: (0..k_players)
                .map(|k| pi[if vectors == 1 { 0 } else { k }].clone())
                .collect(),
        };
        let mut next = Vec::with_capacity(vectors);
        for k in 0..vectors {
            let fitness = meta.deviation_payoffs(&profile, k)?;
            let avg = pi[k]
                .iter()
                .zip(&fitness)
                .fold(T::zero(), |a, (&p, &f)| a + p * f);
            let stepped: Vec<T> = pi[k]
                .iter()
                .zip(&fitness)
                .map(|(&p, &f)| p + dt * p * (f - avg))
                .collect();
            if stepped.iter().any(|x| !x.is_finite()) {
                return Err(Error::numerical(
                    "PRD produced a non-finite iterate",
                    f64::NAN,
                ));
            }
            next.push(project_lower_bounded_simplex(&stepped, lower[k]));
        }
        pi = next;
        for (t, p) in total.iter_mut().zip(&pi) {
            for (a, &b) in t.iter_mut().zip(p) {
                *a += b;
            }
        }
    }
    let count = T::from_usize_lossy(cfg.iterations + 1);
    let avg = total
        .into_iter()
        .map(|t| t.into_iter().map(|x| x / count).collect())
        .collect();
    Ok((avg, cfg.iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{fixture_game, Fixture};

    #[test]
    fn projection_respects_bounds() {
        let p = project_lower_bounded_simplex(&[0.9f64, 0.3, -0.4], 0.01);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.01 - 1e-12));
        assert!(
            (p[0] - 0.795).abs() < 1e-12 && (p[1] - 0.195).abs() < 1e-12,
            "{p:?}"
        );
        let q = project_lower_bounded_simplex(&[0.2f64, 0.3, 0.5], 0.0);
        assert_eq!(q, vec![0.2, 0.3, 0.5]);
    }

    #[test]
    fn matching_pennies_average_near_equilibrium() {
        let g = fixture_game::<f64>(&Fixture::MatchingPennies).unwrap();
        let (avg, _) = solve_prd(&g, PopulationMode::Multi, &PrdConfig::default()).unwrap();
        for v in &avg {
            assert!((v[0] - 0.5).abs() < 0.05, "{avg:?}");
        }
    }

    #[test]
    fn single_strategy_is_fixed() {
        let g = NormalFormGame::<f64>::new(vec![1, 1], vec![vec![3.0], vec![-1.0]]).unwrap();
        let (avg, _) = solve_prd(&g, PopulationMode::Multi, &PrdConfig::default()).unwrap();
        assert_eq!(avg, vec![vec![1.0], vec![1.0]]);
    }
}
