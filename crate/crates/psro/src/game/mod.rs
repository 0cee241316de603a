//! Normal-form games: dense payoff tensors, mixed profiles and structural predicates.

mod fixtures;
mod generate;
mod io;

pub use fixtures::{fixture_game, Fixture};
pub use generate::{generate_cyclic, generate_random_game, generate_transitive, TransitiveParams};
pub use io::GameFile;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A K-player game in normal form with one dense payoff tensor per player.
///
/// Tensors are stored row-major: the last player's strategy index varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormGame<T> {
    counts: Vec<usize>,
    strides: Vec<usize>,
    payoffs: Vec<Vec<T>>,
    labels: Option<Vec<Vec<String>>>,
}

/// Computed structural flags of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameFlags {
    pub symmetric: bool,
    pub zero_sum: bool,
    pub win_loss: bool,
}

/// Factorized mixed strategy profile: one distribution per player.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile<T> {
    pub per_player: Vec<Vec<T>>,
}

impl<T: Scalar> MixedProfile<T> {
    pub fn new(per_player: Vec<Vec<T>>) -> Result<Self> {
        for (k, v) in per_player.iter().enumerate() {
            check_distribution(v, T::lit(1e-12))
                .map_err(|e| Error::invalid(format!("player {k}: {e}")))?;
        }
        Ok(MixedProfile { per_player })
    }

    pub fn uniform(counts: &[usize]) -> Self {
        let per_player = counts
            .iter()
            .map(|&n| vec![T::one() / T::from_usize_lossy(n); n])
            .collect();
        MixedProfile { per_player }
    }

    pub fn pure(counts: &[usize], profile: &[usize]) -> Self {
        let per_player = counts
            .iter()
            .zip(profile)
            .map(|(&n, &s)| {
                let mut v = vec![T::zero(); n];
                v[s] = T::one();
                v
            })
            .collect();
        MixedProfile { per_player }
    }
}

pub(crate) fn check_distribution<T: Scalar>(v: &[T], tol: T) -> std::result::Result<(), String> {
    if v.is_empty() {
        return Err("empty distribution".into());
    }
    if v.iter().any(|x| !x.is_finite() || *x < T::zero()) {
        return Err("entries must be finite and nonnegative".into());
    }
    let total = crate::scalar::sum(v);
    if (total - T::one()).abs() > tol {
        return Err(format!("entries sum to {total}, expected 1"));
    }
    Ok(())
}

impl<T: Scalar> NormalFormGame<T> {
    /// Builds a game from per-player flat payoff tensors.
    pub fn new(counts: Vec<usize>, payoffs: Vec<Vec<T>>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("a game needs at least one player"));
        }
        if counts.contains(&0) {
            return Err(Error::invalid("every player needs at least one strategy"));
        }
        if payoffs.len() != counts.len() {
            return Err(Error::invalid(format!(
                "{} payoff tensors for {} players",
                payoffs.len(),
                counts.len()
            )));
        }
        let size = counts
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::invalid("profile count overflows"))?;
        for (k, t) in payoffs.iter().enumerate() {
            if t.len() != size {
                return Err(Error::invalid(format!(
                    "payoff tensor {k} has {} entries, expected {size}",
                    t.len()
                )));
            }
            if t.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!(
                    "payoff tensor {k} has a non-finite entry"
                )));
            }
        }
        let mut strides = vec![1usize; counts.len()];
        for k in (0..counts.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * counts[k + 1];
        }
        Ok(NormalFormGame {
            counts,
            strides,
            payoffs,
            labels: None,
        })
    }

    /// Attaches human-readable strategy labels, one list per player.
    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.counts.len()
            || labels.iter().zip(&self.counts).any(|(l, &n)| l.len() != n)
        {
            return Err(Error::invalid("label shape does not match strategy counts"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn num_players(&self) -> usize {
        self.counts.len()
    }

    pub fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs[0].len()
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Flat tensor of player `k`.
    pub fn tensor(&self, k: usize) -> &[T] {
        &self.payoffs[k]
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    pub fn strategy_label(&self, player: usize, s: usize) -> String {
        match &self.labels {
            Some(l) => l[player][s].clone(),
            None => s.to_string(),
        }
    }

    pub fn flat_index(&self, profile: &[usize]) -> usize {
        debug_assert_eq!(profile.len(), self.counts.len());
        profile
            .iter()
            .zip(&self.strides)
            .map(|(&s, &st)| s * st)
            .sum()
    }

    pub fn checked_flat_index(&self, profile: &[usize]) -> Result<usize> {
        if profile.len() != self.counts.len() {
            return Err(Error::invalid(format!(
                "profile has {} entries for {} players",
                profile.len(),
                self.counts.len()
            )));
        }
        for (k, (&s, &n)) in profile.iter().zip(&self.counts).enumerate() {
            if s >= n {
                return Err(Error::invalid(format!(
                    "strategy {s} out of range for player {k}"
                )));
            }
        }
        Ok(self.flat_index(profile))
    }

    pub fn profile_of(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.counts.len()];
        for k in 0..self.counts.len() {
            out[k] = flat / self.strides[k];
            flat %= self.strides[k];
        }
        out
    }

    /// Strategy of player `k` in the profile with flat index `flat`.
    pub fn strategy_at(&self, flat: usize, k: usize) -> usize {
        (flat / self.strides[k]) % self.counts[k]
    }

    /// Flat index of the profile obtained by switching player `k` to `sigma`.
    pub fn deviate(&self, flat: usize, k: usize, sigma: usize) -> usize {
        let cur = self.strategy_at(flat, k);
        flat + sigma * self.strides[k] - cur * self.strides[k]
    }

    pub fn payoff(&self, player: usize, profile: &[usize]) -> T {
        self.payoffs[player][self.flat_index(profile)]
    }

    pub fn payoff_flat(&self, player: usize, flat: usize) -> T {
        self.payoffs[player][flat]
    }

    pub fn payoff_vector(&self, profile: &[usize]) -> Vec<T> {
        let i = self.flat_index(profile);
        self.payoffs.iter().map(|t| t[i]).collect()
    }

    fn check_profile(&self, profile: &MixedProfile<T>) -> Result<()> {
        if profile.per_player.len() != self.counts.len()
            || profile
                .per_player
                .iter()
                .zip(&self.counts)
                .any(|(v, &n)| v.len() != n)
        {
            return Err(Error::invalid(
                "mixed profile dimensions do not match the game",
            ));
        }
        Ok(())
    }

    /// Expected payoff of every player under a factorized mixed profile.
    pub fn expected_payoffs(&self, profile: &MixedProfile<T>) -> Result<Vec<T>> {
        self.check_profile(profile)?;
        let k_players = self.counts.len();
        let mut out = vec![T::zero(); k_players];
        for flat in 0..self.num_profiles() {
            let mut w = T::one();
            for k in 0..k_players {
                w *= profile.per_player[k][self.strategy_at(flat, k)];
                if w == T::zero() {
                    break;
                }
            }
            if w == T::zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o += w * self.payoffs[k][flat];
            }
        }
        Ok(out)
    }

    /// `M^k(σ, π^{-k})` for every pure strategy σ of `player`.
    pub fn deviation_payoffs(&self, profile: &MixedProfile<T>, player: usize) -> Result<Vec<T>> {
        self.check_profile(profile)?;
        let mut out = vec![T::zero(); self.counts[player]];
        for flat in 0..self.num_profiles() {
            let mut w = T::one();
            for k in 0..self.counts.len() {
                if k != player {
                    w *= profile.per_player[k][self.strategy_at(flat, k)];
                }
            }
            if w != T::zero() {
                out[self.strategy_at(flat, player)] += w * self.payoffs[player][flat];
            }
        }
        Ok(out)
    }

    /// Restriction of the game to the given strategy subsets (in the given order).
    pub fn restrict(&self, subsets: &[Vec<usize>]) -> Result<NormalFormGame<T>> {
        if subsets.len() != self.counts.len() {
            return Err(Error::invalid("one subset per player required"));
        }
        for (k, s) in subsets.iter().enumerate() {
            if s.is_empty() || s.iter().any(|&i| i >= self.counts[k]) {
                return Err(Error::invalid(format!("bad subset for player {k}")));
            }
        }
        let counts: Vec<usize> = subsets.iter().map(Vec::len).collect();
        let size: usize = counts.iter().product();
        let mut payoffs = vec![Vec::with_capacity(size); self.counts.len()];
        let mut idx = vec![0usize; counts.len()];
        let mut full = vec![0usize; counts.len()];
        for _ in 0..size {
            for k in 0..counts.len() {
                full[k] = subsets[k][idx[k]];
            }
            let f = self.flat_index(&full);
            for (k, p) in payoffs.iter_mut().enumerate() {
                p.push(self.payoffs[k][f]);
            }
            increment(&mut idx, &counts);
        }
        let game = NormalFormGame::new(counts, payoffs)?;
        match &self.labels {
            Some(l) => {
                let labels = subsets
                    .iter()
                    .enumerate()
                    .map(|(k, s)| s.iter().map(|&i| l[k][i].clone()).collect())
                    .collect();
                game.with_labels(labels)
            }
            None => Ok(game),
        }
    }

    /// True iff every profile's payoffs sum to zero within 1e-9.
    pub fn is_zero_sum(&self) -> bool {
        let tol = T::lit(1e-9);
        (0..self.num_profiles()).all(|f| {
            let s = self.payoffs.iter().fold(T::zero(), |acc, t| acc + t[f]);
            s.abs() <= tol
        })
    }

    /// True iff payoffs are invariant under every permutation of the players.
    ///
    /// Invariance is checked on the two generators of the symmetric group (a swap
    /// of the first two players and the full rotation), which suffices.
    pub fn is_symmetric(&self) -> bool {
        let k_players = self.counts.len();
        if self.counts.iter().any(|&n| n != self.counts[0]) {
            return false;
        }
        if k_players == 1 {
            return true;
        }
        let swap: Vec<usize> = (0..k_players)
            .map(|k| match k {
                0 => 1,
                1 => 0,
                _ => k,
            })
            .collect();
        let rotate: Vec<usize> = (0..k_players).map(|k| (k + 1) % k_players).collect();
        self.invariant_under(&swap) && (k_players == 2 || self.invariant_under(&rotate))
    }

    /// Checks `M^{ρ(k)}(s') = M^k(s)` where `s'^{ρ(k)} = s^k`.
    fn invariant_under(&self, rho: &[usize]) -> bool {
        let k_players = self.counts.len();
        let mut permuted = vec![0usize; k_players];
        for flat in 0..self.num_profiles() {
            let s = self.profile_of(flat);
            for k in 0..k_players {
                permuted[rho[k]] = s[k];
            }
            let g = self.flat_index(&permuted);
            for k in 0..k_players {
                if self.payoffs[rho[k]][g] != self.payoffs[k][flat] {
                    return false;
                }
            }
        }
        true
    }

    /// Two-player constant-sum game with all payoffs in {0, 1} summing to 1.
    ///
    /// Always false for K ≠ 2.
    pub fn is_win_loss(&self) -> bool {
        if self.counts.len() != 2 {
            return false;
        }
        let is01 = |x: T| x == T::zero() || x == T::one();
        (0..self.num_profiles()).all(|f| {
            let a = self.payoffs[0][f];
            let b = self.payoffs[1][f];
            is01(a) && is01(b) && a + b == T::one()
        })
    }

    pub fn flags(&self) -> GameFlags {
        GameFlags {
            symmetric: self.is_symmetric(),
            zero_sum: self.is_zero_sum(),
            win_loss: self.is_win_loss(),
        }
    }

    /// Converts the scalar type of every payoff.
    pub fn cast<U: Scalar>(&self) -> NormalFormGame<U> {
        NormalFormGame {
            counts: self.counts.clone(),
            strides: self.strides.clone(),
            payoffs: self
                .payoffs
                .iter()
                .map(|t| t.iter().map(|&x| U::lit(x.to_f64_lossy())).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Advances a mixed-radix counter (last digit fastest). Returns false on wrap-around.
pub(crate) fn increment(idx: &mut [usize], counts: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < counts[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matching_pennies() -> NormalFormGame<f64> {
        NormalFormGame::new(
            vec![2, 2],
            vec![vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]],
        )
        .unwrap()
    }

    #[test]
    fn matching_pennies_uniform_payoffs_are_zero() {
        let g = matching_pennies();
        let v = g.expected_payoffs(&MixedProfile::uniform(&[2, 2])).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);
    }

    #[test]
    fn dirac_profile_reads_the_tensor() {
        let g = fixture_game::<f64>(&Fixture::Chicken).unwrap();
        for flat in 0..4 {
            let p = g.profile_of(flat);
            let v = g
                .expected_payoffs(&MixedProfile::pure(&[2, 2], &p))
                .unwrap();
            assert_eq!(v, g.payoff_vector(&p));
        }
    }

    #[test]
    fn table2_x_against_uniform() {
        let g = fixture_game::<f64>(&Fixture::Table2 {
            eps: 0.1,
            phi: 10.0,
        })
        .unwrap();
        let mut prof = MixedProfile::uniform(&[5, 5]);
        prof.per_player[0] = vec![0.0, 0.0, 0.0, 0.0, 1.0];
        let v = g.expected_payoffs(&prof).unwrap();
        assert!((v[0] - 0.08).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = matching_pennies();
        let bad = MixedProfile {
            per_player: vec![vec![1.0]],
        };
        assert!(matches!(
            g.expected_payoffs(&bad),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn structural_flags() {
        let mp = matching_pennies();
        assert!(mp.is_zero_sum());
        assert!(!mp.is_symmetric());
        let t2 = fixture_game::<f64>(&Fixture::Table2 {
            eps: 0.1,
            phi: 10.0,
        })
        .unwrap();
        assert!(t2.is_symmetric() && t2.is_zero_sum());
        let pd = fixture_game::<f64>(&Fixture::PrisonersDilemma).unwrap();
        assert!(!pd.is_zero_sum());
        assert!(pd.is_symmetric());
    }

    #[test]
    fn win_loss_predicate() {
        let g = NormalFormGame::new(
            vec![2, 2],
            vec![vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 1.0, 0.0]],
        )
        .unwrap();
        assert!(g.is_win_loss());
        assert!(!matching_pennies().is_win_loss());
        let three = NormalFormGame::new(vec![1, 1, 1], vec![vec![1.0]; 3]).unwrap();
        assert!(!three.is_win_loss());
    }

    #[test]
    fn three_player_symmetry_uses_all_permutations() {
        // Payoff depends on own strategy and on the *second* player's only:
        // symmetric under nothing but the identity.
        let counts = vec![2, 2, 2];
        let g0 = NormalFormGame::<f64>::new(counts.clone(), vec![vec![0.0; 8]; 3]).unwrap();
        assert!(g0.is_symmetric());
        let mut p = vec![vec![0.0; 8]; 3];
        p[0][g0.flat_index(&[0, 1, 0])] = 1.0;
        let g = NormalFormGame::new(counts, p).unwrap();
        assert!(!g.is_symmetric());
    }

    #[test]
    fn restriction_keeps_entries() {
        let g = fixture_game::<f64>(&Fixture::Table2 {
            eps: 0.1,
            phi: 10.0,
        })
        .unwrap();
        let r = g.restrict(&[vec![2, 3], vec![2, 3]]).unwrap();
        assert_eq!(r.payoff(0, &[0, 1]), g.payoff(0, &[2, 3]));
        assert_eq!(r.strategy_label(0, 1), "D");
    }

    #[test]
    fn deviation_index_arithmetic() {
        let g = NormalFormGame::<f64>::new(vec![3, 4, 2], vec![vec![0.0; 24]; 3]).unwrap();
        for flat in 0..24 {
            let p = g.profile_of(flat);
            assert_eq!(g.flat_index(&p), flat);
            for k in 0..3 {
                for s in 0..g.strategy_counts()[k] {
                    let mut q = p.clone();
                    q[k] = s;
                    assert_eq!(g.deviate(flat, k, s), g.flat_index(&q));
                }
            }
        }
    }
}
