use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::KuhnPoker;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Behavioral policy of one seat: `[P(pass), P(bet)]` per information state,
/// indexed in `KuhnPoker::infostates(player)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavioralPolicy<T> {
    pub player: usize,
    pub probs: Vec<[T; 2]>,
}

/// One behavioral policy per seat.
pub type JointPolicy<T> = Vec<BehavioralPolicy<T>>;

/// Serialized form: information-state id to `[pass, bet]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyFile {
    pub player: usize,
    pub policy: BTreeMap<String, [f64; 2]>,
}

impl<T: Scalar> BehavioralPolicy<T> {
    pub fn uniform(tree: &KuhnPoker, player: usize) -> Self {
        let half = T::lit(0.5);
        BehavioralPolicy {
            player,
            probs: vec![[half, half]; tree.num_infostates(player)],
        }
    }

    /// Pure policy from one action per information state.
    pub fn pure(tree: &KuhnPoker, player: usize, actions: &[usize]) -> Result<Self> {
        if actions.len() != tree.num_infostates(player) || actions.iter().any(|&a| a > 1) {
            return Err(Error::invalid(
                "pure policy needs one action in {0, 1} per information state",
            ));
        }
        Ok(BehavioralPolicy {
            player,
            probs: actions
                .iter()
                .map(|&a| {
                    if a == 0 {
                        [T::one(), T::zero()]
                    } else {
                        [T::zero(), T::one()]
                    }
                })
                .collect(),
        })
    }

    /// Seeded random behavioral policy, each state's bet probability uniform on [0, 1].
    pub fn random(tree: &KuhnPoker, player: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        BehavioralPolicy {
            player,
            probs: (0..tree.num_infostates(player))
                .map(|_| {
                    let b = T::lit(rng.random::<f64>());
                    [T::one() - b, b]
                })
                .collect(),
        }
    }

    pub(crate) fn check(&self, tree: &KuhnPoker, player: usize) -> Result<()> {
        if self.player != player {
            return Err(Error::invalid(format!(
                "policy for player {} supplied in seat {player}",
                self.player
            )));
        }
        let want = tree.num_infostates(player);
        if self.probs.len() < want {
            let missing = tree
                .infostates(player)
                .nth(self.probs.len())
                .expect("in range");
            return Err(Error::invalid(format!(
                "policy for player {player} has no entry for information state {}",
                missing.id
            )));
        }
        if self.probs.len() > want {
            return Err(Error::invalid(format!(
                "policy for player {player} has {} entries, expected {want}",
                self.probs.len()
            )));
        }
        let tol = T::lit(1e-9);
        for (s, p) in tree.infostates(player).zip(&self.probs) {
            if p[0] < T::zero() || p[1] < T::zero() || (p[0] + p[1] - T::one()).abs() > tol {
                return Err(Error::invalid(format!(
                    "policy at {} is not a distribution: [{}, {}]",
                    s.id, p[0], p[1]
                )));
            }
        }
        Ok(())
    }

    pub fn to_file(&self, tree: &KuhnPoker) -> PolicyFile {
        PolicyFile {
            player: self.player,
            policy: tree
                .infostates(self.player)
                .zip(&self.probs)
                .map(|(s, p)| (s.id.clone(), [p[0].to_f64_lossy(), p[1].to_f64_lossy()]))
                .collect(),
        }
    }

    pub fn from_file(tree: &KuhnPoker, file: &PolicyFile) -> Result<Self> {
        if file.player >= tree.num_players() {
            return Err(Error::invalid(format!(
                "player {} out of range",
                file.player
            )));
        }
        let mut probs = Vec::with_capacity(tree.num_infostates(file.player));
        for s in tree.infostates(file.player) {
            let p = file.policy.get(&s.id).ok_or_else(|| {
                Error::invalid(format!(
                    "policy has no entry for information state {}",
                    s.id
                ))
            })?;
            probs.push([T::lit(p[0]), T::lit(p[1])]);
        }
        if let Some(extra) = file
            .policy
            .keys()
            .find(|id| tree.local_index(id).map(|x| x.0) != Some(file.player))
        {
            return Err(Error::invalid(format!(
                "unknown information state {extra} for player {}",
                file.player
            )));
        }
        let policy = BehavioralPolicy {
            player: file.player,
            probs,
        };
        policy.check(tree, file.player)?;
        Ok(policy)
    }
}

/// Policies agree everywhere to within 1e-9.
pub fn policy_equal<T: Scalar>(a: &BehavioralPolicy<T>, b: &BehavioralPolicy<T>) -> bool {
    let tol = T::lit(1e-9);
    a.player == b.player
        && a.probs.len() == b.probs.len()
        && a.probs
            .iter()
            .zip(&b.probs)
            .all(|(x, y)| (x[0] - y[0]).abs() <= tol && (x[1] - y[1]).abs() <= tol)
}

/// A distribution over policies for the other seats, used as the environment
/// of a best response.
#[derive(Debug, Clone)]
pub enum PolicyMixture<'a, T> {
    /// Independent mixture per seat. Inner entries are `(weight, policy)`.
    Factorized(Vec<Vec<(T, &'a BehavioralPolicy<T>)>>),
    /// Correlated distribution over joint policies.
    Joint(Vec<(T, Vec<&'a BehavioralPolicy<T>>)>),
}

impl<'a, T: Scalar> PolicyMixture<'a, T> {
    /// Every seat plays its policy with certainty.
    pub fn pure(joint: &'a [BehavioralPolicy<T>]) -> Self {
        PolicyMixture::Factorized(joint.iter().map(|p| vec![(T::one(), p)]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_missing_state() {
        let tree = KuhnPoker::new(2).unwrap();
        let p = BehavioralPolicy::<f64>::random(&tree, 1, 5);
        let file = p.to_file(&tree);
        let text = serde_json::to_string(&file).unwrap();
        let back: PolicyFile = serde_json::from_str(&text).unwrap();
        let q = BehavioralPolicy::<f64>::from_file(&tree, &back).unwrap();
        assert!(policy_equal(&p, &q));

        let mut broken = file.clone();
        broken.policy.remove("1:0:b");
        let err = BehavioralPolicy::<f64>::from_file(&tree, &broken).unwrap_err();
        assert!(err.to_string().contains("1:0:b"), "{err}");
    }

    #[test]
    fn short_policy_names_missing_state() {
        let tree = KuhnPoker::new(2).unwrap();
        let mut p = BehavioralPolicy::<f64>::uniform(&tree, 0);
        p.probs.pop();
        let joint = vec![p, BehavioralPolicy::uniform(&tree, 1)];
        let err = tree.expected_payoffs(&joint).unwrap_err();
        assert!(err.to_string().contains("information state"), "{err}");
    }
}
