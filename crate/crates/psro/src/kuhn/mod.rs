//! K-player Kuhn poker as an explicit extensive-form game tree.
//!
//! The deck holds K+1 ranked cards and every player antes one chip. Players act
//! in seat order and may pass or bet one chip; after the first bet every other
//! player, in turn, calls or folds. There are no raises. The highest card among
//! the players who did not fold takes the pot.

mod best_response;
mod policy;

pub use best_response::{
    best_response, exact_best_response, mixture_payoffs, nashconv, BestResponse,
};
pub use policy::{policy_equal, BehavioralPolicy, JointPolicy, PolicyMixture};

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pass (check or fold).
pub const PASS: usize = 0;
/// Bet (open or call).
pub const BET: usize = 1;

#[derive(Debug, Clone)]
pub(crate) enum Node {
    /// Uniform chance over deals; children indexed by deal.
    Chance {
        children: Vec<usize>,
    },
    Decision {
        player: usize,
        infostate: usize,
        children: [usize; 2],
    },
    Terminal {
        payoffs: Vec<i32>,
    },
}

/// Information state: what one player knows when it is to act.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoState {
    pub id: String,
    pub player: usize,
    pub card: usize,
    pub history: String,
    /// Decision nodes (one per compatible deal) in this information state.
    pub(crate) nodes: Vec<usize>,
}

/// Full game tree of K-player Kuhn poker.
#[derive(Debug, Clone)]
pub struct KuhnPoker {
    num_players: usize,
    pub(crate) nodes: Vec<Node>,
    deals: Vec<Vec<usize>>,
    infostates: Vec<InfoState>,
    by_player: Vec<Vec<usize>>,
    local: Vec<usize>,
    ids: HashMap<String, usize>,
}

/// Player to act after `history`, or `None` at a terminal history.
fn next_player(history: &[usize], k: usize) -> Option<usize> {
    match history.iter().position(|&a| a == BET) {
        None => (history.len() < k).then_some(history.len()),
        Some(bettor) => {
            let responses = history.len() - bettor - 1;
            (responses < k - 1).then_some((bettor + 1 + responses) % k)
        }
    }
}

/// Chip payoffs at a terminal history.
fn terminal_payoffs(history: &[usize], cards: &[usize]) -> Vec<i32> {
    let k = cards.len();
    let mut contrib = vec![1i32; k];
    let mut in_showdown = vec![true; k];
    if let Some(bettor) = history.iter().position(|&a| a == BET) {
        contrib[bettor] += 1;
        in_showdown = vec![false; k];
        in_showdown[bettor] = true;
        for (r, &a) in history[bettor + 1..].iter().enumerate() {
            let p = (bettor + 1 + r) % k;
            if a == BET {
                contrib[p] += 1;
                in_showdown[p] = true;
            }
        }
    }
    let winner = (0..k)
        .filter(|&p| in_showdown[p])
        .max_by_key(|&p| cards[p])
        .expect("someone reaches showdown");
    let pot: i32 = contrib.iter().sum();
    (0..k)
        .map(|p| {
            if p == winner {
                pot - contrib[p]
            } else {
                -contrib[p]
            }
        })
        .collect()
}

fn history_string(history: &[usize]) -> String {
    history
        .iter()
        .map(|&a| if a == BET { 'b' } else { 'p' })
        .collect()
}

/// All ordered deals of `k` distinct cards out of `k + 1`.
fn all_deals(k: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in 0..=k {
            if !used[c] {
                used[c] = true;
                cur.push(c);
                rec(k, cur, used, out);
                cur.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, &mut Vec::new(), &mut vec![false; k + 1], &mut out);
    out
}

impl KuhnPoker {
    /// Builds the full tree for 2 to 5 players.
    pub fn new(num_players: usize) -> Result<Self> {
        if !(2..=5).contains(&num_players) {
            return Err(Error::invalid(format!(
                "Kuhn poker supports 2 to 5 players, got {num_players}"
            )));
        }
        let deals = all_deals(num_players);
        let mut tree = KuhnPoker {
            num_players,
            nodes: vec![Node::Chance {
                children: Vec::new(),
            }],
            deals: deals.clone(),
            infostates: Vec::new(),
            by_player: vec![Vec::new(); num_players],
            local: Vec::new(),
            ids: HashMap::new(),
        };
        let mut children = Vec::with_capacity(deals.len());
        for cards in &deals {
            let child = tree.build(cards, &mut Vec::new());
            children.push(child);
        }
        tree.nodes[0] = Node::Chance { children };
        Ok(tree)
    }

    fn build(&mut self, cards: &[usize], history: &mut Vec<usize>) -> usize {
        match next_player(history, self.num_players) {
            None => {
                self.nodes.push(Node::Terminal {
                    payoffs: terminal_payoffs(history, cards),
                });
                self.nodes.len() - 1
            }
            Some(player) => {
                let id = format!("{}:{}:{}", player, cards[player], history_string(history));
                let infostate = match self.ids.get(&id) {
                    Some(&i) => i,
                    None => {
                        let i = self.infostates.len();
                        self.local.push(self.by_player[player].len());
                        self.by_player[player].push(i);
                        self.infostates.push(InfoState {
                            id: id.clone(),
                            player,
                            card: cards[player],
                            history: history_string(history),
                            nodes: Vec::new(),
                        });
                        self.ids.insert(id, i);
                        i
                    }
                };
                let me = self.nodes.len();
                self.nodes.push(Node::Terminal {
                    payoffs: Vec::new(),
                });
                self.infostates[infostate].nodes.push(me);
                let mut kids = [0usize; 2];
                for (a, kid) in kids.iter_mut().enumerate() {
                    history.push(a);
                    *kid = self.build(cards, history);
                    history.pop();
                }
                self.nodes[me] = Node::Decision {
                    player,
                    infostate,
                    children: kids,
                };
                me
            }
        }
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn num_deals(&self) -> usize {
        self.deals.len()
    }

    pub fn deals(&self) -> &[Vec<usize>] {
        &self.deals
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Information states of `player`, in the order policies index them.
    pub fn infostates(&self, player: usize) -> impl Iterator<Item = &InfoState> + '_ {
        self.by_player[player]
            .iter()
            .map(move |&i| &self.infostates[i])
    }

    pub fn num_infostates(&self, player: usize) -> usize {
        self.by_player[player].len()
    }

    /// Local (per-player) index of an information state id.
    pub fn local_index(&self, id: &str) -> Option<(usize, usize)> {
        self.ids
            .get(id)
            .map(|&g| (self.infostates[g].player, self.local[g]))
    }

    pub(crate) fn local_of(&self, global: usize) -> usize {
        self.local[global]
    }

    pub(crate) fn infostate(&self, global: usize) -> &InfoState {
        &self.infostates[global]
    }

    /// Chip payoffs of every terminal history, with the deal that produced it.
    pub fn terminals(&self) -> Vec<&[i32]> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Terminal { payoffs } => Some(payoffs.as_slice()),
                _ => None,
            })
            .collect()
    }

    fn check_joint<T: Scalar>(&self, joint: &JointPolicy<T>) -> Result<()> {
        if joint.len() != self.num_players {
            return Err(Error::invalid(format!(
                "joint policy has {} entries for {} players",
                joint.len(),
                self.num_players
            )));
        }
        for (k, p) in joint.iter().enumerate() {
            p.check(self, k)?;
        }
        Ok(())
    }

    /// Exact expected chip payoffs under a joint behavioral policy.
    pub fn expected_payoffs<T: Scalar>(&self, joint: &JointPolicy<T>) -> Result<Vec<T>> {
        self.check_joint(joint)?;
        let mut out = vec![T::zero(); self.num_players];
        let chance = T::one() / T::from_usize_lossy(self.deals.len());
        let mut stack = vec![(0usize, T::one())];
        while let Some((node, reach)) = stack.pop() {
            match &self.nodes[node] {
                Node::Chance { children } => {
                    stack.extend(children.iter().map(|&c| (c, reach * chance)));
                }
                Node::Decision {
                    player,
                    infostate,
                    children,
                } => {
                    let probs = joint[*player].probs[self.local[*infostate]];
                    for a in 0..2 {
                        if probs[a] > T::zero() {
                            stack.push((children[a], reach * probs[a]));
                        }
                    }
                }
                Node::Terminal { payoffs } => {
                    for (o, &p) in out.iter_mut().zip(payoffs) {
                        *o += reach * T::from_i32(p).expect("chip count fits");
                    }
                }
            }
        }
        Ok(out)
    }

    /// Monte Carlo mean payoffs over `episodes` seeded rollouts.
    pub fn simulate<T: Scalar>(
        &self,
        joint: &JointPolicy<T>,
        episodes: usize,
        seed: u64,
    ) -> Result<Vec<T>> {
        self.check_joint(joint)?;
        if episodes == 0 {
            return Err(Error::invalid("episodes must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut totals = vec![0i64; self.num_players];
        let children = match &self.nodes[0] {
            Node::Chance { children } => children,
            _ => unreachable!("root is a chance node"),
        };
        for _ in 0..episodes {
            let mut node = children[rng.random_range(0..children.len())];
            loop {
                match &self.nodes[node] {
                    Node::Decision {
                        player,
                        infostate,
                        children,
                    } => {
                        let probs = joint[*player].probs[self.local[*infostate]];
                        let u: f64 = rng.random();
                        let a = if u < probs[PASS].to_f64_lossy() {
                            PASS
                        } else {
                            BET
                        };
                        node = children[a];
                    }
                    Node::Terminal { payoffs } => {
                        for (t, &p) in totals.iter_mut().zip(payoffs) {
                            *t += i64::from(p);
                        }
                        break;
                    }
                    Node::Chance { .. } => unreachable!("single chance node at the root"),
                }
            }
        }
        let n = T::from_usize_lossy(episodes);
        Ok(totals
            .into_iter()
            .map(|t| T::from_i64(t).expect("total fits") / n)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deal_counts() {
        assert_eq!(KuhnPoker::new(2).unwrap().num_deals(), 6);
        assert_eq!(KuhnPoker::new(3).unwrap().num_deals(), 24);
        assert_eq!(KuhnPoker::new(4).unwrap().num_deals(), 120);
        assert!(KuhnPoker::new(1).is_err());
        assert!(KuhnPoker::new(6).is_err());
    }

    #[test]
    fn terminals_conserve_chips() {
        for k in 2..=5 {
            let tree = KuhnPoker::new(k).unwrap();
            for t in tree.terminals() {
                assert_eq!(t.iter().sum::<i32>(), 0);
            }
        }
    }

    #[test]
    fn two_player_rules() {
        // Cards: player 0 holds 2 (high), player 1 holds 0.
        let cards = [2, 0];
        assert_eq!(terminal_payoffs(&[PASS, PASS], &cards), vec![1, -1]);
        assert_eq!(terminal_payoffs(&[BET, PASS], &cards), vec![1, -1]);
        assert_eq!(terminal_payoffs(&[BET, BET], &cards), vec![2, -2]);
        assert_eq!(terminal_payoffs(&[PASS, BET, PASS], &cards), vec![-1, 1]);
        assert_eq!(terminal_payoffs(&[PASS, BET, BET], &cards), vec![2, -2]);
        assert_eq!(next_player(&[PASS, BET], 2), Some(0));
        assert_eq!(next_player(&[PASS, BET, PASS], 2), None);
    }

    #[test]
    fn three_player_bet_wraps_around() {
        assert_eq!(next_player(&[PASS, BET], 3), Some(2));
        assert_eq!(next_player(&[PASS, BET, PASS], 3), Some(0));
        assert_eq!(next_player(&[PASS, BET, PASS, BET], 3), None);
        // Player 1 bets, player 2 folds, player 0 calls with the better card.
        assert_eq!(
            terminal_payoffs(&[PASS, BET, PASS, BET], &[3, 1, 2]),
            vec![3, -2, -1]
        );
    }

    #[test]
    fn two_player_information_states() {
        let tree = KuhnPoker::new(2).unwrap();
        assert_eq!(tree.num_infostates(0), 6);
        assert_eq!(tree.num_infostates(1), 6);
        assert_eq!(tree.local_index("1:2:b").map(|x| x.0), Some(1));
        for s in tree.infostates(0) {
            assert_eq!(s.nodes.len(), 2, "{}", s.id);
        }
    }
}
