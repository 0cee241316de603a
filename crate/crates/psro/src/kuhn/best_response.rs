use super::{BehavioralPolicy, KuhnPoker, Node, PolicyMixture, BET, PASS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exact best response of one seat and its expected payoff.
#[derive(Debug, Clone)]
pub struct BestResponse<T> {
    pub policy: BehavioralPolicy<T>,
    pub value: T,
}

/// Flattened reach state for a mixture: one slot per (seat, component) or per
/// joint entry.
struct Reach<'m, 'a, T> {
    mix: &'m PolicyMixture<'a, T>,
    skip: Option<usize>,
    seat_offsets: Vec<usize>,
}

impl<'m, 'a, T: Scalar> Reach<'m, 'a, T> {
    fn new(tree: &KuhnPoker, mix: &'m PolicyMixture<'a, T>, skip: Option<usize>) -> Result<Self> {
        let k = tree.num_players();
        let active = |seat: usize| Some(seat) != skip;
        let mut seat_offsets = vec![0];
        match mix {
            PolicyMixture::Factorized(seats) => {
                if seats.len() != k {
                    return Err(Error::invalid(format!(
                        "mixture covers {} seats, game has {k}",
                        seats.len()
                    )));
                }
                for (seat, comps) in seats.iter().enumerate() {
                    if active(seat) {
                        if comps.is_empty() {
                            return Err(Error::invalid(format!("empty mixture for seat {seat}")));
                        }
                        for (w, p) in comps {
                            if *w < T::zero() {
                                return Err(Error::invalid("negative mixture weight"));
                            }
                            p.check(tree, seat)?;
                        }
                    }
                    seat_offsets.push(seat_offsets[seat] + comps.len());
                }
            }
            PolicyMixture::Joint(entries) => {
                if entries.is_empty() {
                    return Err(Error::invalid("empty joint mixture"));
                }
                for (w, joint) in entries {
                    if *w < T::zero() {
                        return Err(Error::invalid("negative mixture weight"));
                    }
                    if joint.len() != k {
                        return Err(Error::invalid(format!(
                            "joint entry covers {} seats, game has {k}",
                            joint.len()
                        )));
                    }
                    for (seat, p) in joint.iter().enumerate() {
                        if active(seat) {
                            p.check(tree, seat)?;
                        }
                    }
                }
            }
        }
        Ok(Reach {
            mix,
            skip,
            seat_offsets,
        })
    }

    fn initial(&self) -> Vec<T> {
        match self.mix {
            PolicyMixture::Factorized(_) => {
                vec![T::one(); *self.seat_offsets.last().expect("non-empty")]
            }
            PolicyMixture::Joint(entries) => vec![T::one(); entries.len()],
        }
    }

    fn step(&self, reach: &mut [T], seat: usize, local: usize, action: usize) {
        if Some(seat) == self.skip {
            return;
        }
        match self.mix {
            PolicyMixture::Factorized(seats) => {
                let base = self.seat_offsets[seat];
                for (c, (_, p)) in seats[seat].iter().enumerate() {
                    reach[base + c] *= p.probs[local][action];
                }
            }
            PolicyMixture::Joint(entries) => {
                for (r, (_, joint)) in reach.iter_mut().zip(entries) {
                    *r *= joint[seat].probs[local][action];
                }
            }
        }
    }

    fn weight(&self, reach: &[T]) -> T {
        match self.mix {
            PolicyMixture::Factorized(seats) => {
                let mut w = T::one();
                for (seat, comps) in seats.iter().enumerate() {
                    if Some(seat) == self.skip {
                        continue;
                    }
                    let base = self.seat_offsets[seat];
                    let mut s = T::zero();
                    for (c, (wc, _)) in comps.iter().enumerate() {
                        s += *wc * reach[base + c];
                    }
                    w *= s;
                }
                w
            }
            PolicyMixture::Joint(entries) => {
                let mut s = T::zero();
                for (r, (w, _)) in reach.iter().zip(entries) {
                    s += *w * *r;
                }
                s
            }
        }
    }
}

/// Chance times mixture reach at every terminal node (zero at other nodes).
fn terminal_weights<T: Scalar>(tree: &KuhnPoker, reach: &Reach<'_, '_, T>) -> Vec<T> {
    let mut out = vec![T::zero(); tree.nodes.len()];
    let chance = T::one() / T::from_usize_lossy(tree.num_deals());
    let mut stack = vec![(0usize, reach.initial())];
    while let Some((node, r)) = stack.pop() {
        match &tree.nodes[node] {
            Node::Chance { children } => {
                stack.extend(children.iter().map(|&c| (c, r.clone())));
            }
            Node::Decision {
                player,
                infostate,
                children,
            } => {
                let local = tree.local_of(*infostate);
                for a in [PASS, BET] {
                    let mut next = r.clone();
                    reach.step(&mut next, *player, local, a);
                    stack.push((children[a], next));
                }
            }
            Node::Terminal { .. } => out[node] = chance * reach.weight(&r),
        }
    }
    out
}

/// Expected payoffs of every seat under a mixture covering all seats.
pub fn mixture_payoffs<T: Scalar>(tree: &KuhnPoker, mix: &PolicyMixture<'_, T>) -> Result<Vec<T>> {
    let reach = Reach::new(tree, mix, None)?;
    let w = terminal_weights(tree, &reach);
    let mut out = vec![T::zero(); tree.num_players()];
    for (node, wz) in tree.nodes.iter().zip(&w) {
        if let Node::Terminal { payoffs } = node {
            for (o, &p) in out.iter_mut().zip(payoffs) {
                *o += *wz * T::from_i32(p).expect("chip count fits");
            }
        }
    }
    Ok(out)
}

struct Solver<'t, T> {
    tree: &'t KuhnPoker,
    player: usize,
    weights: Vec<T>,
    value: Vec<Option<T>>,
    choice: Vec<Option<usize>>,
}

impl<T: Scalar> Solver<'_, T> {
    fn value(&mut self, node: usize) -> T {
        if let Some(v) = self.value[node] {
            return v;
        }
        let v = match &self.tree.nodes[node] {
            Node::Terminal { payoffs } => {
                self.weights[node] * T::from_i32(payoffs[self.player]).expect("fits")
            }
            Node::Chance { children } => {
                let children = children.clone();
                children.into_iter().map(|c| self.value(c)).sum()
            }
            Node::Decision {
                player,
                infostate,
                children,
            } => {
                let children = *children;
                if *player == self.player {
                    let a = self.choose(*infostate);
                    self.value(children[a])
                } else {
                    self.value(children[PASS]) + self.value(children[BET])
                }
            }
        };
        self.value[node] = Some(v);
        v
    }

    fn choose(&mut self, infostate: usize) -> usize {
        let local = self.tree.local_of(infostate);
        if let Some(a) = self.choice[local] {
            return a;
        }
        let mut q = [T::zero(); 2];
        for h in self.tree.infostate(infostate).nodes.clone() {
            if let Node::Decision { children, .. } = &self.tree.nodes[h] {
                let children = *children;
                q[PASS] += self.value(children[PASS]);
                q[BET] += self.value(children[BET]);
            }
        }
        let a = if q[BET] > q[PASS] + T::lit(1e-12) {
            BET
        } else {
            PASS
        };
        self.choice[local] = Some(a);
        a
    }
}

/// Exact best response of `player` against a mixture over the other seats.
/// Ties within 1e-12 go to pass.
pub fn best_response<T: Scalar>(
    tree: &KuhnPoker,
    player: usize,
    mix: &PolicyMixture<'_, T>,
) -> Result<BestResponse<T>> {
    if player >= tree.num_players() {
        return Err(Error::invalid(format!("player {player} out of range")));
    }
    let reach = Reach::new(tree, mix, Some(player))?;
    let weights = terminal_weights(tree, &reach);
    let n_states = tree.num_infostates(player);
    let mut solver = Solver {
        tree,
        player,
        weights,
        value: vec![None; tree.nodes.len()],
        choice: vec![None; n_states],
    };
    let value = solver.value(0);
    // States the best response never reaches still need an action.
    let actions: Vec<usize> = tree
        .infostates(player)
        .enumerate()
        .map(|(i, s)| {
            solver.choice[i].unwrap_or_else(|| {
                let global = tree.ids[&s.id];
                solver.choose(global)
            })
        })
        .collect();
    Ok(BestResponse {
        policy: BehavioralPolicy::pure(tree, player, &actions)?,
        value,
    })
}

/// Best response of `player` when every other seat plays its entry of `joint`.
pub fn exact_best_response<T: Scalar>(
    tree: &KuhnPoker,
    joint: &[BehavioralPolicy<T>],
    player: usize,
) -> Result<BehavioralPolicy<T>> {
    Ok(best_response(tree, player, &PolicyMixture::pure(joint))?.policy)
}

/// Sum over seats of best-response value minus current value.
pub fn nashconv<T: Scalar>(tree: &KuhnPoker, mix: &PolicyMixture<'_, T>) -> Result<T> {
    let current = mixture_payoffs(tree, mix)?;
    let mut total = T::zero();
    for (k, v) in current.into_iter().enumerate() {
        total += best_response(tree, k, mix)?.value - v;
    }
    Ok(total)
}
