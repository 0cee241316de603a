use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::graph::PopulationMode;
use crate::scalar::Scalar;

/// Per-player strategy lists plus the completed meta-game payoffs.
///
/// In single-population mode there is one shared list and the meta-game is the
/// symmetric two-player game over it.
#[derive(Debug, Clone)]
pub struct Population<S, T> {
    mode: PopulationMode,
    num_players: usize,
    lists: Vec<Vec<S>>,
    payoffs: HashMap<Vec<usize>, Vec<T>>,
    evaluations: usize,
}

impl<S, T: Scalar> Population<S, T> {
    /// `initial` holds one list per player, or a single list in single-population mode.
    pub fn new(mode: PopulationMode, num_players: usize, initial: Vec<Vec<S>>) -> Result<Self> {
        let want = match mode {
            PopulationMode::Single => 1,
            PopulationMode::Multi => num_players,
        };
        if mode == PopulationMode::Single && num_players != 2 {
            return Err(Error::UnsupportedConfig(
                "single-population mode needs two players".into(),
            ));
        }
        if initial.len() != want || initial.iter().any(Vec::is_empty) {
            return Err(Error::invalid(format!(
                "expected {want} non-empty initial strategy lists, got {}",
                initial.len()
            )));
        }
        Ok(Population {
            mode,
            num_players,
            lists: initial,
            payoffs: HashMap::new(),
            evaluations: 0,
        })
    }

    pub fn mode(&self) -> PopulationMode {
        self.mode
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    /// Number of independent lists: 1 in single-population mode, K otherwise.
    pub fn num_lists(&self) -> usize {
        self.lists.len()
    }

    /// The strategy list used by `player`.
    pub fn list(&self, player: usize) -> &[S] {
        match self.mode {
            PopulationMode::Single => &self.lists[0],
            PopulationMode::Multi => &self.lists[player],
        }
    }

    pub fn lists(&self) -> &[Vec<S>] {
        &self.lists
    }

    /// Meta-game strategy counts, one per player.
    pub fn sizes(&self) -> Vec<usize> {
        (0..self.num_players).map(|k| self.list(k).len()).collect()
    }

    /// Sum of list lengths (the shared list counted once).
    pub fn total_pool_length(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }

    /// Payoff evaluations performed so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn position(&self, list: usize, s: &S, same: impl Fn(&S, &S) -> bool) -> Option<usize> {
        self.lists[list].iter().position(|x| same(x, s))
    }

    pub(crate) fn push(&mut self, list: usize, s: S) {
        self.lists[list].push(s);
    }

    /// Evaluates every meta-game profile not yet completed; returns how many
    /// were evaluated. `evaluate` receives the meta-profile indices and the strategies.
    pub fn complete(
        &mut self,
        mut evaluate: impl FnMut(&[usize], &[&S]) -> Result<Vec<T>>,
    ) -> Result<usize> {
        let sizes = self.sizes();
        let total: usize = sizes.iter().product();
        let mut idx = vec![0usize; self.num_players];
        let mut fresh = 0;
        for _ in 0..total {
            if !self.payoffs.contains_key(&idx) {
                let profile: Vec<&S> = (0..self.num_players)
                    .map(|k| &self.list(k)[idx[k]])
                    .collect();
                let v = evaluate(&idx, &profile).map_err(|e| match e {
                    Error::InvalidInput(msg) => {
                        Error::invalid(format!("evaluating meta-profile {idx:?}: {msg}"))
                    }
                    other => other,
                })?;
                if v.len() != self.num_players {
                    return Err(Error::invalid(format!(
                        "evaluation of {idx:?} returned {} payoffs",
                        v.len()
                    )));
                }
                self.payoffs.insert(idx.clone(), v);
                fresh += 1;
            }
            crate::game::increment(&mut idx, &sizes);
        }
        self.evaluations += fresh;
        Ok(fresh)
    }

    /// The completed meta-game.
    pub fn meta_game(&self) -> Result<NormalFormGame<T>> {
        let sizes = self.sizes();
        let total: usize = sizes.iter().product();
        let mut tensors = vec![Vec::with_capacity(total); self.num_players];
        let mut idx = vec![0usize; self.num_players];
        for _ in 0..total {
            let v = self.payoffs.get(&idx).ok_or_else(|| {
                Error::invalid(format!("meta-profile {idx:?} has not been evaluated"))
            })?;
            for (t, &x) in tensors.iter_mut().zip(v) {
                t.push(x);
            }
            crate::game::increment(&mut idx, &sizes);
        }
        NormalFormGame::new(sizes, tensors)
    }
}
