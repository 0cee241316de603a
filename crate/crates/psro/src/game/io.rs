//! JSON game files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NormalFormGame;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// On-disk game: one flat row-major payoff list per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub players: usize,
    pub strategy_counts: Vec<usize>,
    pub payoffs: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

impl GameFile {
    pub fn from_game<T: Scalar>(game: &NormalFormGame<T>) -> Self {
        GameFile {
            players: game.num_players(),
            strategy_counts: game.strategy_counts().to_vec(),
            payoffs: (0..game.num_players())
                .map(|k| game.tensor(k).iter().map(|x| x.to_f64_lossy()).collect())
                .collect(),
            labels: game.labels().map(<[_]>::to_vec),
        }
    }

    pub fn into_game<T: Scalar>(self) -> Result<NormalFormGame<T>> {
        if self.players != self.strategy_counts.len() {
            return Err(Error::invalid(format!(
                "players = {} but {} strategy counts given",
                self.players,
                self.strategy_counts.len()
            )));
        }
        let payoffs = self
            .payoffs
            .into_iter()
            .map(|t| t.into_iter().map(T::lit).collect())
            .collect();
        let game = NormalFormGame::new(self.strategy_counts, payoffs)?;
        match self.labels {
            Some(l) => game.with_labels(l),
            None => Ok(game),
        }
    }
}

impl<T: Scalar> NormalFormGame<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GameFile::from_game(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GameFile = serde_json::from_str(text)?;
        file.into_game()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::generate_random_game;

    #[test]
    fn json_round_trip_is_bit_exact() {
        let g: NormalFormGame<f64> = generate_random_game(4, 3, 99).unwrap();
        let back = NormalFormGame::<f64>::from_json(&g.to_json().unwrap()).unwrap();
        for k in 0..3 {
            for (a, b) in g.tensor(k).iter().zip(back.tensor(k)) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn malformed_files_are_rejected() {
        let bad = r#"{"players":2,"strategy_counts":[2,2],"payoffs":[[1,2,3,4]]}"#;
        assert!(NormalFormGame::<f64>::from_json(bad).is_err());
        let bad = r#"{"players":3,"strategy_counts":[1,1],"payoffs":[[1],[1]]}"#;
        assert!(NormalFormGame::<f64>::from_json(bad).is_err());
    }
}
