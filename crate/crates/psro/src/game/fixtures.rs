//! Small named games used by the walkthroughs and tests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::NormalFormGame;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Named fixture games.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Fixture {
    /// Symmetric zero-sum game on strategies A, B, C, D, X.
    Table2 {
        eps: f64,
        phi: f64,
    },
    /// Symmetric game on A, B, X whose SSCC contains X but whose equilibria do not.
    ExampleA4 {
        eps: f64,
    },
    /// Zero-sum 3×2 game where X is ignored by every restricted equilibrium.
    ExampleA5 {
        eps: f64,
    },
    Chicken,
    PrisonersDilemma,
    MatchingPennies,
    RockPaperScissors,
    /// Three-player, three-strategy game on which multi-population α-PSRO stalls.
    Snowflake3p,
}

impl Fixture {
    pub const DEFAULT_EPS: f64 = 0.1;
    pub const DEFAULT_PHI: f64 = 10.0;

    pub fn table2() -> Self {
        Fixture::Table2 {
            eps: Self::DEFAULT_EPS,
            phi: Self::DEFAULT_PHI,
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixture::Table2 { eps, phi } => write!(f, "table2({eps},{phi})"),
            Fixture::ExampleA4 { eps } => write!(f, "exampleA4({eps})"),
            Fixture::ExampleA5 { eps } => write!(f, "exampleA5({eps})"),
            Fixture::Chicken => f.write_str("chicken"),
            Fixture::PrisonersDilemma => f.write_str("prisoners_dilemma"),
            Fixture::MatchingPennies => f.write_str("matching_pennies"),
            Fixture::RockPaperScissors => f.write_str("rock_paper_scissors"),
            Fixture::Snowflake3p => f.write_str("snowflake3p"),
        }
    }
}

impl FromStr for Fixture {
    type Err = Error;

    /// Accepts `name` or `name(p1,p2)`, e.g. `table2`, `table2(0.05,20)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            Some(_) => return Err(Error::invalid(format!("malformed fixture name {s:?}"))),
            None => (s, ""),
        };
        let params: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::invalid(format!("bad fixture parameter {a:?}")))
                })
                .collect::<Result<_>>()?
        };
        let arg = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        let max_params = |n: usize| {
            if params.len() > n {
                Err(Error::invalid(format!(
                    "fixture {name} takes at most {n} parameters"
                )))
            } else {
                Ok(())
            }
        };
        let fixture = match name {
            "table2" => {
                max_params(2)?;
                Fixture::Table2 {
                    eps: arg(0, Self::DEFAULT_EPS),
                    phi: arg(1, Self::DEFAULT_PHI),
                }
            }
            "exampleA4" | "example_a4" => {
                max_params(1)?;
                Fixture::ExampleA4 {
                    eps: arg(0, Self::DEFAULT_EPS),
                }
            }
            "exampleA5" | "example_a5" => {
                max_params(1)?;
                Fixture::ExampleA5 {
                    eps: arg(0, Self::DEFAULT_EPS),
                }
            }
            "chicken" => Fixture::Chicken,
            "prisoners_dilemma" => Fixture::PrisonersDilemma,
            "matching_pennies" => Fixture::MatchingPennies,
            "rock_paper_scissors" | "rps" => Fixture::RockPaperScissors,
            "snowflake3p" | "snowflake" => Fixture::Snowflake3p,
            _ => return Err(Error::invalid(format!("unknown fixture {name:?}"))),
        };
        if !matches!(
            fixture,
            Fixture::Table2 { .. } | Fixture::ExampleA4 { .. } | Fixture::ExampleA5 { .. }
        ) {
            max_params(0)?;
        }
        Ok(fixture)
    }
}

fn labels(names: &[&[&str]]) -> Vec<Vec<String>> {
    names
        .iter()
        .map(|l| l.iter().map(|s| s.to_string()).collect())
        .collect()
}

/// Two-player game from player 1's matrix; player 2 gets `p2(i, j)`.
fn bimatrix<T: Scalar>(
    m1: &[&[f64]],
    p2: impl Fn(usize, usize) -> f64,
    names: &[&[&str]],
) -> Result<NormalFormGame<T>> {
    let rows = m1.len();
    let cols = m1[0].len();
    let mut a = Vec::with_capacity(rows * cols);
    let mut b = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            a.push(T::lit(m1[i][j]));
            b.push(T::lit(p2(i, j)));
        }
    }
    NormalFormGame::new(vec![rows, cols], vec![a, b])?.with_labels(labels(names))
}

fn symmetric<T: Scalar>(m1: &[&[f64]], names: &[&str]) -> Result<NormalFormGame<T>> {
    bimatrix(m1, |i, j| m1[j][i], &[names, names])
}

/// Builds the named fixture game with payoffs exactly as tabulated.
pub fn fixture_game<T: Scalar>(fixture: &Fixture) -> Result<NormalFormGame<T>> {
    match *fixture {
        Fixture::Table2 { eps, phi } => {
            if !(eps > 0.0 && eps < 1.0) || !(phi > 2.0) || !phi.is_finite() {
                return Err(Error::invalid("table2 needs 0 < eps < 1 and phi > 2"));
            }
            let p2 = phi * phi;
            let m: [&[f64]; 5] = [
                &[0.0, -phi, 1.0, phi, -eps],
                &[phi, 0.0, -p2, 1.0, -eps],
                &[-1.0, p2, 0.0, -phi, -eps],
                &[-phi, -1.0, phi, 0.0, -eps],
                &[eps, eps, eps, eps, 0.0],
            ];
            symmetric(&m, &["A", "B", "C", "D", "X"])
        }
        Fixture::ExampleA4 { eps } => {
            let m: [&[f64]; 3] = [&[0.0, 1.0, eps], &[1.0, 0.0, -eps], &[-eps, eps, 0.0]];
            symmetric(&m, &["A", "B", "X"])
        }
        Fixture::ExampleA5 { eps } => {
            let m: [&[f64]; 3] = [&[-1.0, 1.0], &[1.0, -1.0], &[-eps, -eps / 2.0]];
            bimatrix(&m, |i, j| -m[i][j], &[&["A", "B", "X"], &["A", "B"]])
        }
        Fixture::Chicken => {
            let m: [&[f64]; 2] = [&[0.0, 7.0], &[2.0, 6.0]];
            symmetric(&m, &["D", "C"])
        }
        Fixture::PrisonersDilemma => {
            let m: [&[f64]; 2] = [&[0.0, 3.0], &[-1.0, 2.0]];
            symmetric(&m, &["D", "C"])
        }
        Fixture::MatchingPennies => {
            let m: [&[f64]; 2] = [&[1.0, -1.0], &[-1.0, 1.0]];
            bimatrix(&m, |i, j| -m[i][j], &[&["H", "T"], &["H", "T"]])
        }
        Fixture::RockPaperScissors => {
            let m: [&[f64]; 3] = [&[0.0, -1.0, 1.0], &[1.0, 0.0, -1.0], &[-1.0, 1.0, 0.0]];
            symmetric(&m, &["R", "P", "S"])
        }
        Fixture::Snowflake3p => snowflake(),
    }
}

/// Payoffs realizing the snowflake response graph.
///
/// Profiles are written with 1-based strategies as in the walkthrough. Strategy 3
/// costs its player 10 everywhere except at the escape profiles (3,2,1) and
/// (3,2,3); the latter pays everyone 5 and is the game's only sink.
fn snowflake<T: Scalar>() -> Result<NormalFormGame<T>> {
    const CUBE: [([usize; 3], [f64; 3]); 8] = [
        ([1, 1, 1], [0.0, 1.0, 1.0]),
        ([2, 1, 1], [1.0, 0.0, 1.0]),
        ([2, 2, 1], [2.0, 1.0, 0.0]),
        ([1, 2, 1], [0.0, 0.0, 1.0]),
        ([2, 2, 2], [0.0, 1.0, 1.0]),
        ([1, 2, 2], [1.0, 1.0, 0.0]),
        ([1, 1, 2], [0.0, 0.0, 0.0]),
        ([2, 1, 2], [1.0, 0.0, 0.0]),
    ];
    let counts = vec![3, 3, 3];
    let mut payoffs = vec![vec![0.0f64; 27]; 3];
    let flat = |p: [usize; 3]| (p[0] - 1) * 9 + (p[1] - 1) * 3 + (p[2] - 1);
    for f in 0..27 {
        let s = [f / 9, (f / 3) % 3, f % 3];
        for k in 0..3 {
            payoffs[k][f] = if s[k] == 2 { -10.0 } else { 0.0 };
        }
    }
    for (p, m) in CUBE {
        for k in 0..3 {
            payoffs[k][flat(p)] = m[k];
        }
    }
    payoffs[0][flat([3, 2, 1])] = 1.0;
    for k in 0..3 {
        payoffs[k][flat([3, 2, 3])] = 5.0;
    }
    let payoffs = payoffs
        .into_iter()
        .map(|t| t.into_iter().map(T::lit).collect())
        .collect();
    NormalFormGame::new(counts, payoffs)?.with_labels(labels(&[&["1", "2", "3"] as &[&str]; 3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_entries() {
        let c: NormalFormGame<f64> = fixture_game(&Fixture::Chicken).unwrap();
        assert_eq!(c.payoff_vector(&[0, 0]), vec![0.0, 0.0]);
        assert_eq!(c.payoff_vector(&[0, 1]), vec![7.0, 2.0]);
        assert_eq!(c.payoff_vector(&[1, 0]), vec![2.0, 7.0]);
        assert_eq!(c.payoff_vector(&[1, 1]), vec![6.0, 6.0]);
        let pd: NormalFormGame<f64> = fixture_game(&Fixture::PrisonersDilemma).unwrap();
        assert_eq!(pd.payoff_vector(&[0, 1]), vec![3.0, -1.0]);
        assert_eq!(pd.payoff_vector(&[1, 0]), vec![-1.0, 3.0]);
        assert_eq!(pd.payoff_vector(&[1, 1]), vec![2.0, 2.0]);
        let t2: NormalFormGame<f64> = fixture_game(&Fixture::table2()).unwrap();
        assert_eq!(t2.payoff(0, &[1, 2]), -100.0);
        assert_eq!(t2.payoff(1, &[2, 1]), -100.0);
    }

    #[test]
    fn names_parse() {
        assert_eq!("table2".parse::<Fixture>().unwrap(), Fixture::table2());
        assert_eq!(
            "table2(0.05, 20)".parse::<Fixture>().unwrap(),
            Fixture::Table2 {
                eps: 0.05,
                phi: 20.0
            }
        );
        assert_eq!(
            "exampleA4(0.2)".parse::<Fixture>().unwrap(),
            Fixture::ExampleA4 { eps: 0.2 }
        );
        assert!("nonsense".parse::<Fixture>().is_err());
        assert!("chicken(1)".parse::<Fixture>().is_err());
        for f in [Fixture::table2(), Fixture::Chicken, Fixture::Snowflake3p] {
            assert_eq!(f.to_string().parse::<Fixture>().unwrap(), f);
        }
    }

    #[test]
    fn example_games_have_stated_structure() {
        let a4: NormalFormGame<f64> = fixture_game(&Fixture::ExampleA4 { eps: 0.1 }).unwrap();
        assert!(a4.is_symmetric());
        let a5: NormalFormGame<f64> = fixture_game(&Fixture::ExampleA5 { eps: 0.1 }).unwrap();
        assert!(a5.is_zero_sum());
        assert_eq!(a5.strategy_counts(), &[3, 2]);
    }

    #[test]
    fn table2_parameter_guard() {
        assert!(fixture_game::<f64>(&Fixture::Table2 { eps: 0.1, phi: 1.0 }).is_err());
    }
}
