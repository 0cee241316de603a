//! Support enumeration for two-player games.

use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixEquilibrium<T> {
    pub row: Vec<T>,
    pub col: Vec<T>,
    pub row_value: T,
    pub col_value: T,
    /// Support pairs examined before this equilibrium was found.
    pub supports_tried: usize,
}

/// Lexicographic `s`-subsets of `0..n`.
pub(crate) fn combinations(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if s == 0 || s > n {
        return out;
    }
    let mut c: Vec<usize> = (0..s).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..s).rev().find(|&i| c[i] < n - s + i) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..s {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Solves a possibly non-square linear system by Gaussian elimination with
/// partial pivoting. Free variables are set to zero; `None` if inconsistent.
fn solve_linear<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let eps = T::lit(1e-12);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).expect("finite"))?;
        if a[p][c].abs() <= eps {
            continue;
        }
        a.swap(r, p);
        b.swap(r, p);
        for i in 0..rows {
            if i != r {
                let f = a[i][c] / a[r][c];
                if f != T::zero() {
                    for k in c..cols {
                        let v = a[r][k];
                        a[i][k] -= f * v;
                    }
                    let v = b[r];
                    b[i] -= f * v;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if (r..rows).any(|i| b[i].abs() > T::lit(1e-9)) {
        return None;
    }
    let mut x = vec![T::zero(); cols];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = b[i] / a[i][c];
    }
    Some(x)
}

/// Mixed strategy on `support` for the player whose opponent's payoff matrix
/// is `opp` (indexed `[own][other]`), making every strategy of `other_support`
/// indifferent. Returns the strategy (full length) and the opponent's value.
fn indifference<T: Scalar>(
    opp: &dyn Fn(usize, usize) -> T,
    support: &[usize],
    other_support: &[usize],
    n_own: usize,
) -> Option<(Vec<T>, T)> {
    let s = support.len();
    let mut a = Vec::with_capacity(other_support.len() + 1);
    let mut b = Vec::with_capacity(other_support.len() + 1);
    for &o in other_support {
        let mut row: Vec<T> = support.iter().map(|&i| opp(i, o)).collect();
        row.push(-T::one());
        a.push(row);
        b.push(T::zero());
    }
    let mut row = vec![T::one(); s];
    row.push(T::zero());
    a.push(row);
    b.push(T::one());
    let sol = solve_linear(a, b)?;
    let tol = T::lit(1e-9);
    let mut full = vec![T::zero(); n_own];
    for (k, &i) in support.iter().enumerate() {
        if sol[k] <= tol {
            return None;
        }
        full[i] = sol[k];
    }
    Some((full, sol[s]))
}

/// Checks that no strategy of the responding player does better than `value`.
fn no_better_reply<T: Scalar>(
    payoff: &dyn Fn(usize, usize) -> T,
    mix: &[T],
    n_reply: usize,
    value: T,
) -> bool {
    let tol = T::lit(1e-9);
    (0..n_reply).all(|r| {
        let v = mix
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &p)| acc + p * payoff(r, i));
        v <= value + tol
    })
}

struct Enumerator<'g, T> {
    game: &'g NormalFormGame<T>,
    n: usize,
    m: usize,
    tried: usize,
}

impl<T: Scalar> Enumerator<'_, T> {
    fn a(&self, i: usize, j: usize) -> T {
        self.game.tensor(0)[i * self.m + j]
    }

    fn b(&self, i: usize, j: usize) -> T {
        self.game.tensor(1)[i * self.m + j]
    }

    fn try_pair(&mut self, rows: &[usize], cols: &[usize]) -> Option<BimatrixEquilibrium<T>> {
        self.tried += 1;
        // Column mix makes the row player's support indifferent, and vice versa.
        let (y, v) = indifference(&|j, i| self.a(i, j), cols, rows, self.m)?;
        let (x, u) = indifference(&|i, j| self.b(i, j), rows, cols, self.n)?;
        if !no_better_reply(&|i, j| self.a(i, j), &y, self.n, v) {
            return None;
        }
        if !no_better_reply(&|j, i| self.b(i, j), &x, self.m, u) {
            return None;
        }
        Some(BimatrixEquilibrium {
            row: x,
            col: y,
            row_value: v,
            col_value: u,
            supports_tried: self.tried,
        })
    }

    fn try_symmetric(&mut self, support: &[usize]) -> Option<BimatrixEquilibrium<T>> {
        self.tried += 1;
        let (y, v) = indifference(&|j, i| self.a(i, j), support, support, self.m)?;
        if !no_better_reply(&|i, j| self.a(i, j), &y, self.n, v) {
            return None;
        }
        Some(BimatrixEquilibrium {
            row: y.clone(),
            col: y,
            row_value: v,
            col_value: v,
            supports_tried: self.tried,
        })
    }
}

fn enumerator<T: Scalar>(game: &NormalFormGame<T>) -> Result<Enumerator<'_, T>> {
    if game.num_players() != 2 {
        return Err(Error::UnsupportedGame(
            "support enumeration needs two players".into(),
        ));
    }
    Ok(Enumerator {
        game,
        n: game.strategy_counts()[0],
        m: game.strategy_counts()[1],
        tried: 0,
    })
}

/// First equilibrium in order of support size, then lexicographic supports.
/// Equal-size support pairs are tried first, unequal pairs after that (needed
/// only for degenerate games). With `symmetric`, only symmetric equilibria of
/// a symmetric game are searched.
pub fn first_equilibrium<T: Scalar>(
    game: &NormalFormGame<T>,
    max_support: usize,
    symmetric: bool,
) -> Result<BimatrixEquilibrium<T>> {
    let mut e = enumerator(game)?;
    let (n, m) = (e.n, e.m);
    if symmetric {
        for s in 1..=max_support.min(n) {
            for sup in combinations(n, s) {
                if let Some(eq) = e.try_symmetric(&sup) {
                    return Ok(eq);
                }
            }
        }
    } else {
        for s in 1..=max_support.min(n).min(m) {
            for rows in combinations(n, s) {
                for cols in combinations(m, s) {
                    if let Some(eq) = e.try_pair(&rows, &cols) {
                        return Ok(eq);
                    }
                }
            }
        }
        for s in 1..=max_support.min(n) {
            for t in 1..=max_support.min(m) {
                if s == t {
                    continue;
                }
                for rows in combinations(n, s) {
                    for cols in combinations(m, t) {
                        if let Some(eq) = e.try_pair(&rows, &cols) {
                            return Ok(eq);
                        }
                    }
                }
            }
        }
    }
    Err(Error::numerical(
        format!("no equilibrium with support size at most {max_support}"),
        f64::NAN,
    ))
}

/// Every equilibrium with equal-size supports up to `max_support`, in
/// enumeration order. Complete for nondegenerate games.
pub fn all_equilibria<T: Scalar>(
    game: &NormalFormGame<T>,
    max_support: usize,
) -> Result<Vec<BimatrixEquilibrium<T>>> {
    let mut e = enumerator(game)?;
    let (n, m) = (e.n, e.m);
    let mut out = Vec::new();
    for s in 1..=max_support.min(n).min(m) {
        for rows in combinations(n, s) {
            for cols in combinations(m, s) {
                if let Some(eq) = e.try_pair(&rows, &cols) {
                    out.push(eq);
                }
            }
        }
    }
    Ok(out)
}
