//! Minimax LP for two-player zero-sum matrix games, solved with a dense
//! tableau simplex under Bland's rule.

use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGameSolution<T> {
    pub row: Vec<T>,
    pub col: Vec<T>,
    /// Game value for the row player.
    pub value: T,
    pub pivots: usize,
}

/// Optimal strategies of a two-player zero-sum game (row player's payoffs are tensor 0).
pub fn solve_matrix_game<T: Scalar>(game: &NormalFormGame<T>) -> Result<MatrixGameSolution<T>> {
    if game.num_players() != 2 {
        return Err(Error::UnsupportedGame(
            "matrix game needs two players".into(),
        ));
    }
    let (n, m) = (game.strategy_counts()[0], game.strategy_counts()[1]);
    let a = game.tensor(0);
    let min = a.iter().copied().fold(T::infinity(), T::min);
    let shift = T::one() - min;
    let tol = T::lit(1e-9);

    // Column player: maximize Σw subject to (A + shift) w ≤ 1, w ≥ 0.
    // Tableau columns: w (m), slacks (n), rhs. Last row is the objective.
    let width = m + n + 1;
    let mut t = vec![T::zero(); (n + 1) * width];
    for i in 0..n {
        for j in 0..m {
            t[i * width + j] = a[i * m + j] + shift;
        }
        t[i * width + m + i] = T::one();
        t[i * width + width - 1] = T::one();
    }
    for j in 0..m {
        t[n * width + j] = -T::one();
    }
    let mut basis: Vec<usize> = (m..m + n).collect();

    let mut pivots = 0usize;
    let max_pivots = 50 * (n + m) * (n + m) + 1000;
    while let Some(enter) = (0..m + n).find(|&j| t[n * width + j] < -tol) {
        let mut leave: Option<(usize, T)> = None;
        for i in 0..n {
            let coef = t[i * width + enter];
            if coef > tol {
                let ratio = t[i * width + width - 1] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - tol
                            || ((ratio - best).abs() <= tol && basis[i] < basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::numerical("LP is unbounded", f64::INFINITY));
        };
        pivot(&mut t, width, n + 1, r, enter);
        basis[r] = enter;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::numerical("simplex pivot limit reached", f64::NAN));
        }
    }

    let mut w = vec![T::zero(); m];
    for (i, &b) in basis.iter().enumerate() {
        if b < m {
            w[b] = t[i * width + width - 1];
        }
    }
    let u: Vec<T> = (0..n).map(|i| t[n * width + m + i]).collect();
    let col = normalize(w)?;
    let row = normalize(u)?;
    let value = t[n * width + width - 1].recip() - shift;
    Ok(MatrixGameSolution {
        row,
        col,
        value,
        pivots,
    })
}

fn pivot<T: Scalar>(t: &mut [T], width: usize, rows: usize, r: usize, c: usize) {
    let p = t[r * width + c];
    for x in &mut t[r * width..(r + 1) * width] {
        *x /= p;
    }
    let (before, rest) = t.split_at_mut(r * width);
    let (prow, after) = rest.split_at_mut(width);
    let eliminate = |row: &mut [T]| {
        let f = row[c];
        if f != T::zero() {
            for (x, &y) in row.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            row[c] = T::zero();
        }
    };
    before.chunks_mut(width).for_each(&eliminate);
    after
        .chunks_mut(width)
        .take(rows - r - 1)
        .for_each(&eliminate);
}

fn normalize<T: Scalar>(mut v: Vec<T>) -> Result<Vec<T>> {
    for x in &mut v {
        if *x < T::zero() {
            *x = T::zero();
        }
    }
    let s = crate::scalar::sum(&v);
    if s <= T::zero() || !s.is_finite() {
        return Err(Error::numerical(
            "LP returned a degenerate solution",
            s.to_f64_lossy(),
        ));
    }
    Ok(v.into_iter().map(|x| x / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_sum(n: usize, m: usize, a: Vec<f64>) -> NormalFormGame<f64> {
        let b = a.iter().map(|x| -x).collect();
        let _ = (n, m);
        NormalFormGame::new(vec![n, m], vec![a, b]).unwrap()
    }

    #[test]
    fn two_by_two_closed_form() {
        let g = zero_sum(2, 2, vec![2.0, -1.0, -1.0, 1.0]);
        let s = solve_matrix_game(&g).unwrap();
        assert!(
            (s.row[0] - 0.4).abs() < 1e-12 && (s.row[1] - 0.6).abs() < 1e-12,
            "{:?}",
            s.row
        );
        assert!((s.value - 0.2).abs() < 1e-12);
    }

    #[test]
    fn rock_paper_scissors() {
        let g = zero_sum(3, 3, vec![0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0]);
        let s = solve_matrix_game(&g).unwrap();
        for p in s.row.iter().chain(&s.col) {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(s.value.abs() < 1e-12);
    }

    #[test]
    fn rectangular_with_dominated_rows() {
        // Row 2 is dominated; optimal play mixes rows 0 and 1 against 3 columns.
        let g = zero_sum(3, 3, vec![3.0, -2.0, 0.5, -1.0, 2.0, 0.0, -5.0, -5.0, -5.0]);
        let s = solve_matrix_game(&g).unwrap();
        let a = g.tensor(0);
        for j in 0..3 {
            let v: f64 = (0..3).map(|i| s.row[i] * a[i * 3 + j]).sum();
            assert!(v >= s.value - 1e-9);
        }
        for i in 0..3 {
            let v: f64 = (0..3).map(|j| s.col[j] * a[i * 3 + j]).sum();
            assert!(v <= s.value + 1e-9);
        }
    }
}
