//! The α-Rank Markov chain over a response graph and its stationary distribution.

use serde::{Deserialize, Serialize};

use super::PopulationMode;
use crate::error::{Error, Result};
use crate::game::NormalFormGame;
use crate::scalar::Scalar;

/// Sparse row-stochastic matrix over response-graph nodes.
///
/// Every node stores all of its deviation candidates (including zero-gain and
/// losing ones), so row `s` lists `Σ_l (|S^l| − 1)` off-diagonal entries in
/// multi-population mode and `n − 1` in single-population mode.
#[derive(Debug, Clone)]
pub struct MarkovChain<T> {
    pub alpha: T,
    pub m: usize,
    pub eta: T,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    deltas: Vec<T>,
    probs: Vec<T>,
    diag: Vec<T>,
    /// Sum of the off-diagonal entries of each row, kept separately so that the
    /// escape rate is never recovered by cancellation from the diagonal.
    out_rate: Vec<T>,
}

/// Fixation-style probability factor of the α-Rank chain for `x = α·Δ`.
pub(crate) fn rho<T: Scalar>(x: T, m: usize) -> T {
    let mf = T::from_usize_lossy(m);
    if x == T::zero() {
        return T::one() / mf;
    }
    if x > T::zero() {
        (-x).exp_m1() / (-(mf * x)).exp_m1()
    } else {
        let y = -x;
        (-(mf - T::one()) * y).exp() * ((-y).exp_m1() / (-(mf * y)).exp_m1())
    }
}

/// Natural log of [`rho`], finite whenever the true value is positive.
pub(crate) fn ln_rho<T: Scalar>(x: T, m: usize) -> T {
    let mf = T::from_usize_lossy(m);
    if x == T::zero() {
        return -mf.ln();
    }
    if x > T::zero() {
        ((-x).exp_m1() / (-(mf * x)).exp_m1()).ln()
    } else {
        let y = -x;
        -(mf - T::one()) * y + ((-y).exp_m1() / (-(mf * y)).exp_m1()).ln()
    }
}

/// Builds the α-Rank transition matrix for the given ranking intensity.
pub fn transition_matrix<T: Scalar>(
    game: &NormalFormGame<T>,
    mode: PopulationMode,
    alpha: T,
    m: usize,
) -> Result<MarkovChain<T>> {
    if !(alpha >= T::zero()) || !alpha.is_finite() {
        return Err(Error::invalid("alpha must be finite and nonnegative"));
    }
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    let mut offsets = vec![0usize];
    let mut cols = Vec::new();
    let mut deltas = Vec::new();
    let candidates;
    match mode {
        PopulationMode::Single => {
            super::check_single_population(game)?;
            let n = game.strategy_counts()[0];
            candidates = n - 1;
            for s in 0..n {
                for sigma in 0..n {
                    if sigma != s {
                        cols.push(sigma);
                        deltas.push(game.payoff(0, &[sigma, s]) - game.payoff(0, &[s, sigma]));
                    }
                }
                offsets.push(cols.len());
            }
        }
        PopulationMode::Multi => {
            let counts = game.strategy_counts();
            candidates = counts.iter().map(|&n| n - 1).sum();
            for flat in 0..game.num_profiles() {
                for (k, &nk) in counts.iter().enumerate() {
                    let cur = game.strategy_at(flat, k);
                    let base = game.payoff_flat(k, flat);
                    for sigma in 0..nk {
                        if sigma != cur {
                            let dev = game.deviate(flat, k, sigma);
                            cols.push(dev);
                            deltas.push(game.payoff_flat(k, dev) - base);
                        }
                    }
                }
                offsets.push(cols.len());
            }
        }
    }
    let eta = if candidates == 0 {
        T::zero()
    } else {
        T::one() / T::from_usize_lossy(candidates)
    };
    let probs: Vec<T> = deltas.iter().map(|&d| eta * rho(alpha * d, m)).collect();
    let n = offsets.len() - 1;
    let mut diag = Vec::with_capacity(n);
    let mut out_rate = Vec::with_capacity(n);
    for v in 0..n {
        let out = probs[offsets[v]..offsets[v + 1]]
            .iter()
            .fold(T::zero(), |a, &p| a + p);
        out_rate.push(out);
        diag.push(T::one() - out);
    }
    Ok(MarkovChain {
        alpha,
        m,
        eta,
        offsets,
        cols,
        deltas,
        probs,
        diag,
        out_rate,
    })
}

impl<T: Scalar> MarkovChain<T> {
    pub fn num_nodes(&self) -> usize {
        self.diag.len()
    }

    /// Off-diagonal entries of row `v` as `(column, probability)`.
    pub fn row(&self, v: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.probs[r].iter().copied())
    }

    pub fn diagonal(&self, v: usize) -> T {
        self.diag[v]
    }

    pub fn row_sum(&self, v: usize) -> T {
        self.row(v).fold(self.diag[v], |a, (_, p)| a + p)
    }

    /// Dense copy of the matrix (testing and small chains only).
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.num_nodes();
        let mut d = vec![vec![T::zero(); n]; n];
        for v in 0..n {
            d[v][v] = self.diag[v];
            for (c, p) in self.row(v) {
                d[v][c] += p;
            }
        }
        d
    }

    /// `‖πC − π‖₁`.
    pub fn residual(&self, pi: &[T]) -> T {
        let n = self.num_nodes();
        let mut next: Vec<T> = (0..n).map(|v| pi[v] * self.diag[v]).collect();
        for v in 0..n {
            for (c, p) in self.row(v) {
                next[c] += pi[v] * p;
            }
        }
        next.iter()
            .zip(pi)
            .fold(T::zero(), |a, (&x, &y)| a + (x - y).abs())
    }
}

/// How to compute a stationary distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StationaryMethod {
    /// Dense elimination up to `dense_limit` nodes, iterative above.
    Auto { dense_limit: usize },
    /// Grassmann–Taqqu–Heyman state reduction on a dense copy.
    Dense,
    /// Under-relaxed Gauss–Seidel sweeps with an L1 stopping rule on successive iterates.
    Iterative { tol: f64, max_iterations: usize },
}

impl Default for StationaryMethod {
    fn default() -> Self {
        StationaryMethod::Auto { dense_limit: 2000 }
    }
}

const ITERATIVE_TOL: f64 = 1e-12;
const ITERATIVE_MAX: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct StationaryResult<T> {
    pub distribution: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

/// Stationary distribution `π` with `πC = π` and `Σπ = 1`.
pub fn stationary_distribution<T: Scalar>(
    chain: &MarkovChain<T>,
    method: StationaryMethod,
    warm_start: Option<&[T]>,
) -> Result<StationaryResult<T>> {
    let n = chain.num_nodes();
    if n == 1 {
        return Ok(StationaryResult {
            distribution: vec![T::one()],
            residual: T::zero(),
            iterations: 0,
        });
    }
    let (distribution, iterations) = match method {
        StationaryMethod::Dense => (dense_solve(chain), 0),
        StationaryMethod::Auto { dense_limit } if n <= dense_limit => (dense_solve(chain), 0),
        StationaryMethod::Auto { .. } => {
            gauss_seidel(chain, T::lit(ITERATIVE_TOL), ITERATIVE_MAX, warm_start)?
        }
        StationaryMethod::Iterative {
            tol,
            max_iterations,
        } => gauss_seidel(chain, T::lit(tol), max_iterations, warm_start)?,
    };
    if distribution.iter().any(|x| !x.is_finite()) {
        return Err(Error::numerical(
            "stationary distribution is not finite",
            f64::NAN,
        ));
    }
    let residual = chain.residual(&distribution);
    Ok(StationaryResult {
        distribution,
        residual,
        iterations,
    })
}

fn all_finite<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn dense_solve<T: Scalar>(chain: &MarkovChain<T>) -> Vec<T> {
    // Masses spanning more than the float range overflow the linear pass.
    gth_linear(chain)
        .filter(|pi| all_finite(pi))
        .unwrap_or_else(|| gth_log(chain))
}

/// Log-probabilities of each row's off-diagonal entries, in CSR order.
fn log_probs<T: Scalar>(chain: &MarkovChain<T>) -> Vec<T> {
    let eta_ln = chain.eta.ln();
    chain
        .deltas
        .iter()
        .map(|&d| eta_ln + ln_rho(chain.alpha * d, chain.m))
        .collect()
}

/// GTH state reduction. Returns `None` when an escape rate underflows, in which
/// case the log-domain variant must be used.
fn gth_linear<T: Scalar>(chain: &MarkovChain<T>) -> Option<Vec<T>> {
    let n = chain.num_nodes();
    let mut p = vec![T::zero(); n * n];
    for v in 0..n {
        for (c, pr) in chain.row(v) {
            p[v * n + c] += pr;
        }
    }
    let floor = T::min_positive_value().sqrt();
    for k in (1..n).rev() {
        let s = p[k * n..k * n + k].iter().fold(T::zero(), |a, &x| a + x);
        if !(s > floor) {
            return None;
        }
        let (head, tail) = p.split_at_mut(k * n);
        let row_k = &tail[..k];
        for i in 0..k {
            head[i * n + k] /= s;
            let pik = head[i * n + k];
            if pik == T::zero() {
                continue;
            }
            for (x, &y) in head[i * n..i * n + k].iter_mut().zip(row_k) {
                *x += pik * y;
            }
        }
    }
    let mut pi = vec![T::zero(); n];
    pi[0] = T::one();
    for j in 1..n {
        let mut acc = T::zero();
        for i in 0..j {
            acc += pi[i] * p[i * n + j];
        }
        pi[j] = acc;
    }
    normalize(&mut pi);
    Some(pi)
}

fn log_add<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// GTH state reduction carried out on log-probabilities; it involves only sums
/// and products, so nothing underflows.
fn gth_log<T: Scalar>(chain: &MarkovChain<T>) -> Vec<T> {
    let n = chain.num_nodes();
    let mut p = vec![T::neg_infinity(); n * n];
    let lp = log_probs(chain);
    for v in 0..n {
        for e in chain.offsets[v]..chain.offsets[v + 1] {
            let c = chain.cols[e];
            p[v * n + c] = log_add(p[v * n + c], lp[e]);
        }
    }
    for k in (1..n).rev() {
        let s = p[k * n..k * n + k]
            .iter()
            .fold(T::neg_infinity(), |a, &x| log_add(a, x));
        for i in 0..k {
            p[i * n + k] -= s;
        }
        for i in 0..k {
            let pik = p[i * n + k];
            if pik == T::neg_infinity() {
                continue;
            }
            for j in 0..k {
                let y = p[k * n + j];
                if y != T::neg_infinity() {
                    p[i * n + j] = log_add(p[i * n + j], pik + y);
                }
            }
        }
    }
    let mut lpi = vec![T::neg_infinity(); n];
    lpi[0] = T::zero();
    for j in 1..n {
        let mut acc = T::neg_infinity();
        for i in 0..j {
            acc = log_add(acc, lpi[i] + p[i * n + j]);
        }
        lpi[j] = acc;
    }
    let top = lpi.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let mut pi: Vec<T> = lpi.iter().map(|&l| (l - top).exp()).collect();
    normalize(&mut pi);
    pi
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let total = v.iter().fold(T::zero(), |a, &x| a + x);
    for x in v.iter_mut() {
        *x /= total;
    }
}

/// Gauss–Seidel on the balance equations `π_j · out_j = Σ_{i≠j} π_i C_ij`,
/// repeated in the log domain if the linear iterate stops being finite.
///
/// Each update is averaged with the old value (SOR with ω = 1/2). Plain
/// sweeps can cycle forever on periodic structure; under-relaxation with
/// ω < 1 converges for irreducible chains.
fn gauss_seidel<T: Scalar>(
    chain: &MarkovChain<T>,
    tol: T,
    max_iterations: usize,
    warm_start: Option<&[T]>,
) -> Result<(Vec<T>, usize)> {
    let incoming = Incoming::new(chain);
    match gauss_seidel_linear(chain, &incoming, tol, max_iterations, warm_start)? {
        Some(done) => Ok(done),
        None => gauss_seidel_log(chain, &incoming, tol, max_iterations),
    }
}

/// Incoming edges of every node in CSC form, as indices into the CSR arrays.
struct Incoming {
    start: Vec<usize>,
    src: Vec<usize>,
    edge: Vec<usize>,
}

impl Incoming {
    fn new<T: Scalar>(chain: &MarkovChain<T>) -> Self {
        let n = chain.num_nodes();
        let mut start = vec![0usize; n + 1];
        for &c in &chain.cols {
            start[c + 1] += 1;
        }
        for j in 0..n {
            start[j + 1] += start[j];
        }
        let mut fill = start.clone();
        let mut src = vec![0usize; chain.cols.len()];
        let mut edge = vec![0usize; chain.cols.len()];
        for v in 0..n {
            for e in chain.offsets[v]..chain.offsets[v + 1] {
                let c = chain.cols[e];
                src[fill[c]] = v;
                edge[fill[c]] = e;
                fill[c] += 1;
            }
        }
        Incoming { start, src, edge }
    }
}

fn not_converged<T: Scalar>(chain: &MarkovChain<T>, pi: &[T], max_iterations: usize) -> Error {
    Error::numerical(
        format!("stationary solve did not converge in {max_iterations} iterations"),
        chain.residual(pi).to_f64_lossy(),
    )
}

/// Returns `Ok(None)` when the iterate overflows or vanishes.
fn gauss_seidel_linear<T: Scalar>(
    chain: &MarkovChain<T>,
    incoming: &Incoming,
    tol: T,
    max_iterations: usize,
    warm_start: Option<&[T]>,
) -> Result<Option<(Vec<T>, usize)>> {
    let n = chain.num_nodes();
    let mut pi: Vec<T> = match warm_start {
        Some(w) if w.len() == n && all_finite(w) => w.to_vec(),
        _ => vec![T::one() / T::from_usize_lossy(n); n],
    };
    let mut prev = pi.clone();
    let half = T::lit(0.5);
    for it in 1..=max_iterations {
        for j in 0..n {
            let mut acc = T::zero();
            for e in incoming.start[j]..incoming.start[j + 1] {
                acc += pi[incoming.src[e]] * chain.probs[incoming.edge[e]];
            }
            let out = chain.out_rate[j];
            if out > T::zero() {
                pi[j] = (pi[j] + acc / out) * half;
            }
        }
        let total = pi.iter().fold(T::zero(), |a, &x| a + x);
        if !(total > T::zero()) || !total.is_finite() || !all_finite(&pi) {
            return Ok(None);
        }
        normalize(&mut pi);
        let change = crate::scalar::l1_distance(&pi, &prev);
        if change < tol {
            return Ok(Some((pi, it)));
        }
        prev.copy_from_slice(&pi);
    }
    Err(not_converged(chain, &pi, max_iterations))
}

/// Same sweep on log-masses; every quantity stays finite.
fn gauss_seidel_log<T: Scalar>(
    chain: &MarkovChain<T>,
    incoming: &Incoming,
    tol: T,
    max_iterations: usize,
) -> Result<(Vec<T>, usize)> {
    let n = chain.num_nodes();
    let lp = log_probs(chain);
    let ln_out: Vec<T> = (0..n)
        .map(|v| {
            lp[chain.offsets[v]..chain.offsets[v + 1]]
                .iter()
                .fold(T::neg_infinity(), |a, &x| log_add(a, x))
        })
        .collect();
    let mut lpi = vec![-T::from_usize_lossy(n).ln(); n];
    let mut prev = vec![T::one() / T::from_usize_lossy(n); n];
    let mut pi = prev.clone();
    let two = T::lit(2.0);
    for it in 1..=max_iterations {
        for j in 0..n {
            let r = incoming.start[j]..incoming.start[j + 1];
            if r.is_empty() || ln_out[j] == T::neg_infinity() {
                continue;
            }
            let terms = r.map(|e| lpi[incoming.src[e]] + lp[incoming.edge[e]]);
            let top = terms.clone().fold(T::neg_infinity(), |a, b| a.max(b));
            if top == T::neg_infinity() {
                lpi[j] = top;
                continue;
            }
            let sum = terms.fold(T::zero(), |a, t| a + (t - top).exp());
            lpi[j] = log_add(lpi[j], top + sum.ln() - ln_out[j]) - two.ln();
        }
        let top = lpi.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        let lse = top + lpi.iter().fold(T::zero(), |a, &l| a + (l - top).exp()).ln();
        for (p, l) in pi.iter_mut().zip(lpi.iter_mut()) {
            *l -= lse;
            *p = l.exp();
        }
        if crate::scalar::l1_distance(&pi, &prev) < tol {
            return Ok((pi, it));
        }
        prev.copy_from_slice(&pi);
    }
    Err(not_converged(chain, &pi, max_iterations))
}
