//! Perron eigendata of nonnegative matrices given as weighted context-graph
//! edges.
//!
//! The matrix is first balanced by a diagonal similarity built from max-plus
//! potentials, so that every scaled weight is at most one and the heaviest
//! cycles have weight exactly one. This keeps eigenvector entries within a
//! moderate range even when the raw weights span hundreds of orders of
//! magnitude. Lazy power iteration (`x ↦ A x + x`) then handles nearly
//! periodic matrices. Nearly reducible matrices, with two almost separate
//! dominant cycles as at large tilts, still have a tiny spectral gap. For
//! graphs with at most [`DENSE_LIMIT`] contexts those switch to Noda's
//! shifted inverse iteration, which converges regardless of the gap.

use crate::error::{Error, Result};
use crate::symbolic::{max_cycle_mean, ContextEdge};

pub const RELATIVE_TOLERANCE: f64 = 1e-14;
pub const MAX_ITERATIONS: usize = 100_000;
/// Residuals that stop improving below this level are rounding noise.
pub const PLATEAU_TOLERANCE: f64 = 1e-11;
const PLATEAU_WINDOW: usize = 64;
/// Largest context count for the dense fallback.
pub const DENSE_LIMIT: usize = 1024;
const POWER_ITERATIONS_BEFORE_FALLBACK: usize = 5_000;
const NODA_ITERATIONS: usize = 200;
/// Loosest Collatz–Wielandt bracket accepted from the fallback. Nearly
/// reducible matrices cannot be resolved more finely in double precision.
pub const NODA_ACCEPTANCE: f64 = 1e-8;

/// Which eigenvector of `Q[from][to] = exp(log_weight)` to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `Q x = λ x`: `x(from) = Σ_edges w x(to) / λ`.
    Right,
    /// `x Q = λ x`: `x(to) = Σ_edges x(from) w / λ`.
    Left,
}

#[derive(Debug, Clone)]
pub struct PerronData {
    pub log_eigenvalue: f64,
    /// Positive, summing to one; tiny entries may underflow to zero.
    pub vector: Vec<f64>,
    /// Logarithms of `vector`, finite even where `vector` underflows.
    pub log_vector: Vec<f64>,
    pub iterations: usize,
}

/// Arcs `(row, col)` of the matrix `a` with `(a x)_row = Σ a x_col`.
fn arcs(edges: &[ContextEdge], side: Side) -> Vec<(usize, usize)> {
    edges
        .iter()
        .map(|e| match side {
            Side::Right => (e.from, e.to),
            Side::Left => (e.to, e.from),
        })
        .collect()
}

/// Potentials `p` with `w + p[col] - p[row] ≤ μ` on every arc and, for
/// every row, an arc attaining the bound: `p[row]` is the longest path from
/// `row` to the critical node under `w - μ`, which has no positive cycles.
fn potentials(n: usize, arcs: &[(usize, usize)], log_weights: &[f64], mu: f64, critical: usize) -> Vec<f64> {
    let mut p = vec![f64::NEG_INFINITY; n];
    p[critical] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for (&(row, col), &w) in arcs.iter().zip(log_weights) {
            let cand = w - mu + p[col];
            if row != critical && cand > p[row] {
                p[row] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if p.iter().any(|v| !v.is_finite()) {
        return vec![0.0; n];
    }
    p
}

pub fn perron(n: usize, edges: &[ContextEdge], log_weights: &[f64], side: Side) -> Result<PerronData> {
    if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY)
        || !log_weights.iter().any(|w| w.is_finite())
    {
        return Err(Error::InvalidArgument("edge weights must be finite".into()));
    }
    let arcs = arcs(edges, side);
    let (mu, critical) = max_cycle_mean(n, &arcs, log_weights);
    if !mu.is_finite() {
        return Err(Error::InvalidArgument("weight matrix has no cycle of positive weight".into()));
    }
    let p = potentials(n, &arcs, log_weights, mu, critical);
    let weights: Vec<f64> = arcs
        .iter()
        .zip(log_weights)
        .map(|(&(row, col), &w)| (w - mu + p[col] - p[row]).exp())
        .collect();

    let (lambda, x, iterations) = scaled_perron(n, &arcs, &weights)?;
    let log_raw: Vec<f64> = x.iter().zip(&p).map(|(v, pi)| v.ln() + pi).collect();
    let top = log_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_norm = top + log_raw.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    let log_vector: Vec<f64> = log_raw.iter().map(|l| l - log_norm).collect();
    let vector = log_vector.iter().map(|l| l.exp()).collect();
    Ok(PerronData { log_eigenvalue: mu + lambda.ln(), vector, log_vector, iterations })
}

/// Perron root and vector of a balanced matrix by lazy power iteration,
/// falling back to Noda iteration for small graphs.
fn scaled_perron(n: usize, arcs: &[(usize, usize)], weights: &[f64]) -> Result<(f64, Vec<f64>, usize)> {
    let budget = if n <= DENSE_LIMIT { POWER_ITERATIONS_BEFORE_FALLBACK } else { MAX_ITERATIONS };
    let mut x = vec![1.0 / n as f64; n];
    let mut ax = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut plateau = Plateau::new();
    for it in 1..=budget {
        ax.iter_mut().for_each(|v| *v = 0.0);
        for (&(row, col), &w) in arcs.iter().zip(weights) {
            ax[row] += w * x[col];
        }
        let lambda: f64 = ax.iter().sum();
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::ConvergenceFailure { iterations: it, residual });
        }
        let scale = lambda + 1.0;
        residual = 0.0;
        for (a, xi) in ax.iter_mut().zip(x.iter_mut()) {
            let y = (*a + *xi) / scale;
            if y != *xi {
                residual = residual.max((y - *xi).abs() / y.max(*xi));
            }
            *xi = y;
        }
        if plateau.converged(residual) {
            if x.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::ConvergenceFailure { iterations: it, residual });
            }
            return Ok((lambda, x, it));
        }
    }
    if n > DENSE_LIMIT {
        return Err(Error::ConvergenceFailure { iterations: budget, residual });
    }
    noda(&dense(n, arcs, weights), x, budget)
}

/// Row-major `a` with `(a x)_row = Σ a[row][col] x_col`.
fn dense(n: usize, arcs: &[(usize, usize)], weights: &[f64]) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for (&(row, col), &w) in arcs.iter().zip(weights) {
        a[row][col] += w;
    }
    a
}

fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

/// The ratios `(a x)_i / x_i`, whose extremes bound the Perron root.
fn collatz_wielandt(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    mat_vec(a, x).iter().zip(x).map(|(ax, v)| ax / v).collect()
}

/// Solves `(σ I - a) y = x` for positive `x` and `σ = max_i r_i`, where `r`
/// holds the Collatz–Wielandt ratios of `x`. With `D = diag(x)` the matrix
/// `(σ I - a) D` has nonpositive off-diagonal entries and row sums
/// `x_i (σ - r_i) ≥ 0`, so elimination can rebuild each pivot from the row
/// sum and the off-diagonal magnitudes without any subtraction.
fn solve_shifted(a: &[Vec<f64>], x: &[f64], sigma: f64, ratios: &[f64]) -> Option<Vec<f64>> {
    let n = x.len();
    // c[i][j] = |off-diagonal entry| of the scaled matrix
    let mut c: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().zip(x).enumerate().map(|(j, (v, xj))| if i == j { 0.0 } else { v * xj }).collect())
        .collect();
    let mut sums: Vec<f64> = x.iter().zip(ratios).map(|(v, r)| v * (sigma - r).max(0.0)).collect();
    let mut rhs = x.to_vec();
    let mut diag = vec![0.0; n];
    for k in 0..n {
        let d = sums[k] + c[k][k + 1..].iter().sum::<f64>();
        if !(d > 0.0) {
            return None;
        }
        diag[k] = d;
        let (pivot_rows, rest) = c.split_at_mut(k + 1);
        let pivot = &pivot_rows[k];
        for (off, row) in rest.iter_mut().enumerate() {
            let i = k + 1 + off;
            if row[k] == 0.0 {
                continue;
            }
            let g = row[k] / d;
            for j in k + 1..n {
                if j != i {
                    row[j] += g * pivot[j];
                }
            }
            sums[i] += g * sums[k];
            rhs[i] += g * rhs[k];
        }
    }
    let mut z = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| c[k][j] * z[j]).sum();
        z[k] = (rhs[k] + s) / diag[k];
    }
    let y: Vec<f64> = z.iter().zip(x).map(|(zk, xk)| zk * xk).collect();
    y.iter().all(|v| v.is_finite() && *v > 0.0).then_some(y)
}

/// Noda iteration from a positive `x`: shift by the upper Collatz–Wielandt
/// bound, solve, renormalize, until the bounds meet. When rounding stops the
/// bracket from shrinking, the best iterate is kept if its bracket is within
/// [`NODA_ACCEPTANCE`]; the eigenvalue is then certified to that accuracy.
fn noda(a: &[Vec<f64>], start: Vec<f64>, done: usize) -> Result<(f64, Vec<f64>, usize)> {
    let n = start.len();
    let mut x = if start.iter().all(|v| *v > 0.0) { start } else { vec![1.0 / n as f64; n] };
    let mut best = (f64::INFINITY, x.clone());
    let mut lowest_hi = f64::INFINITY;
    let mut since = 0;
    let mut it = 0;
    while it < NODA_ITERATIONS {
        it += 1;
        let ratios = collatz_wielandt(a, &x);
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &r| (l.min(r), h.max(r)));
        let gap = (hi - lo) / hi;
        if gap <= RELATIVE_TOLERANCE {
            return Ok((mat_vec(a, &x).iter().sum(), x, done + it));
        }
        // the upper bound decreases monotonically in exact arithmetic, and
        // can still be falling while the gap reads as one
        let progress = gap < best.0 || hi < lowest_hi * (1.0 - 1e-15);
        lowest_hi = lowest_hi.min(hi);
        if gap < best.0 {
            best = (gap, x.clone());
        }
        if progress {
            since = 0;
        } else {
            since += 1;
            if since >= 3 {
                break;
            }
        }
        let Some(y) = solve_shifted(a, &x, hi, &ratios) else { break };
        let total: f64 = y.iter().sum();
        x = y.into_iter().map(|v| v / total).collect();
    }
    let (gap, x) = best;
    if gap <= NODA_ACCEPTANCE {
        log::debug!("perron: accepting eigenvector with relative bracket {gap:e} after {} iterations", done + it);
        return Ok((mat_vec(a, &x).iter().sum(), x, done + it));
    }
    Err(Error::ConvergenceFailure { iterations: done + it, residual: gap })
}

/// Tracks the best residual seen, to detect a rounding-level plateau.
struct Plateau {
    best: f64,
    since: usize,
}

impl Plateau {
    fn new() -> Self {
        Plateau { best: f64::INFINITY, since: 0 }
    }

    /// Below the tolerance, keeps polishing until the residual stops
    /// improving, so that slowly contracting iterations still end at
    /// rounding level rather than one tolerance away.
    fn converged(&mut self, residual: f64) -> bool {
        if residual <= f64::EPSILON {
            return true;
        }
        if residual < self.best {
            self.best = residual;
            self.since = 0;
        } else {
            self.since += 1;
        }
        if self.best <= RELATIVE_TOLERANCE {
            return self.since >= 3;
        }
        self.best <= PLATEAU_TOLERANCE && self.since >= PLATEAU_WINDOW
    }
}

/// Stationary vector `π = π P` of the row-stochastic kernel that moves from
/// context `to` to context `from` with probability `J(edge)`, refined from
/// `start` by lazy iteration.
pub fn stationary(n: usize, edges: &[ContextEdge], jacobian: &[f64], start: Vec<f64>) -> Result<Vec<f64>> {
    let arcs = arcs(edges, Side::Right);
    let mut x = start;
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut plateau = Plateau::new();
    let budget = if n <= DENSE_LIMIT { POWER_ITERATIONS_BEFORE_FALLBACK } else { MAX_ITERATIONS };
    for _ in 0..budget {
        y.copy_from_slice(&x);
        for (&(row, col), &j) in arcs.iter().zip(jacobian) {
            y[row] += j * x[col];
        }
        let s: f64 = y.iter().sum();
        residual = 0.0;
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi /= s;
            if *yi != *xi {
                residual = residual.max((*yi - xi).abs() / yi.max(*xi));
            }
        }
        std::mem::swap(&mut x, &mut y);
        if plateau.converged(residual) {
            return Ok(x);
        }
    }
    if n > DENSE_LIMIT {
        return Err(Error::ConvergenceFailure { iterations: budget, residual });
    }
    Ok(noda(&dense(n, &arcs, jacobian), x, budget)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{ContextGraph, SubshiftSpec};

    #[test]
    fn golden_mean_adjacency_root() {
        let g = ContextGraph::new(&SubshiftSpec::golden_mean(), 2).unwrap();
        let zeros = vec![0.0; g.edges().len()];
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        for side in [Side::Left, Side::Right] {
            let p = perron(g.context_count(), g.edges(), &zeros, side).unwrap();
            assert!((p.log_eigenvalue - phi.ln()).abs() < 1e-14);
            // eigenvector (φ, 1) normalised
            assert!((p.vector[0] / p.vector[1] - phi).abs() < 1e-12);
        }
    }

    #[test]
    fn nearly_reducible_matrix_uses_fallback() {
        // two heavy self-loops joined by very light edges
        let g = ContextGraph::new(&SubshiftSpec::full_shift(2).unwrap(), 2).unwrap();
        let w = [0.0, -16.0, -16.0, -1e-6];
        for side in [Side::Left, Side::Right] {
            let p = perron(2, g.edges(), &w, side).unwrap();
            assert!(p.iterations > POWER_ITERATIONS_BEFORE_FALLBACK);
            let (a, b, c, d) = (w[0].exp(), w[1].exp(), w[2].exp(), w[3].exp());
            let lambda = ((a + d) + ((a - d).powi(2) + 4.0 * b * c).sqrt()) / 2.0;
            assert!((p.log_eigenvalue - lambda.ln()).abs() < 1e-14);
            let x = &p.vector;
            let (q0, q1) = match side {
                Side::Right => (a * x[0] + b * x[1], c * x[0] + d * x[1]),
                Side::Left => (a * x[0] + c * x[1], b * x[0] + d * x[1]),
            };
            assert!((q0 / x[0] - lambda).abs() < 1e-13 && (q1 / x[1] - lambda).abs() < 1e-13);
        }
    }

    #[test]
    fn large_log_weights_do_not_overflow() {
        let g = ContextGraph::new(&SubshiftSpec::full_shift(2).unwrap(), 2).unwrap();
        let w = vec![800.0; 4];
        let p = perron(2, g.edges(), &w, Side::Right).unwrap();
        assert!((p.log_eigenvalue - (800.0 + 2f64.ln())).abs() < 1e-12);
    }
}
