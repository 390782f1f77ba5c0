// SPDX-License-Identifier: Apache-2.0

//! Dominant left eigenvectors of the transition matrix `M = D⁻¹A`.
//!
//! `M` is similar to the symmetric `S = D^{-1/2} A D^{-1/2}`: if `Sw = λw`
//! then `u = D^{1/2}w` satisfies `uᵀM = λuᵀ`. Eigenpairs of `S` are found one
//! at a time, largest algebraic eigenvalue first, by restarted Lanczos runs
//! that are kept orthogonal to every vector already accepted. The first pair
//! is known in closed form: `w ∝ √d` with `λ = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, hash_unit};
use crate::walk::WalkModel;

pub const MAX_ITERATIONS: usize = 10_000;
const MAX_KRYLOV: usize = 200;
const CHECK_EVERY: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Unit 2-norm, largest-magnitude entry positive.
    pub left_eigenvectors: Vec<Vec<f64>>,
    /// `‖Mᵀuᵢ − λᵢuᵢ‖₂`.
    pub residuals: Vec<f64>,
    /// Orthonormal eigenvectors of `S` matching `left_eigenvectors`.
    pub symmetric_vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// Residual bound on `M`, multiplied by the node count.
    pub tolerance_per_node: f64,
    pub max_iterations: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tolerance_per_node: 1e-10,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

/// The `p` dominant left eigenvectors, truncated to `N` when `p > N`.
pub fn dominant_left_eigenvectors(model: &WalkModel<'_>, p: usize) -> Result<SpectralBasis> {
    dominant_left_eigenvectors_with(model, p, SpectralOptions::default())
}

pub fn dominant_left_eigenvectors_with(
    model: &WalkModel<'_>,
    p: usize,
    options: SpectralOptions,
) -> Result<SpectralBasis> {
    if p == 0 {
        return Err(Error::Config(
            "number of eigenvectors must be at least 1".into(),
        ));
    }
    let op = SymmetricOperator::new(model);
    let n = op.n;
    let p = p.min(n);
    let tolerance = options.tolerance_per_node * n as f64;
    let d_min = model
        .degrees()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let d_max = model.degrees().iter().copied().fold(0.0, f64::max);
    // ‖res_M‖ ≤ √(d_max/d_min) ‖res_S‖ for unit w.
    let sym_tolerance = tolerance / (d_max / d_min).sqrt();

    let mut found: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut first: Vec<f64> = op.sqrt_d.clone();
    normalize(&mut first);
    found.push(first);

    for index in 1..p {
        let w = lanczos_next(&op, &found, index, sym_tolerance, options.max_iterations)?;
        found.push(w);
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = found
        .into_iter()
        .map(|w| (numeric::dot(&w, &op.apply(&w)), w))
        .collect();
    // Deflation already yields descending order; the sort is stable and only
    // settles rounding-level swaps. The stationary pair stays first even when
    // λ = 1 is repeated (disconnected graphs).
    pairs[1..].sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut basis = SpectralBasis {
        eigenvalues: Vec::with_capacity(p),
        left_eigenvectors: Vec::with_capacity(p),
        residuals: Vec::with_capacity(p),
        symmetric_vectors: Vec::with_capacity(p),
    };
    for (index, (lambda, mut w)) in pairs.into_iter().enumerate() {
        let mut u: Vec<f64> = w.iter().zip(&op.sqrt_d).map(|(x, s)| x * s).collect();
        normalize(&mut u);
        if sign_flip_needed(&u) {
            u.iter_mut().for_each(|x| *x = -*x);
            w.iter_mut().for_each(|x| *x = -*x);
        }
        let residual = left_residual(model, &u, lambda);
        if residual > tolerance {
            return Err(Error::NoConvergence {
                index,
                residual,
                tolerance,
            });
        }
        basis.eigenvalues.push(lambda);
        basis.left_eigenvectors.push(u);
        basis.residuals.push(residual);
        basis.symmetric_vectors.push(w);
    }
    Ok(basis)
}

/// `‖Mᵀu − λu‖₂`.
pub fn left_residual(model: &WalkModel<'_>, u: &[f64], lambda: f64) -> f64 {
    let scaled: Vec<f64> = u.iter().zip(model.degrees()).map(|(x, d)| x / d).collect();
    let g = model.graph();
    let mut acc = numeric::CompensatedSum::new();
    for (j, &uj) in u.iter().enumerate() {
        let (cols, ws) = g.neighbors(j);
        let mtu: f64 = cols.iter().zip(ws).map(|(&i, &w)| w * scaled[i]).sum();
        let r = mtu - lambda * uj;
        acc.add(r * r);
    }
    acc.value().sqrt()
}

/// The entry of largest magnitude must be positive; near-ties go to the
/// lowest index.
fn sign_flip_needed(u: &[f64]) -> bool {
    let max = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    u.iter()
        .find(|x| x.abs() >= max * (1.0 - 1e-9))
        .is_some_and(|x| *x < 0.0)
}

struct SymmetricOperator<'a> {
    model: &'a WalkModel<'a>,
    sqrt_d: Vec<f64>,
    inv_sqrt_d: Vec<f64>,
    n: usize,
}

impl<'a> SymmetricOperator<'a> {
    fn new(model: &'a WalkModel<'a>) -> Self {
        let sqrt_d: Vec<f64> = model.degrees().iter().map(|d| d.sqrt()).collect();
        let inv_sqrt_d = sqrt_d.iter().map(|s| 1.0 / s).collect();
        Self {
            model,
            n: sqrt_d.len(),
            sqrt_d,
            inv_sqrt_d,
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let g = self.model.graph();
        (0..self.n)
            .map(|i| {
                let (cols, ws) = g.neighbors(i);
                let acc: f64 = cols
                    .iter()
                    .zip(ws)
                    .map(|(&j, &w)| w * x[j] * self.inv_sqrt_d[j])
                    .sum();
                acc * self.inv_sqrt_d[i]
            })
            .collect()
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = numeric::norm2(x);
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Two passes of classical Gram-Schmidt against `basis`.
fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = numeric::dot(x, b);
            x.iter_mut().zip(b).for_each(|(v, bv)| *v -= c * bv);
        }
    }
}

/// Deterministic start for the `index`-th vector: ones plus an index ramp
/// plus a hashed perturbation that differs per vector and attempt.
fn start_vector(n: usize, index: usize, attempt: usize) -> Vec<f64> {
    let salt = (index as u64) << 16 | attempt as u64;
    (0..n)
        .map(|j| 1.0 + (j + 1) as f64 / n as f64 + 0.5 * hash_unit(salt, j as u64))
        .collect()
}

fn lanczos_next(
    op: &SymmetricOperator<'_>,
    found: &[Vec<f64>],
    index: usize,
    tolerance: f64,
    max_iterations: usize,
) -> Result<Vec<f64>> {
    let n = op.n;
    let complement = n - found.len();

    let mut x = Vec::new();
    for attempt in 0..16 {
        x = start_vector(n, index, attempt);
        orthogonalize(&mut x, found);
        if normalize(&mut x) > 1e-6 {
            break;
        }
    }

    let mut iterations = 0;
    let mut best_residual = f64::INFINITY;
    loop {
        let krylov = complement.min(MAX_KRYLOV);
        let mut q: Vec<Vec<f64>> = vec![x.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut ritz = (0.0, vec![1.0]);

        for k in 0..krylov {
            let mut w = op.apply(&q[k]);
            let alpha = numeric::dot(&w, &q[k]);
            for (v, qk) in w.iter_mut().zip(&q[k]) {
                *v -= alpha * qk;
            }
            if k > 0 {
                let beta = betas[k - 1];
                for (v, qp) in w.iter_mut().zip(&q[k - 1]) {
                    *v -= beta * qp;
                }
            }
            orthogonalize(&mut w, found);
            orthogonalize(&mut w, &q);
            alphas.push(alpha);
            iterations += 1;
            let beta = numeric::norm2(&w);

            let exhausted = k + 1 == krylov || beta <= 1e-13;
            if exhausted || (k + 1) % CHECK_EVERY == 0 || iterations >= max_iterations {
                ritz = tridiagonal_top_eigenpair(&alphas, &betas);
                let estimate = beta * ritz.1.last().unwrap().abs();
                if exhausted || estimate <= 0.1 * tolerance || iterations >= max_iterations {
                    break;
                }
            }
            betas.push(beta);
            w.iter_mut().for_each(|v| *v /= beta);
            q.push(w);
        }

        let mut candidate = vec![0.0; n];
        for (coef, qk) in ritz.1.iter().zip(&q) {
            candidate
                .iter_mut()
                .zip(qk)
                .for_each(|(c, v)| *c += coef * v);
        }
        orthogonalize(&mut candidate, found);
        normalize(&mut candidate);

        let sx = op.apply(&candidate);
        let lambda = numeric::dot(&candidate, &sx);
        let residual = numeric::norm2(
            &sx.iter()
                .zip(&candidate)
                .map(|(a, b)| a - lambda * b)
                .collect::<Vec<_>>(),
        );
        best_residual = best_residual.min(residual);
        if residual <= tolerance {
            return Ok(candidate);
        }
        if iterations >= max_iterations {
            return Err(Error::NoConvergence {
                index,
                residual: best_residual,
                tolerance,
            });
        }
        x = candidate;
    }
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta` (bisection on Sturm counts), with a unit
/// eigenvector from inverse iteration.
fn tridiagonal_top_eigenpair(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    if m == 1 {
        return (alpha[0], vec![1.0]);
    }
    let off = |i: usize| if i < beta.len() { beta[i].abs() } else { 0.0 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, &a) in alpha.iter().enumerate() {
        let r = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(a - r);
        hi = hi.max(a + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| {
        let mut count = 0;
        let mut q = alpha[0] - x;
        for i in 0..m {
            if i > 0 {
                let b = beta[i - 1];
                q = alpha[i] - x - b * b / q;
            }
            if q == 0.0 {
                q = -f64::EPSILON * scale;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    // Top eigenvalue: smallest x with count_below(x) == m.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = hi;

    let mut y = vec![1.0; m];
    normalize(&mut y);
    let shift = theta + 4.0 * f64::EPSILON * scale;
    for _ in 0..3 {
        y = solve_shifted_tridiagonal(alpha, beta, shift, &y, scale);
        normalize(&mut y);
    }
    (theta, y)
}

/// Solves `(T − σI)x = rhs` by Gaussian elimination with partial pivoting.
fn solve_shifted_tridiagonal(
    alpha: &[f64],
    beta: &[f64],
    sigma: f64,
    rhs: &[f64],
    scale: f64,
) -> Vec<f64> {
    let m = alpha.len();
    // Row i holds entries at columns i, i+1, i+2 after elimination.
    let mut d: Vec<f64> = alpha.iter().map(|a| a - sigma).collect();
    let mut u1: Vec<f64> = (0..m)
        .map(|i| if i + 1 < m { beta[i] } else { 0.0 })
        .collect();
    let mut u2 = vec![0.0; m];
    let mut lower: Vec<f64> = (0..m)
        .map(|i| if i + 1 < m { beta[i] } else { 0.0 })
        .collect();
    let mut b = rhs.to_vec();
    let tiny = f64::EPSILON * scale;

    for i in 0..m.saturating_sub(1) {
        let sub = lower[i];
        if sub.abs() > d[i].abs() {
            // Swap rows i and i+1.
            let (ri0, ri1, ri2) = (d[i], u1[i], u2[i]);
            let (rj0, rj1, rj2) = (sub, d[i + 1], u1[i + 1]);
            d[i] = rj0;
            u1[i] = rj1;
            u2[i] = rj2;
            b.swap(i, i + 1);
            let factor = ri0 / rj0;
            d[i + 1] = ri1 - factor * rj1;
            u1[i + 1] = ri2 - factor * rj2;
            b[i + 1] -= factor * b[i];
        } else {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let factor = sub / d[i];
            d[i + 1] -= factor * u1[i];
            u1[i + 1] -= factor * u2[i];
            b[i + 1] -= factor * b[i];
        }
        lower[i] = 0.0;
    }
    if d[m - 1] == 0.0 {
        d[m - 1] = tiny;
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = b[i];
        if i + 1 < m {
            acc -= u1[i] * x[i + 1];
        }
        if i + 2 < m {
            acc -= u2[i] * x[i + 2];
        }
        let pivot = if d[i] == 0.0 { tiny } else { d[i] };
        x[i] = acc / pivot;
    }
    x
}
