//! Lowest eigenpairs of the tight-binding operator.
//!
//! [`lowest_eigenpairs`] runs Lanczos with full reorthogonalization of the
//! Krylov basis and a seeded start vector. Convergence is certified by the
//! explicit residual `‖Hψ − Eψ‖₂`, never by Ritz-value stagnation. When the
//! basis reaches its cap the iteration restarts from the current Ritz
//! vector(s). [`dense_spectrum`] is a full diagonalization used as an oracle
//! on small instances.

mod dense;
mod tridiag;

pub use dense::{dense_spectrum, DenseSpectrum, DENSE_LIMIT};
pub use tridiag::Tridiagonal;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SparseOperator;
use crate::vecops;

/// Doubles of Krylov basis storage the default basis cap aims for (256 MiB).
const BASIS_BUDGET: usize = 1 << 25;
const REORTH_CHUNK: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    pub k: usize,
    /// Residual threshold; `None` means `1e-10·‖H‖₁`.
    pub tol: Option<f64>,
    pub max_iterations: usize,
    pub seed: u64,
    /// Maximum Krylov basis size before a restart; `None` picks one from the
    /// operator order.
    pub basis_cap: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            k: 1,
            tol: None,
            max_iterations: 50_000,
            seed: 0x5eed_cafe,
            basis_cap: None,
        }
    }
}

impl EigenOptions {
    pub fn resolved_tol(&self, op: &SparseOperator) -> f64 {
        self.tol.unwrap_or(1e-10 * op.one_norm())
    }

    fn resolved_cap(&self, n: usize) -> usize {
        let cap = self
            .basis_cap
            .unwrap_or_else(|| (BASIS_BUDGET / n.max(1)).clamp(40, 800));
        cap.max(self.k + 2).min(n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub tol: f64,
}

impl EigenResult {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_state(&self) -> &[f64] {
        &self.vectors[0]
    }
}

pub fn lowest_eigenpairs(op: &SparseOperator, opts: &EigenOptions) -> Result<EigenResult> {
    let n = op.dim();
    if opts.k == 0 || opts.k >= n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k < N (k = {}, N = {n})",
            opts.k
        )));
    }
    let tol = opts.resolved_tol(op);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive (got {tol})"
        )));
    }
    let cap = opts.resolved_cap(n);
    let breakdown = 1e-12 * op.one_norm();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut start = random_unit(&mut rng, n, &[]);
    let mut iterations = 0;
    let mut restarts = 0;
    let mut best_residual = f64::INFINITY;

    loop {
        let mut basis: Vec<Vec<f64>> = vec![start];
        let mut alpha: Vec<f64> = Vec::with_capacity(cap);
        let mut beta: Vec<f64> = Vec::with_capacity(cap);
        let mut w = vec![0.0; n];
        let mut next_check = 0;

        loop {
            let j = basis.len() - 1;
            op.apply_into(&basis[j], &mut w);
            let a = vecops::dot(&basis[j], &w);
            vecops::axpy(-a, &basis[j], &mut w);
            if j > 0 {
                vecops::axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            reorthogonalize(&basis, &mut w);
            reorthogonalize(&basis, &mut w);
            alpha.push(a);
            let mut b = vecops::norm(&w);
            iterations += 1;

            let m = alpha.len();
            let exhausted = b <= breakdown && m == n;
            let at_cap = m >= cap;
            let out_of_budget = iterations >= opts.max_iterations;

            // an invariant subspace may hide copies of degenerate levels, so
            // no verdict is taken until the basis has grown past it
            let invariant = b <= breakdown && !exhausted;
            if m >= opts.k
                && (exhausted || out_of_budget || (!invariant && (m >= next_check || at_cap)))
            {
                let tri = Tridiagonal {
                    diag: &alpha,
                    off: &beta,
                };
                let ritz = ritz_pairs(&tri, opts.k);
                let estimates_ok = ritz.iter().all(|(_, s)| b * s[m - 1].abs() <= 0.5 * tol);
                if estimates_ok || exhausted || at_cap || out_of_budget {
                    let (energies, vectors) = ritz_vectors(&basis, &ritz);
                    let residuals: Vec<f64> = energies
                        .iter()
                        .zip(&vectors)
                        .map(|(e, v)| op.residual_norm(v, *e))
                        .collect::<Result<_>>()?;
                    let worst = residuals.iter().cloned().fold(0.0, f64::max);
                    best_residual = best_residual.min(worst);
                    if worst <= tol {
                        return Ok(finish(
                            energies, vectors, residuals, iterations, restarts, tol,
                        ));
                    }
                    if out_of_budget || exhausted {
                        return Err(Error::NotConverged {
                            iterations,
                            best_residual,
                            tol,
                        });
                    }
                    if at_cap {
                        start = restart_vector(&vectors);
                        restarts += 1;
                        break;
                    }
                    next_check = m + 5;
                }
            }

            if b <= breakdown {
                // invariant subspace: continue in its orthogonal complement
                w = random_unit(&mut rng, n, &basis);
                b = 0.0;
            } else {
                vecops::scale(1.0 / b, &mut w);
            }
            beta.push(b);
            basis.push(std::mem::replace(&mut w, vec![0.0; n]));
        }
    }
}

fn ritz_pairs(tri: &Tridiagonal<'_>, k: usize) -> Vec<(f64, Vec<f64>)> {
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
    for theta in tri.lowest_eigenvalues(k) {
        let s = tri.eigenvector(theta, &pairs);
        pairs.push((theta, s));
    }
    pairs
}

fn ritz_vectors(basis: &[Vec<f64>], ritz: &[(f64, Vec<f64>)]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = basis[0].len();
    let mut energies = Vec::with_capacity(ritz.len());
    let mut vectors = Vec::with_capacity(ritz.len());
    for (theta, s) in ritz {
        let mut y = vec![0.0; n];
        y.par_chunks_mut(REORTH_CHUNK)
            .enumerate()
            .for_each(|(ci, yc)| {
                let off = ci * REORTH_CHUNK;
                for (coef, v) in s.iter().zip(basis) {
                    let vc = &v[off..off + yc.len()];
                    yc.iter_mut().zip(vc).for_each(|(a, b)| *a += coef * b);
                }
            });
        vecops::normalize(&mut y);
        energies.push(*theta);
        vectors.push(y);
    }
    (energies, vectors)
}

/// One classical Gram–Schmidt pass of `w` against every basis vector.
fn reorthogonalize(basis: &[Vec<f64>], w: &mut [f64]) {
    let coeffs: Vec<f64> = basis.par_iter().map(|v| vecops::dot(v, w)).collect();
    w.par_chunks_mut(REORTH_CHUNK)
        .enumerate()
        .for_each(|(ci, wc)| {
            let off = ci * REORTH_CHUNK;
            for (c, v) in coeffs.iter().zip(basis) {
                let vc = &v[off..off + wc.len()];
                wc.iter_mut().zip(vc).for_each(|(a, b)| *a -= c * b);
            }
        });
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize, against: &[Vec<f64>]) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    if !against.is_empty() {
        reorthogonalize(against, &mut v);
        reorthogonalize(against, &mut v);
    }
    vecops::normalize(&mut v);
    v
}

fn restart_vector(vectors: &[Vec<f64>]) -> Vec<f64> {
    let mut v = vectors[0].clone();
    for y in &vectors[1..] {
        vecops::axpy(1.0, y, &mut v);
    }
    vecops::normalize(&mut v);
    v
}

fn finish(
    energies: Vec<f64>,
    mut vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    iterations: usize,
    restarts: usize,
    tol: f64,
) -> EigenResult {
    for v in &mut vectors {
        fix_sign(v);
    }
    EigenResult {
        energies,
        vectors,
        residuals,
        iterations,
        restarts,
        converged: true,
        tol,
    }
}

/// Flips `v` so that its largest-magnitude component is positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0f64;
    for &x in v.iter() {
        if x.abs() > best.abs() {
            best = x;
        }
    }
    if best < 0.0 {
        vecops::scale(-1.0, v);
    }
}
