//! Dense vector kernels used by the operator and the Krylov solver.
//!
//! Reductions are split into fixed-size chunks whose partial sums are added in
//! chunk order, so results do not depend on the number of worker threads.

use rayon::prelude::*;

const CHUNK: usize = 1 << 14;
const PAR_MIN: usize = 1 << 16;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() < PAR_MIN {
        return chunk_dot(a, b);
    }
    let partials: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| chunk_dot(x, y))
        .collect();
    partials.iter().sum()
}

fn chunk_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    if y.len() < PAR_MIN {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
        return;
    }
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, xi)| *yi += alpha * xi));
}

pub fn scale(alpha: f64, y: &mut [f64]) {
    if y.len() < PAR_MIN {
        y.iter_mut().for_each(|v| *v *= alpha);
        return;
    }
    y.par_chunks_mut(CHUNK)
        .for_each(|c| c.iter_mut().for_each(|v| *v *= alpha));
}

/// Scales `v` to unit 2-norm and returns the original norm.
pub fn normalize(v: &mut [f64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        scale(1.0 / n, v);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_dot_matches_naive() {
        let n = PAR_MIN * 3 + 17;
        let a: Vec<f64> = (0..n)
            .map(|i| ((i * 7919) % 1013) as f64 / 1013.0 - 0.5)
            .collect();
        let b: Vec<f64> = (0..n)
            .map(|i| ((i * 104729) % 997) as f64 / 997.0)
            .collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-9 * naive.abs().max(1.0));
        assert_eq!(dot(&a, &b).to_bits(), dot(&a, &b).to_bits());
    }

    #[test]
    fn axpy_and_normalize() {
        let mut y = vec![1.0, 2.0, 2.0];
        axpy(2.0, &[0.0, 0.0, 0.0], &mut y);
        assert_eq!(normalize(&mut y), 3.0);
        assert!((norm(&y) - 1.0).abs() < 1e-15);
    }
}
