use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hamiltonian::SparseOperator;

pub const DENSE_LIMIT: usize = 4000;

#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    /// All eigenvalues, ascending.
    pub energies: Vec<f64>,
    /// Eigenvectors matching `energies`, when requested.
    pub vectors: Option<Vec<Vec<f64>>>,
}

/// Full diagonalization of the operator as a dense symmetric matrix.
pub fn dense_spectrum(op: &SparseOperator, with_vectors: bool) -> Result<DenseSpectrum> {
    let n = op.dim();
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense {
            n,
            limit: DENSE_LIMIT,
        });
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (r, c, v) in op.entries() {
        m[(r, c)] = v;
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = with_vectors.then(|| {
        order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect()
    });
    Ok(DenseSpectrum { energies, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::assemble;
    use crate::space::{build_space, Boundary, SpaceSpec};

    #[test]
    fn ring_of_six() {
        let g = build_space(&SpaceSpec::singular(1, 6, 1)).unwrap();
        let op = assemble(&g, 1.0, 0.0).unwrap();
        let s = dense_spectrum(&op, false).unwrap();
        let mut want: Vec<f64> = (0..6)
            .map(|k| -2.0 * (2.0 * std::f64::consts::PI * k as f64 / 6.0).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (e, w) in s.energies.iter().zip(&want) {
            assert!((e - w).abs() < 1e-12);
        }
        assert!(s.vectors.is_none());
    }

    #[test]
    fn single_bond() {
        let op = SparseOperator::from_bonds(2, 1.3, &[(0, 1)], vec![0.0; 2]).unwrap();
        let s = dense_spectrum(&op, false).unwrap();
        assert!((s.energies[0] + 1.3).abs() < 1e-15);
        assert!((s.energies[1] - 1.3).abs() < 1e-15);
    }

    #[test]
    fn open_chain_of_three() {
        let g = build_space(&SpaceSpec::singular(1, 3, 1).boundary(Boundary::Open)).unwrap();
        let op = assemble(&g, 2.0, 0.0).unwrap();
        let s = dense_spectrum(&op, true).unwrap();
        let r2 = 2.0 * 2f64.sqrt();
        assert!((s.energies[0] + r2).abs() < 1e-12);
        assert!(s.energies[1].abs() < 1e-12);
        assert!((s.energies[2] - r2).abs() < 1e-12);
        assert_eq!(s.vectors.unwrap().len(), 3);
    }

    #[test]
    fn guard_rejects_large_operators() {
        let g = build_space(&SpaceSpec::singular(2, 70, 1)).unwrap();
        let op = assemble(&g, 1.0, 0.0).unwrap();
        assert!(matches!(
            dense_spectrum(&op, false),
            Err(Error::TooLargeForDense { n: 4900, .. })
        ));
    }
}
