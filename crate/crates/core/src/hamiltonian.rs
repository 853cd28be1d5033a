//! The tight-binding operator `H = −t Σ_<mn> (c†_m c_n + h.c.) − g c†_0 c_0`.
//!
//! Off-diagonal structure is shared with the graph's row-compressed adjacency;
//! each stored entry is `−t`. The diagonal carries `−g` at the center site.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::SpaceGraph;
use crate::vecops;

const PAR_ROWS: usize = 1 << 15;
const ROW_CHUNK: usize = 4096;

#[derive(Debug, Clone)]
pub struct SparseOperator {
    hopping: f64,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    diagonal: Vec<f64>,
}

pub fn assemble(graph: &SpaceGraph, t: f64, g: f64) -> Result<SparseOperator> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidInput(format!(
            "hopping t must be positive (got {t})"
        )));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "potential strength g must be non-negative (got {g})"
        )));
    }
    if g > 0.0 && graph.spec().is_singular() {
        return Err(Error::InvalidInput(format!(
            "potential g = {g} requested on a singular graph of degree {}",
            graph.spec().degree
        )));
    }
    let (offsets, cols) = graph.csr();
    let mut diagonal = vec![0.0; graph.site_count()];
    diagonal[graph.junction_site()] = -g;
    Ok(SparseOperator {
        hopping: t,
        offsets: offsets.to_vec(),
        cols: cols.to_vec(),
        diagonal,
    })
}

impl SparseOperator {
    /// Operator on an explicit bond list, for small hand-built instances.
    pub fn from_bonds(
        n: usize,
        t: f64,
        bonds: &[(usize, usize)],
        diagonal: Vec<f64>,
    ) -> Result<Self> {
        if diagonal.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: diagonal.len(),
            });
        }
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in bonds {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidInput(format!("invalid bond ({a}, {b})")));
            }
            rows[a].push(b);
            rows[b].push(a);
        }
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        for mut r in rows {
            r.sort_unstable();
            if r.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput("duplicate bond".into()));
            }
            cols.extend(r);
            offsets.push(cols.len());
        }
        Ok(Self {
            hopping: t,
            offsets,
            cols,
            diagonal,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn row(&self, n: usize) -> &[usize] {
        &self.cols[self.offsets[n]..self.offsets[n + 1]]
    }

    pub fn nnz(&self) -> usize {
        self.cols.len() + self.diagonal.iter().filter(|d| **d != 0.0).count()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> f64 {
        (0..self.dim())
            .map(|n| self.row(n).len() as f64 * self.hopping + self.diagonal[n].abs())
            .fold(0.0, f64::max)
    }

    /// All stored entries `(row, col, value)`, diagonal included when nonzero.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim()).flat_map(move |n| {
            let diag = (self.diagonal[n] != 0.0).then_some((n, n, self.diagonal[n]));
            self.row(n)
                .iter()
                .map(move |&m| (n, m, -self.hopping))
                .chain(diag)
        })
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out);
        Ok(out)
    }

    /// `out = H v`. Panics if either length differs from the operator order.
    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        if self.dim() < PAR_ROWS {
            self.rows_into(0, v, out);
        } else {
            out.par_chunks_mut(ROW_CHUNK)
                .enumerate()
                .for_each(|(i, chunk)| self.rows_into(i * ROW_CHUNK, v, chunk));
        }
    }

    fn rows_into(&self, first: usize, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let n = first + i;
            let s: f64 = self.row(n).iter().map(|&m| v[m]).sum();
            *o = -self.hopping * s + self.diagonal[n] * v[n];
        }
    }

    pub fn rayleigh_quotient(&self, v: &[f64]) -> Result<f64> {
        let hv = self.apply(v)?;
        Ok(vecops::dot(v, &hv) / vecops::dot(v, v))
    }

    /// Site-wise residual of the eigenvalue relation, `|(Hψ)_n − E ψ_n|`.
    pub fn site_residuals(&self, psi: &[f64], energy: f64) -> Result<Vec<f64>> {
        let hv = self.apply(psi)?;
        Ok(hv
            .iter()
            .zip(psi)
            .map(|(h, p)| (h - energy * p).abs())
            .collect())
    }

    /// `‖Hψ − Eψ‖₂`
    pub fn residual_norm(&self, psi: &[f64], energy: f64) -> Result<f64> {
        let r = self.site_residuals(psi, energy)?;
        Ok(r.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

/// Contribution of the center's bonds and potential to a state's energy.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyDecomposition {
    pub junction_bond_energy: f64,
    pub potential_energy: f64,
    pub total_energy: f64,
    pub junction_fraction: f64,
    pub potential_fraction: f64,
}

pub fn decompose_energy(
    op: &SparseOperator,
    graph: &SpaceGraph,
    psi: &[f64],
) -> Result<EnergyDecomposition> {
    op.check_len(psi.len())?;
    let norm_sq = vecops::dot(psi, psi);
    if (norm_sq.sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "state must be normalized (‖ψ‖ = {})",
            norm_sq.sqrt()
        )));
    }
    let center = graph.junction_site();
    let psi0 = psi[center];
    let bond_sum: f64 = graph.neighbors(center).iter().map(|&j| psi[j]).sum();
    let junction_bond_energy = -op.hopping * 2.0 * bond_sum * psi0;
    let potential_energy = op.diagonal[center] * psi0 * psi0;
    let total_energy = op.rayleigh_quotient(psi)?;
    Ok(EnergyDecomposition {
        junction_bond_energy,
        potential_energy,
        total_energy,
        junction_fraction: junction_bond_energy / total_energy,
        potential_fraction: potential_energy / total_energy,
    })
}
