//! Closed-form bound states in one dimension.
//!
//! `M` wires meeting at a junction carry the state `ψ_j = e^{−α_M j}/𝒩`
//! (`j` = distance from the junction) with `α_M = ½ ln(2M−1)` and
//! `E_M = −2Mt/√(2M−1)`. A smooth chain with on-site attraction `g` at the
//! origin carries `ψ_j = e^{−α_g |j|}/𝒩′`; in terms of `g̃ = g/2t`,
//! `α_g = ln(g̃ + √(g̃²+1))`. The two coincide exactly when
//! `M = g̃² + g̃√(g̃²+1) + 1`, i.e. `g̃_M = (M−1)/√(2M−1)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::SpaceGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum StateKind {
    Singularity { degree: usize },
    Potential { g_tilde: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Analytic1DState {
    pub kind: StateKind,
    pub hopping: f64,
    /// Decay constant per lattice spacing.
    pub alpha: f64,
    pub energy: f64,
    /// `None` when the state is delocalized (`α = 0`).
    pub norm: Option<f64>,
    pub binding_energy: f64,
}

impl Analytic1DState {
    pub fn is_bound(&self) -> bool {
        self.norm.is_some()
    }

    /// Amplitude at distance `j` from the center.
    pub fn amplitude(&self, j: u32) -> Option<f64> {
        self.norm.map(|n| (-self.alpha * j as f64).exp() / n)
    }

    /// The state written onto a one-dimensional graph built for it.
    pub fn place_on_graph(&self, graph: &SpaceGraph) -> Result<Vec<f64>> {
        let spec = graph.spec();
        if spec.dim != 1 {
            return Err(Error::InvalidInput(format!(
                "analytic states live on D = 1 graphs (got D = {})",
                spec.dim
            )));
        }
        let want_degree = match self.kind {
            StateKind::Singularity { degree } => degree,
            StateKind::Potential { .. } => 1,
        };
        if spec.degree != want_degree {
            return Err(Error::InvalidInput(format!(
                "state expects degree {want_degree}, graph has degree {}",
                spec.degree
            )));
        }
        let norm = self.norm.ok_or_else(|| {
            Error::InvalidInput("delocalized state has no amplitude profile".into())
        })?;
        Ok((0..graph.site_count())
            .map(|s| (-self.alpha * graph.coords(s)[0].unsigned_abs() as f64).exp() / norm)
            .collect())
    }
}

pub fn singularity_state_1d(degree: usize, t: f64) -> Result<Analytic1DState> {
    if degree < 1 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let m = degree as f64;
    let alpha = 0.5 * (2.0 * m - 1.0).ln();
    let energy = -2.0 * m * t / (2.0 * m - 1.0).sqrt();
    let norm = (degree >= 2).then(|| ((2.0 * m - 1.0) / (m - 1.0)).sqrt());
    Ok(Analytic1DState {
        kind: StateKind::Singularity { degree },
        hopping: t,
        alpha,
        energy,
        norm,
        binding_energy: -2.0 * t - energy,
    })
}

/// Dimensionless energy `Ẽ_g = E_g/2t` of the potential-bound state.
fn reduced_energy(g_tilde: f64) -> f64 {
    let root = (g_tilde * g_tilde + 1.0).sqrt();
    (-g_tilde * g_tilde - g_tilde * root - 1.0) / (g_tilde + root)
}

pub fn potential_state_1d(g_tilde: f64, t: f64) -> Result<Analytic1DState> {
    if !(g_tilde.is_finite() && g_tilde >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "reduced potential must be finite and non-negative (got {g_tilde})"
        )));
    }
    let root = (g_tilde * g_tilde + 1.0).sqrt();
    let alpha = (g_tilde + root).ln();
    let energy = 2.0 * t * reduced_energy(g_tilde);
    let norm = (g_tilde > 0.0).then(|| (1.0 + 1.0 / (g_tilde * (g_tilde + root))).sqrt());
    Ok(Analytic1DState {
        kind: StateKind::Potential { g_tilde },
        hopping: t,
        alpha,
        energy,
        norm,
        binding_energy: -2.0 * t - energy,
    })
}

/// Reduced potential `g̃_M` whose bound state matches a degree-`M` junction.
pub fn equivalent_potential_1d(degree: usize) -> Result<f64> {
    if degree < 2 {
        return Err(Error::InvalidInput(format!(
            "equivalent potential needs degree >= 2 (got {degree})"
        )));
    }
    let m = degree as f64;
    Ok((m - 1.0) / (2.0 * m - 1.0).sqrt())
}

/// Share of the ground-state energy carried by the bonds touching the junction.
pub fn junction_kinetic_fraction(degree: usize) -> f64 {
    let m = degree as f64;
    (2.0 * m - 2.0) / (2.0 * m - 1.0)
}

/// Share of the ground-state energy carried by the on-site potential.
pub fn potential_energy_fraction(g_tilde: f64) -> f64 {
    let ratio = -g_tilde / reduced_energy(g_tilde);
    ratio * ratio
}
