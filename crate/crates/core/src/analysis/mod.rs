//! Derived observables and the studies built from them.
//!
//! - [`binding_energy`], [`radial_profile`] and [`average_radius`] read a
//!   single ground state.
//! - [`extrapolate`] and [`classify_bound`] take a family of sizes to the
//!   thermodynamic limit and decide whether a state is bound.
//! - [`find_equivalent_potential`] maps a singularity onto the on-site
//!   potential with the same binding energy.
//! - [`find_critical_potential_3d`] brackets the weakest potential that binds
//!   in three dimensions.
//! - [`collapse_deviation`] compares `(γ, E_bind)` curves.
//!
//! Energies stored in series, points and rows are in units of `t`; lengths are
//! in lattice spacings.

mod critical;
mod equivalence;
mod extrapolation;
mod sweep;

pub use critical::{
    find_critical_potential_3d, CriticalBracket, CriticalOptions, CriticalPredicate, CriticalProbe,
};
pub use equivalence::{
    collapse_deviation, find_equivalent_potential, scaling_exponent, write_equivalence_csv,
    EquivalencePoint,
};
pub use extrapolation::{
    classify_bound, default_sizes, extrapolate, extrapolate_family, extrapolate_values, BoundClass,
    ExtrapolationForm, ExtrapolationSeries, FamilyExtrapolation, Observable, SizePoint, Thresholds,
};
pub use sweep::{gamma_curve, solve_point, sweep, write_sweep_csv, SweepRow};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eigen::{lowest_eigenpairs, EigenOptions};
use crate::error::{Error, Result};
use crate::hamiltonian::assemble;
use crate::space::{build_space, SpaceGraph, SpaceSpec};

/// `E_bind = −2Dt − E`: the depth of a state below the bottom of the smooth
/// lattice band.
pub fn binding_energy(energy: f64, dim: usize, t: f64) -> f64 {
    -2.0 * dim as f64 * t - energy
}

/// A converged ground state together with the graph it lives on.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub graph: SpaceGraph,
    pub hopping: f64,
    pub energy: f64,
    /// Normalized, with its largest component positive.
    pub state: Vec<f64>,
    pub residual: f64,
    pub tol: f64,
    pub iterations: usize,
}

impl GroundState {
    pub fn spec(&self) -> &SpaceSpec {
        self.graph.spec()
    }

    /// Binding energy in units of `t`.
    pub fn binding_over_t(&self) -> f64 {
        binding_energy(self.energy, self.spec().dim, self.hopping) / self.hopping
    }
}

/// Anything that can produce the ground state of a spec: a direct solve, or a
/// solve behind a cache.
pub trait GroundStateSource: Sync {
    fn hopping(&self) -> f64;
    fn ground_state(&self, spec: &SpaceSpec) -> Result<GroundState>;
}

/// Builds, assembles and solves every request afresh.
#[derive(Debug, Clone, Copy)]
pub struct DirectSolver {
    pub hopping: f64,
    pub options: EigenOptions,
}

impl Default for DirectSolver {
    fn default() -> Self {
        Self {
            hopping: 1.0,
            options: EigenOptions::default(),
        }
    }
}

impl GroundStateSource for DirectSolver {
    fn hopping(&self) -> f64 {
        self.hopping
    }

    fn ground_state(&self, spec: &SpaceSpec) -> Result<GroundState> {
        solve_ground_state(spec, self.hopping, &self.options, None)
    }
}

/// Ground state of `spec` (potential in units of `t`), optionally warm-started
/// from a previously computed vector which is accepted as-is when its residual
/// already meets the tolerance.
pub fn solve_ground_state(
    spec: &SpaceSpec,
    t: f64,
    options: &EigenOptions,
    reuse: Option<Vec<f64>>,
) -> Result<GroundState> {
    let graph = build_space(spec)?;
    let op = assemble(&graph, t, spec.potential * t)?;
    let tol = options.resolved_tol(&op);
    if let Some(v) = reuse {
        if v.len() == op.dim() {
            let energy = op.rayleigh_quotient(&v)?;
            let residual = op.residual_norm(&v, energy)?;
            if residual <= tol {
                return Ok(GroundState {
                    graph,
                    hopping: t,
                    energy,
                    state: v,
                    residual,
                    tol,
                    iterations: 0,
                });
            }
        }
    }
    let opts = EigenOptions { k: 1, ..*options };
    let result = lowest_eigenpairs(&op, &opts)?;
    Ok(GroundState {
        graph,
        hopping: t,
        energy: result.energies[0],
        residual: result.residuals[0],
        tol: result.tol,
        iterations: result.iterations,
        state: result.vectors.into_iter().next().expect("k = 1"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialEntry {
    pub radius: f64,
    /// Exact integer `r²`; entries are grouped on it.
    pub radius_sq: u32,
    pub mean_amplitude: f64,
    /// Population standard deviation of `|ψ|` over the orbit.
    pub orbit_spread: f64,
    pub multiplicity: usize,
}

/// Orbit-averaged `|ψ|` against distance from the center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    /// Strictly increasing in radius.
    pub entries: Vec<RadialEntry>,
    pub spec: SpaceSpec,
    pub energy: f64,
}

impl RadialProfile {
    pub fn amplitude_at(&self, radius_sq: u32) -> Option<f64> {
        self.entries
            .binary_search_by_key(&radius_sq, |e| e.radius_sq)
            .ok()
            .map(|i| self.entries[i].mean_amplitude)
    }

    /// Largest `orbit_spread / mean_amplitude` over entries with a
    /// non-negligible amplitude (above `floor` times the peak).
    pub fn max_relative_spread(&self, floor: f64) -> f64 {
        let peak = self
            .entries
            .iter()
            .map(|e| e.mean_amplitude)
            .fold(0.0, f64::max);
        self.entries
            .iter()
            .filter(|e| e.mean_amplitude > floor * peak)
            .map(|e| e.orbit_spread / e.mean_amplitude)
            .fold(0.0, f64::max)
    }
}

fn profile_where(
    psi: &[f64],
    graph: &SpaceGraph,
    energy: f64,
    keep: impl Fn(usize) -> bool,
) -> Result<RadialProfile> {
    if psi.len() != graph.site_count() {
        return Err(Error::LengthMismatch {
            expected: graph.site_count(),
            got: psi.len(),
        });
    }
    let mut groups: BTreeMap<u32, (f64, f64, usize)> = BTreeMap::new();
    for (site, &amp) in psi.iter().enumerate() {
        if !keep(site) {
            continue;
        }
        let a = amp.abs();
        let slot = groups
            .entry(graph.geometry(site).radius_sq)
            .or_insert((0.0, 0.0, 0));
        slot.0 += a;
        slot.1 += a * a;
        slot.2 += 1;
    }
    let entries = groups
        .into_iter()
        .map(|(radius_sq, (sum, sum_sq, count))| {
            let mean = sum / count as f64;
            let var = (sum_sq / count as f64 - mean * mean).max(0.0);
            RadialEntry {
                radius: (radius_sq as f64).sqrt(),
                radius_sq,
                mean_amplitude: mean,
                orbit_spread: var.sqrt(),
                multiplicity: count,
            }
        })
        .collect();
    Ok(RadialProfile {
        entries,
        spec: *graph.spec(),
        energy,
    })
}

/// `|ψ|` grouped by exact radius across all sheets.
pub fn radial_profile(psi: &[f64], graph: &SpaceGraph, energy: f64) -> Result<RadialProfile> {
    profile_where(psi, graph, energy, |_| true)
}

/// Like [`radial_profile`] but restricted to one sheet (the junction counts as
/// part of every sheet).
pub fn sheet_profile(
    psi: &[f64],
    graph: &SpaceGraph,
    energy: f64,
    sheet: u32,
) -> Result<RadialProfile> {
    profile_where(psi, graph, energy, |s| {
        graph.geometry(s).sheet.is_none_or(|k| k == sheet)
    })
}

/// `r_avg = Σ_j |r_j − r_0|·|ψ_j|²` for a normalized state.
pub fn average_radius(psi: &[f64], graph: &SpaceGraph) -> Result<f64> {
    if psi.len() != graph.site_count() {
        return Err(Error::LengthMismatch {
            expected: graph.site_count(),
            got: psi.len(),
        });
    }
    Ok(psi
        .iter()
        .enumerate()
        .map(|(s, a)| graph.radius(s) * a * a)
        .sum())
}
