//! Independent checks shared by the integration and acceptance targets.

#![allow(dead_code)]

use std::collections::BTreeMap;

use singbound::analysis::{solve_ground_state, RadialEntry, RadialProfile};
use singbound::eigen::{dense_spectrum, EigenOptions};
use singbound::fitting::{radial_fit, FitModel};
use singbound::hamiltonian::assemble;
use singbound::space::{build_space, Boundary, SpaceGraph, SpaceSpec};

/// Small graphs (N ≤ 2000) covering every dimension, singular and potential
/// centers, and both boundary conditions.
pub fn oracle_specs() -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::singular(1, 41, 1),
        SpaceSpec::singular(1, 41, 2),
        SpaceSpec::singular(1, 60, 5),
        SpaceSpec::with_potential(1, 50, 0.7),
        SpaceSpec::singular(1, 31, 3).boundary(Boundary::Open),
        SpaceSpec::singular(2, 8, 1),
        SpaceSpec::singular(2, 12, 2),
        SpaceSpec::singular(2, 16, 3),
        SpaceSpec::singular(2, 24, 3),
        SpaceSpec::singular(2, 13, 4),
        SpaceSpec::with_potential(2, 20, 2.0),
        SpaceSpec::with_potential(2, 15, 1.0).boundary(Boundary::Open),
        SpaceSpec::singular(3, 6, 2),
        SpaceSpec::singular(3, 7, 5),
        SpaceSpec::singular(3, 8, 3),
        SpaceSpec::with_potential(3, 10, 5.0),
        SpaceSpec::with_potential(3, 9, 4.0).boundary(Boundary::Open),
    ]
}

/// Absolute gap between the Lanczos and dense ground energies.
pub fn lanczos_dense_gap(spec: &SpaceSpec) -> f64 {
    let gs = solve_ground_state(spec, 1.0, &EigenOptions::default(), None).unwrap();
    let graph = build_space(spec).unwrap();
    let op = assemble(&graph, 1.0, spec.potential).unwrap();
    assert!(op.dim() <= 2000, "oracle graphs stay small");
    let dense = dense_spectrum(&op, false).unwrap();
    (gs.energy - dense.energies[0]).abs()
}

/// Properties every solved ground state must have.
///
/// Tails far below the tolerance carry only eigensolver noise, so sign
/// uniformity means no component below `−tol`.
#[derive(Debug, Clone, Copy)]
pub struct StateChecks {
    /// Smallest component; a nodeless ground state has none below the
    /// solver's noise floor.
    pub min_component: f64,
    pub tol: f64,
    /// Largest per-site residual of `Hψ = Eψ`, relative to the solver tolerance.
    pub site_residual_over_tol: f64,
    pub norm_error: f64,
    /// Largest amplitude difference between point-group images of a site.
    pub symmetry_error: f64,
}

pub fn state_checks(spec: &SpaceSpec) -> StateChecks {
    let gs = solve_ground_state(spec, 1.0, &EigenOptions::default(), None).unwrap();
    let op = assemble(&gs.graph, 1.0, spec.potential).unwrap();
    let site_res = op
        .site_residuals(&gs.state, gs.energy)
        .unwrap()
        .into_iter()
        .fold(0.0, |m: f64, r| m.max(r.abs()));
    let norm_sq: f64 = gs.state.iter().map(|x| x * x).sum();
    StateChecks {
        min_component: gs.state.iter().copied().fold(f64::INFINITY, f64::min),
        tol: gs.tol,
        site_residual_over_tol: site_res / gs.tol,
        norm_error: (norm_sq - 1.0).abs(),
        symmetry_error: symmetry_error(&gs.graph, &gs.state),
    }
}

/// Reflects a window coordinate through the center, wrapping on periodic
/// lattices; `None` when the image falls outside an open window.
fn reflect(c: i32, extent: usize, boundary: Boundary) -> Option<i32> {
    let l = extent as i32;
    let h = l / 2;
    let r = -c;
    if r >= -h && r < l - h {
        return Some(r);
    }
    match boundary {
        Boundary::Periodic => Some((r + h).rem_euclid(l) - h),
        Boundary::Open => None,
    }
}

/// Largest amplitude mismatch under coordinate permutations and reflections,
/// and between sheets.
pub fn symmetry_error(graph: &SpaceGraph, psi: &[f64]) -> f64 {
    let spec = graph.spec();
    let perms: Vec<Vec<usize>> = match spec.dim {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
    };
    let mut worst: f64 = 0.0;
    for site in 0..graph.site_count() {
        let c = graph.coords(site).to_vec();
        for perm in &perms {
            for signs in 0..(1u32 << spec.dim) {
                let image: Option<Vec<i32>> = perm
                    .iter()
                    .enumerate()
                    .map(|(k, &from)| {
                        let v = c[from];
                        if signs >> k & 1 == 1 {
                            reflect(v, spec.extent, spec.boundary)
                        } else {
                            Some(v)
                        }
                    })
                    .collect();
                let Some(image) = image else { continue };
                for sheet in 0..spec.degree {
                    if let Some(other) = graph.site_at(sheet, &image) {
                        worst = worst.max((psi[site] - psi[other]).abs());
                    }
                }
            }
        }
    }
    worst
}

/// Fits a noiseless Bessel profile sampled on lattice radii and returns the
/// largest relative parameter error.
pub fn bessel_round_trip(dim: usize, planted: [f64; 3]) -> f64 {
    let model = if dim == 2 {
        FitModel::Bessel2d
    } else {
        FitModel::Bessel3d
    };
    let extent = 60;
    let spec = SpaceSpec::singular(dim, extent, 3);
    let mut radii_sq: Vec<u32> = Vec::new();
    let h = (extent / 2) as u32;
    for x in 0..=h {
        for y in 0..=x {
            let r2 = x * x + y * y;
            if dim == 2 {
                radii_sq.push(r2);
            } else {
                for z in 0..=y {
                    radii_sq.push(r2 + z * z);
                }
            }
        }
    }
    radii_sq.sort_unstable();
    radii_sq.dedup();
    let entries = radii_sq
        .into_iter()
        .map(|r2| {
            let r = (r2 as f64).sqrt();
            RadialEntry {
                radius: r,
                radius_sq: r2,
                mean_amplitude: if r2 == 0 {
                    1.0
                } else {
                    model.eval(&planted, r)
                },
                orbit_spread: 0.0,
                multiplicity: 1,
            }
        })
        .collect();
    let profile = RadialProfile {
        entries,
        spec,
        energy: -2.0 * dim as f64 - 0.1,
    };
    let fit = radial_fit(&profile, dim).unwrap();
    let names = model.param_names();
    let got: BTreeMap<&str, f64> = names.iter().map(|n| (*n, fit.param(n))).collect();
    names
        .iter()
        .zip(planted)
        .map(|(n, want)| ((got[n] - want) / want).abs())
        .fold(0.0, f64::max)
}

/// Worst deviations between the closed-form 1D states and the numeric ones
/// on `L = 200`, over `M ∈ {2,…,10}`.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticAgreement {
    pub energy: f64,
    pub alpha: f64,
    /// Mismatch in `(α, E_bind)` between each junction and its equivalent
    /// potential.
    pub equivalence: f64,
}

pub fn analytic_agreement() -> AnalyticAgreement {
    use singbound::analytic::{equivalent_potential_1d, potential_state_1d, singularity_state_1d};
    let mut worst = AnalyticAgreement {
        energy: 0.0,
        alpha: 0.0,
        equivalence: 0.0,
    };
    for m in 2..=10 {
        let exact = singularity_state_1d(m, 1.0).unwrap();
        let gs = solve_ground_state(
            &SpaceSpec::singular(1, 200, m),
            1.0,
            &EigenOptions::default(),
            None,
        )
        .unwrap();
        let profile = singbound::analysis::radial_profile(&gs.state, &gs.graph, gs.energy).unwrap();
        let slope = (profile.amplitude_at(1).unwrap() / profile.amplitude_at(4).unwrap()).ln();
        let pot = potential_state_1d(equivalent_potential_1d(m).unwrap(), 1.0).unwrap();
        worst.energy = worst.energy.max((gs.energy - exact.energy).abs());
        worst.alpha = worst
            .alpha
            .max((slope - 0.5 * (2.0 * m as f64 - 1.0).ln()).abs());
        worst.equivalence = worst
            .equivalence
            .max((pot.alpha - exact.alpha).abs())
            .max((pot.binding_energy - exact.binding_energy).abs());
    }
    worst
}

/// Worst error of the measured energy shares on closed-form states placed on
/// `L = 200` graphs, against `(2M−2)/(2M−1)` and `(−g̃/Ẽ_g)²`, plus the two
/// spot values (`2/3` at `M = 2`, `1/2` at `g̃ = 1`).
pub fn energy_fraction_error() -> f64 {
    use singbound::analytic::{
        junction_kinetic_fraction, potential_energy_fraction, potential_state_1d,
        singularity_state_1d,
    };
    use singbound::hamiltonian::decompose_energy;
    let mut worst: f64 = 0.0;
    for m in 2..=10 {
        let graph = build_space(&SpaceSpec::singular(1, 200, m)).unwrap();
        let op = assemble(&graph, 1.0, 0.0).unwrap();
        let psi = singularity_state_1d(m, 1.0)
            .unwrap()
            .place_on_graph(&graph)
            .unwrap();
        let d = decompose_energy(&op, &graph, &psi).unwrap();
        worst = worst.max((d.junction_fraction - junction_kinetic_fraction(m)).abs());
    }
    for g_tilde in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let g = 2.0 * g_tilde;
        let graph = build_space(&SpaceSpec::with_potential(1, 200, g)).unwrap();
        let op = assemble(&graph, 1.0, g).unwrap();
        let psi = potential_state_1d(g_tilde, 1.0)
            .unwrap()
            .place_on_graph(&graph)
            .unwrap();
        let d = decompose_energy(&op, &graph, &psi).unwrap();
        worst = worst.max((d.potential_fraction - potential_energy_fraction(g_tilde)).abs());
    }
    worst
        .max((junction_kinetic_fraction(2) - 2.0 / 3.0).abs())
        .max((potential_energy_fraction(1.0) - 0.5).abs())
}
