//! Mapping a singularity onto an on-site potential, and comparing the
//! `(γ, E_bind)` curves of the two families.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{radial_profile, GroundState, GroundStateSource};
use crate::error::{Error, Result};
use crate::fitting::{least_squares_line, radial_fit, FitResult};
use crate::io::fmt_float;
use crate::space::{Boundary, SpaceSpec};

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalencePoint {
    pub degree: usize,
    pub dim: usize,
    pub extent: usize,
    /// Equivalent potential, units of `t`.
    pub g_m: f64,
    /// Decay constant of the singularity state.
    pub gamma: f64,
    /// Decay constant of the matched potential state.
    pub gamma_potential: f64,
    /// Binding energy of the singularity state, units of `t`.
    pub binding_energy: f64,
    /// Binding energy reached by the potential, units of `t`.
    pub binding_energy_potential: f64,
    pub fit_singularity: FitResult,
    pub fit_potential: FitResult,
}

fn decay_fit(gs: &GroundState) -> Result<FitResult> {
    let profile = radial_profile(&gs.state, &gs.graph, gs.energy)?;
    radial_fit(&profile, gs.spec().dim)
}

/// Bisection on `g` until the potential's binding energy matches the
/// singularity's to within `tol` (units of `t`).
///
/// The seed bracket is `[0, 4·D]·t`; its upper end doubles until it binds
/// more strongly than the singularity.
pub fn find_equivalent_potential(
    source: &dyn GroundStateSource,
    degree: usize,
    dim: usize,
    extent: usize,
    boundary: Boundary,
    tol: f64,
) -> Result<EquivalencePoint> {
    if degree < 2 {
        return Err(Error::InvalidInput(format!(
            "equivalence needs a singularity, degree >= 2 (got {degree})"
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive (got {tol})"
        )));
    }
    if dim == 1 {
        return Err(Error::InvalidInput(
            "D = 1 has a closed-form equivalent potential; the numeric search needs D = 2 or 3"
                .into(),
        ));
    }
    let sing = source.ground_state(&SpaceSpec::singular(dim, extent, degree).boundary(boundary))?;
    let target = sing.binding_over_t();
    if !(target > 0.0) {
        return Err(Error::Bracket(format!(
            "degree-{degree} singularity has no bound state at L = {extent} (E_bind = {target:e}·t)"
        )));
    }
    let solve_g =
        |g: f64| source.ground_state(&SpaceSpec::with_potential(dim, extent, g).boundary(boundary));

    let mut lo = 0.0;
    let mut hi = 4.0 * dim as f64;
    let mut hi_state = solve_g(hi)?;
    let mut doublings = 0;
    while hi_state.binding_over_t() < target {
        doublings += 1;
        if doublings > 30 {
            return Err(Error::Bracket(format!(
                "no potential up to g = {hi}·t binds as strongly as the singularity"
            )));
        }
        lo = hi;
        hi *= 2.0;
        hi_state = solve_g(hi)?;
    }

    let mut best = hi_state;
    for _ in 0..MAX_BISECTIONS {
        if (best.binding_over_t() - target).abs() <= tol || hi - lo <= 1e-13 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let state = solve_g(mid)?;
        let e = state.binding_over_t();
        if e < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (e - target).abs() <= (best.binding_over_t() - target).abs() {
            best = state;
        }
    }
    if (best.binding_over_t() - target).abs() > tol {
        return Err(Error::Bracket(format!(
            "bisection stalled at |ΔE_bind| = {:e}·t",
            (best.binding_over_t() - target).abs()
        )));
    }

    let fit_singularity = decay_fit(&sing)?;
    let fit_potential = decay_fit(&best)?;
    Ok(EquivalencePoint {
        degree,
        dim,
        extent,
        g_m: best.spec().potential,
        gamma: fit_singularity.param("gamma"),
        gamma_potential: fit_potential.param("gamma"),
        binding_energy: target,
        binding_energy_potential: best.binding_over_t(),
        fit_singularity,
        fit_potential,
    })
}

/// CSV with columns `M, g_M_over_t, gamma_sing, gamma_pot, E_bind_over_t`.
pub fn write_equivalence_csv<W: Write>(points: &[EquivalencePoint], mut out: W) -> Result<()> {
    writeln!(out, "M,g_M_over_t,gamma_sing,gamma_pot,E_bind_over_t")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.degree,
            fmt_float(p.g_m),
            fmt_float(p.gamma),
            fmt_float(p.gamma_potential),
            fmt_float(p.binding_energy)
        )?;
    }
    Ok(())
}

/// Slope of `ln y` against `ln x`, e.g. the growth exponent of `g_M` with `M`.
pub fn scaling_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 || points.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidInput(
            "need at least two points with positive coordinates".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    Ok(least_squares_line(&logs).0)
}

fn check_curve(name: &str, pts: &[(f64, f64)]) -> Result<()> {
    if pts.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "{name} curve needs at least 4 points (got {})",
            pts.len()
        )));
    }
    if pts.iter().any(|(g, e)| !(g.is_finite() && e.is_finite())) {
        return Err(Error::InvalidInput(format!(
            "{name} curve has non-finite values"
        )));
    }
    if !pts.windows(2).all(|w| w[1].0 > w[0].0) {
        return Err(Error::InvalidInput(format!(
            "{name} curve must be strictly ascending in γ"
        )));
    }
    Ok(())
}

/// Piecewise-linear interpolation; `x` must lie within the curve's range.
fn interpolate(curve: &[(f64, f64)], x: f64) -> f64 {
    let i = curve
        .partition_point(|p| p.0 <= x)
        .clamp(1, curve.len() - 1);
    let (x0, y0) = curve[i - 1];
    let (x1, y1) = curve[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Largest relative binding-energy deviation between two `(γ, E_bind)`
/// curves over their common `γ` range.
///
/// The potential curve is interpolated at every singularity `γ` inside the
/// overlap.
pub fn collapse_deviation(
    singularity_points: &[(f64, f64)],
    potential_points: &[(f64, f64)],
) -> Result<f64> {
    check_curve("singularity", singularity_points)?;
    check_curve("potential", potential_points)?;
    let lo = singularity_points[0].0.max(potential_points[0].0);
    let hi = singularity_points[singularity_points.len() - 1]
        .0
        .min(potential_points[potential_points.len() - 1].0);
    let inside: Vec<&(f64, f64)> = singularity_points
        .iter()
        .filter(|p| p.0 >= lo && p.0 <= hi)
        .collect();
    if !(lo < hi) || inside.is_empty() {
        return Err(Error::InvalidInput(format!(
            "γ ranges do not overlap (common range [{lo}, {hi}])"
        )));
    }
    Ok(inside
        .iter()
        .map(|(g, e)| {
            let reference = interpolate(potential_points, *g);
            ((e - reference) / reference).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::DirectSolver;

    fn curve(f: impl Fn(f64) -> f64, xs: &[f64]) -> Vec<(f64, f64)> {
        xs.iter().map(|&x| (x, f(x))).collect()
    }

    #[test]
    fn identical_curves_collapse_exactly() {
        let c = curve(|g| g * g, &[0.5, 1.0, 1.5, 2.0, 2.5]);
        assert_eq!(collapse_deviation(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn linear_curves_interpolate_exactly() {
        let a = curve(|g| 2.0 * g + 1.0, &[1.1, 1.7, 2.2, 2.9]);
        let b = curve(|g| 2.0 * g + 1.0, &[1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!(collapse_deviation(&a, &b).unwrap() < 1e-15);
    }

    #[test]
    fn offset_curve_reports_relative_gap() {
        let a = curve(|g| 1.1 * g, &[1.0, 2.0, 3.0, 4.0]);
        let b = curve(|g| g, &[1.0, 2.0, 3.0, 4.0]);
        assert!((collapse_deviation(&a, &b).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        let a = curve(|g| g, &[1.0, 2.0, 3.0, 4.0]);
        let far = curve(|g| g, &[5.0, 6.0, 7.0, 8.0]);
        assert!(collapse_deviation(&a, &far).is_err());
        assert!(collapse_deviation(&a[..3], &a).is_err());
        let unsorted = vec![(1.0, 1.0), (3.0, 3.0), (2.0, 2.0), (4.0, 4.0)];
        assert!(collapse_deviation(&unsorted, &a).is_err());
    }

    #[test]
    fn small_lattice_equivalence_matches_exact_identity() {
        // off-center equations are identical, so g_M = −E_M·(M−1)/M exactly
        let solver = DirectSolver::default();
        let p = find_equivalent_potential(&solver, 3, 2, 24, Boundary::Periodic, 1e-10).unwrap();
        let e = -4.0 - p.binding_energy;
        let exact = -e * 2.0 / 3.0;
        assert!((p.g_m - exact).abs() < 1e-8, "{} vs {exact}", p.g_m);
        assert!((p.gamma - p.gamma_potential).abs() < 1e-6);
    }

    #[test]
    fn power_law_exponent() {
        let pts: Vec<(f64, f64)> = (1..6)
            .map(|m| (m as f64, 3.0 * (m as f64).sqrt()))
            .collect();
        assert!((scaling_exponent(&pts).unwrap() - 0.5).abs() < 1e-14);
        assert!(scaling_exponent(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn rejects_smooth_degree() {
        let solver = DirectSolver::default();
        assert!(find_equivalent_potential(&solver, 1, 2, 24, Boundary::Periodic, 1e-8).is_err());
        assert!(find_equivalent_potential(&solver, 3, 1, 24, Boundary::Periodic, 1e-8).is_err());
    }

    #[test]
    fn csv_schema() {
        let mut buf = Vec::new();
        write_equivalence_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "M,g_M_over_t,gamma_sing,gamma_pot,E_bind_over_t\n"
        );
    }
}
