//! Bracketing the weakest on-site potential that binds in three dimensions.

use serde::{Deserialize, Serialize};

use super::{extrapolate_family, BoundClass, ExtrapolationForm, GroundStateSource, Thresholds};
use crate::error::{Error, Result};
use crate::space::{Boundary, SpaceSpec};

/// What decides which side of the threshold a probe lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalPredicate {
    /// Extrapolated binding energy above `ε_E`. The binding-energy curve
    /// crosses its threshold sharply, whereas the `r_avg/L` limit shrinks
    /// gradually and leaves a wide indeterminate window above the threshold.
    #[default]
    BindingLimit,
    /// The full [`classify_bound`](super::classify_bound) verdict equals
    /// `Bound`.
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalOptions {
    pub tol_g: f64,
    /// Spacing of the coarse scan that precedes bisection, units of `t`.
    pub scan_step: f64,
    pub thresholds: Thresholds,
    pub form: ExtrapolationForm,
    pub predicate: CriticalPredicate,
    pub boundary: Boundary,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        Self {
            tol_g: 0.1,
            scan_step: 0.5,
            thresholds: Thresholds::default(),
            form: ExtrapolationForm::Quadratic,
            predicate: CriticalPredicate::BindingLimit,
            boundary: Boundary::Periodic,
        }
    }
}

/// One evaluated potential strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalProbe {
    pub g_over_t: f64,
    pub binding_limit: f64,
    pub r_avg_limit: f64,
    pub class: BoundClass,
    pub binds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalBracket {
    pub g_lo: f64,
    pub g_hi: f64,
    pub lo: CriticalProbe,
    pub hi: CriticalProbe,
    pub predicate: CriticalPredicate,
    /// Every probe in evaluation order.
    pub probes: Vec<CriticalProbe>,
}

impl CriticalBracket {
    pub fn width(&self) -> f64 {
        self.g_hi - self.g_lo
    }
}

fn probe(
    source: &dyn GroundStateSource,
    l_values: &[usize],
    g: f64,
    opts: &CriticalOptions,
) -> Result<CriticalProbe> {
    let base = SpaceSpec::with_potential(3, l_values[0], g).boundary(opts.boundary);
    let fam = extrapolate_family(source, &base, l_values, opts.form)?;
    let class = fam.classify(&opts.thresholds);
    let binds = match opts.predicate {
        CriticalPredicate::BindingLimit => fam.binding.limit > opts.thresholds.epsilon_e,
        CriticalPredicate::Classification => class == BoundClass::Bound,
    };
    Ok(CriticalProbe {
        g_over_t: g,
        binding_limit: fam.binding.limit,
        r_avg_limit: fam.r_avg.limit,
        class,
        binds,
    })
}

/// Brackets the onset of binding in `g` (units of `t`).
///
/// A coarse scan with spacing `scan_step` over `[0, 12]` (doubling the upper
/// end until it binds) locates the last non-binding → binding flip; bisection
/// then narrows that cell to `tol_g`. Taking the last flip rather than
/// bisecting `[0, 12]` directly matters: at weak coupling the delocalized
/// state's `1/L³` finite-size shift, read through the `1/L` polynomial, gives
/// small spurious positive binding limits, so the predicate is not monotone
/// over the whole range.
pub fn find_critical_potential_3d(
    source: &dyn GroundStateSource,
    l_values: &[usize],
    opts: &CriticalOptions,
) -> Result<CriticalBracket> {
    if !(opts.tol_g.is_finite() && opts.tol_g > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bracket tolerance must be positive (got {})",
            opts.tol_g
        )));
    }
    if !(opts.scan_step.is_finite() && opts.scan_step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "scan step must be positive (got {})",
            opts.scan_step
        )));
    }
    if l_values.len() < 3 {
        return Err(Error::Series(format!(
            "need at least 3 sizes (got {})",
            l_values.len()
        )));
    }
    let mut probes = Vec::new();
    let mut top = 12.0;
    let mut doublings = 0;
    let mut at_top = probe(source, l_values, top, opts)?;
    while !at_top.binds {
        doublings += 1;
        if doublings > 6 {
            return Err(Error::Bracket(format!(
                "no binding probe up to g = {top}·t"
            )));
        }
        probes.push(at_top);
        top *= 2.0;
        at_top = probe(source, l_values, top, opts)?;
    }

    let steps = (top / opts.scan_step).ceil() as usize;
    let grid: Vec<f64> = (0..steps).map(|k| k as f64 * top / steps as f64).collect();
    let mut scan = grid
        .iter()
        .map(|&g| probe(source, l_values, g, opts))
        .collect::<Result<Vec<_>>>()?;
    scan.push(at_top);
    let last_off = scan.iter().rposition(|p| !p.binds).ok_or_else(|| {
        Error::Bracket("the smooth lattice (g = 0) already classifies as binding".into())
    })?;
    let mut lo = scan[last_off];
    let mut hi = scan[last_off + 1];
    probes.extend(scan);

    while hi.g_over_t - lo.g_over_t > opts.tol_g {
        let mid = 0.5 * (lo.g_over_t + hi.g_over_t);
        let p = probe(source, l_values, mid, opts)?;
        probes.push(p);
        if p.binds {
            hi = p;
        } else {
            lo = p;
        }
    }
    Ok(CriticalBracket {
        g_lo: lo.g_over_t,
        g_hi: hi.g_over_t,
        lo,
        hi,
        predicate: opts.predicate,
        probes,
    })
}
