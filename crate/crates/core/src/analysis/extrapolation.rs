//! Finite-size extrapolation and the bound/delocalized verdict.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{average_radius, GroundStateSource};
use crate::error::{Error, Result};
use crate::fitting::{fit_inverse_poly, FitResult};
use crate::space::SpaceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    BindingEnergy,
    RAvgOverL,
}

/// Fit form for the size dependence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationForm {
    /// `a + b/L + c/L²`
    #[default]
    Quadratic,
    /// `a + c/L²`
    InverseSquare,
}

impl ExtrapolationForm {
    fn powers(&self) -> &'static [u32] {
        match self {
            ExtrapolationForm::Quadratic => &[0, 1, 2],
            ExtrapolationForm::InverseSquare => &[0, 2],
        }
    }
}

impl std::str::FromStr for ExtrapolationForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(ExtrapolationForm::Quadratic),
            "inverse-square" | "inverse_square" => Ok(ExtrapolationForm::InverseSquare),
            other => Err(Error::InvalidInput(format!(
                "unknown extrapolation form `{other}` (expected quadratic or inverse-square)"
            ))),
        }
    }
}

/// Default size families: `{40, 60, 80, 100}` in 2D, `{10, 12, …, 20}` in 3D.
pub fn default_sizes(dim: usize) -> Vec<usize> {
    match dim {
        1 => vec![100, 200, 300, 400],
        2 => vec![40, 60, 80, 100],
        _ => (10..=20).step_by(2).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationSeries {
    pub l_values: Vec<usize>,
    pub observable: Observable,
    pub values: Vec<f64>,
    pub fit: FitResult,
    /// The `L → ∞` value, the fit's constant term.
    pub limit: f64,
}

/// Fits a series that has already been measured.
pub fn extrapolate_values(
    observable: Observable,
    l_values: &[usize],
    values: &[f64],
    form: ExtrapolationForm,
) -> Result<ExtrapolationSeries> {
    if l_values.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: l_values.len(),
            got: values.len(),
        });
    }
    if l_values.len() < 3 {
        return Err(Error::Series(format!(
            "need at least 3 sizes (got {})",
            l_values.len()
        )));
    }
    if !l_values.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::Series("sizes must be strictly increasing".into()));
    }
    let points: Vec<(f64, f64)> = l_values
        .iter()
        .zip(values)
        .map(|(&l, &y)| (l as f64, y))
        .collect();
    let fit = fit_inverse_poly(&points, form.powers())?;
    Ok(ExtrapolationSeries {
        l_values: l_values.to_vec(),
        observable,
        values: values.to_vec(),
        limit: fit.param("a"),
        fit,
    })
}

/// One member of a size family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizePoint {
    pub extent: usize,
    pub energy_over_t: f64,
    pub binding_over_t: f64,
    pub r_avg: f64,
}

/// Both extrapolated observables of one size family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyExtrapolation {
    pub spec: SpaceSpec,
    pub points: Vec<SizePoint>,
    pub binding: ExtrapolationSeries,
    pub r_avg: ExtrapolationSeries,
}

impl FamilyExtrapolation {
    pub fn classify(&self, thresholds: &Thresholds) -> BoundClass {
        classify_bound(&self.binding, &self.r_avg, thresholds)
            .expect("both series share their sizes by construction")
    }
}

/// Solves `base` at every size (in parallel) and extrapolates the binding
/// energy and `r_avg/L`. Any unconverged member rejects the family.
pub fn extrapolate_family(
    source: &dyn GroundStateSource,
    base: &SpaceSpec,
    l_values: &[usize],
    form: ExtrapolationForm,
) -> Result<FamilyExtrapolation> {
    if l_values.len() < 3 || !l_values.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::Series(format!(
            "need at least 3 strictly increasing sizes (got {l_values:?})"
        )));
    }
    let t = source.hopping();
    let points: Vec<SizePoint> = l_values
        .par_iter()
        .map(|&extent| {
            let spec = SpaceSpec { extent, ..*base };
            let gs = source.ground_state(&spec).map_err(|e| match e {
                Error::NotConverged { .. } => {
                    Error::Series(format!("member L = {extent} did not converge: {e}"))
                }
                other => other,
            })?;
            Ok(SizePoint {
                extent,
                energy_over_t: gs.energy / t,
                binding_over_t: gs.binding_over_t(),
                r_avg: average_radius(&gs.state, &gs.graph)?,
            })
        })
        .collect::<Result<_>>()?;
    let binding: Vec<f64> = points.iter().map(|p| p.binding_over_t).collect();
    let ratio: Vec<f64> = points.iter().map(|p| p.r_avg / p.extent as f64).collect();
    Ok(FamilyExtrapolation {
        spec: *base,
        binding: extrapolate_values(Observable::BindingEnergy, l_values, &binding, form)?,
        r_avg: extrapolate_values(Observable::RAvgOverL, l_values, &ratio, form)?,
        points,
    })
}

/// One observable of a size family.
pub fn extrapolate(
    source: &dyn GroundStateSource,
    observable: Observable,
    base: &SpaceSpec,
    l_values: &[usize],
    form: ExtrapolationForm,
) -> Result<ExtrapolationSeries> {
    let family = extrapolate_family(source, base, l_values, form)?;
    Ok(match observable {
        Observable::BindingEnergy => family.binding,
        Observable::RAvgOverL => family.r_avg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundClass {
    Bound,
    Delocalized,
    Indeterminate,
}

impl std::fmt::Display for BoundClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundClass::Bound => "bound",
            BoundClass::Delocalized => "delocalized",
            BoundClass::Indeterminate => "indeterminate",
        })
    }
}

/// Decision thresholds on the extrapolated limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Binding energy, units of `t`.
    pub epsilon_e: f64,
    /// `r_avg/L`.
    pub epsilon_r: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            epsilon_e: 1e-3,
            epsilon_r: 0.02,
        }
    }
}

/// Bound when the binding limit exceeds `ε_E` and the `r_avg/L` limit is
/// below `ε_r`; delocalized when both say the opposite; otherwise
/// indeterminate.
pub fn classify_bound(
    binding: &ExtrapolationSeries,
    r_avg: &ExtrapolationSeries,
    thresholds: &Thresholds,
) -> Result<BoundClass> {
    if binding.l_values != r_avg.l_values {
        return Err(Error::InvalidInput(
            "binding and r_avg series must cover the same sizes".into(),
        ));
    }
    if binding.observable != Observable::BindingEnergy || r_avg.observable != Observable::RAvgOverL
    {
        return Err(Error::InvalidInput(
            "series passed in the wrong order".into(),
        ));
    }
    let bound_e = binding.limit > thresholds.epsilon_e;
    let local_r = r_avg.limit < thresholds.epsilon_r;
    Ok(match (bound_e, local_r) {
        (true, true) => BoundClass::Bound,
        (false, false) => BoundClass::Delocalized,
        _ => BoundClass::Indeterminate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(observable: Observable, limit: f64) -> ExtrapolationSeries {
        let ls = [10usize, 12, 14, 16];
        let vals: Vec<f64> = ls.iter().map(|&l| limit + 0.3 / l as f64).collect();
        extrapolate_values(observable, &ls, &vals, ExtrapolationForm::Quadratic).unwrap()
    }

    #[test]
    fn planted_limit_is_recovered() {
        let ls = [10usize, 12, 14, 16, 18, 20];
        let vals: Vec<f64> = ls
            .iter()
            .map(|&l| 0.25 - 1.5 / l as f64 + 4.0 / (l * l) as f64)
            .collect();
        let s = extrapolate_values(
            Observable::BindingEnergy,
            &ls,
            &vals,
            ExtrapolationForm::Quadratic,
        )
        .unwrap();
        assert!((s.limit - 0.25).abs() < 1e-12);

        let vals: Vec<f64> = ls.iter().map(|&l| 0.1 + 2.0 / (l * l) as f64).collect();
        let s = extrapolate_values(
            Observable::RAvgOverL,
            &ls,
            &vals,
            ExtrapolationForm::InverseSquare,
        )
        .unwrap();
        assert!((s.limit - 0.1).abs() < 1e-12);
    }

    #[test]
    fn series_preconditions() {
        let r = extrapolate_values(
            Observable::BindingEnergy,
            &[10, 12],
            &[1.0, 1.0],
            ExtrapolationForm::Quadratic,
        );
        assert!(matches!(r, Err(Error::Series(_))));
        let r = extrapolate_values(
            Observable::BindingEnergy,
            &[10, 12, 11],
            &[1.0; 3],
            ExtrapolationForm::Quadratic,
        );
        assert!(matches!(r, Err(Error::Series(_))));
        let r = extrapolate_values(
            Observable::BindingEnergy,
            &[10, 12, 14],
            &[1.0; 2],
            ExtrapolationForm::Quadratic,
        );
        assert!(r.is_err());
    }

    #[test]
    fn classification_table() {
        let th = Thresholds::default();
        let e_hi = series(Observable::BindingEnergy, 0.2);
        let e_lo = series(Observable::BindingEnergy, 1e-5);
        let r_hi = series(Observable::RAvgOverL, 0.3);
        let r_lo = series(Observable::RAvgOverL, 0.001);
        assert_eq!(
            classify_bound(&e_hi, &r_lo, &th).unwrap(),
            BoundClass::Bound
        );
        assert_eq!(
            classify_bound(&e_lo, &r_hi, &th).unwrap(),
            BoundClass::Delocalized
        );
        assert_eq!(
            classify_bound(&e_hi, &r_hi, &th).unwrap(),
            BoundClass::Indeterminate
        );
        assert_eq!(
            classify_bound(&e_lo, &r_lo, &th).unwrap(),
            BoundClass::Indeterminate
        );
        assert!(classify_bound(&r_lo, &e_hi, &th).is_err());
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let th = Thresholds::default();
        let e = series(Observable::BindingEnergy, 0.2);
        let r = extrapolate_values(
            Observable::RAvgOverL,
            &[10, 12, 14],
            &[0.1; 3],
            ExtrapolationForm::Quadratic,
        )
        .unwrap();
        assert!(classify_bound(&e, &r, &th).is_err());
    }

    #[test]
    fn forms_parse() {
        assert_eq!(
            "quadratic".parse::<ExtrapolationForm>().unwrap(),
            ExtrapolationForm::Quadratic
        );
        assert_eq!(
            "inverse-square".parse::<ExtrapolationForm>().unwrap(),
            ExtrapolationForm::InverseSquare
        );
        assert!("cubic".parse::<ExtrapolationForm>().is_err());
    }
}
