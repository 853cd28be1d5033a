//! Modified Bessel functions of the second kind, orders 0 and 1/2.
//!
//! `K₀` uses its ascending series (with the logarithmic term) for `x ≤ 2` and
//! a Chebyshev expansion of `√x·eˣ·K₀(x)` in `s = 4/x − 1` for `x > 2`.
//! `K_{1/2}(x) = √(π/(2x))·e^{−x}` exactly.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselOrder {
    Zero,
    Half,
}

pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!(
            "modified Bessel K diverges at x <= 0 (got {x})"
        )));
    }
    Ok(match order {
        BesselOrder::Zero => k0(x),
        BesselOrder::Half => k_half(x),
    })
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Chebyshev coefficients of `√x·eˣ·K₀(x)` on `x ∈ [2, ∞)`, `s = 4/x − 1`.
const K0_LARGE: [f64; 30] = [
    1.220_151_541_032_977_7,
    -3.144_810_131_196_450_1e-2,
    1.569_883_885_730_053_4e-3,
    -1.284_954_958_162_780_3e-4,
    1.394_981_371_887_649_9e-5,
    -1.831_755_522_719_119_5e-6,
    2.766_813_639_445_015e-7,
    -4.660_489_897_687_947_7e-8,
    8.574_034_017_414_226e-9,
    -1.697_534_509_389_061_5e-9,
    3.577_397_281_400_328_4e-10,
    -7.957_489_244_477_397e-11,
    1.855_949_114_954_926_6e-11,
    -4.514_597_883_374_519e-12,
    1.140_340_588_207_344_2e-12,
    -2.980_096_923_148_178_4e-13,
    8.032_890_775_068_374e-14,
    -2.227_513_326_746_296_4e-14,
    6.340_076_476_276_646e-15,
    -1.848_593_377_920_907_2e-15,
    5.512_055_999_404_333e-16,
    -1.678_231_125_754_900_6e-16,
    5.210_391_777_643_554e-17,
    -1.647_580_593_984_263_3e-17,
    5.300_433_771_177_336e-18,
    -1.733_171_200_582_100_1e-18,
    5.755_109_202_882_729e-19,
    -1.939_095_605_318_355_5e-19,
    6.624_610_534_536_147e-20,
    -2.293_219_717_056_011_8e-20,
];

/// `K₀(x)` for `x > 0`; callers guarantee the domain.
pub fn k0(x: f64) -> f64 {
    if x <= 2.0 {
        k0_series(x)
    } else {
        let s = 4.0 / x - 1.0;
        (-x).exp() / x.sqrt() * chebyshev(&K0_LARGE, s)
    }
}

/// `K_{1/2}(x)` for `x > 0`.
pub fn k_half(x: f64) -> f64 {
    (FRAC_PI_2 / x).sqrt() * (-x).exp()
}

fn k0_series(x: f64) -> f64 {
    // K0 = -(ln(x/2) + γ) I0(x) + Σ_{k≥1} (x²/4)^k / (k!)² H_k
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    let mut harmonic = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-18 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// Clenshaw evaluation of `c₀ + Σ cₖ Tₖ(s)`.
fn chebyshev(coeffs: &[f64], s: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs[1..].iter().rev() {
        let b0 = 2.0 * s * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    s * b1 - b2 + coeffs[0]
}

/// `√(π/(2x))·e^{−x}`, the leading large-argument form shared by both orders.
pub fn asymptotic_form(x: f64) -> f64 {
    (PI / (2.0 * x)).sqrt() * (-x).exp()
}
