//! Complex log-gamma by the Lanczos approximation (g = 7, nine terms).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;

const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `0.5 * ln(2π)`
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + x.ln()
}

/// Principal-branch `ln Γ(z)`, analytic off the negative real axis.
///
/// Left of `Re z = 1/2` the value is obtained by the upward recurrence
/// `ln Γ(z) = ln Γ(z + m) - Σ ln(z + j)`, which keeps the branch continuous
/// without going through the reflection formula.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain {
            value: z.re,
            domain: "finite complex numbers",
        });
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            function: "ln_gamma",
            location: format!("{}", z.re),
        });
    }
    if z.re >= 0.5 {
        return Ok(lanczos(z));
    }
    let m = (0.5 - z.re).ceil() as usize;
    let mut shift = Complex64::new(0.0, 0.0);
    for j in 0..m {
        shift += (z + j as f64).ln();
    }
    Ok(lanczos(z + m as f64) - shift)
}

/// `ln |Γ(x)|` for real `x`, together with the sign of `Γ(x)`.
pub fn ln_gamma_real(x: f64) -> Result<(f64, f64)> {
    let lg = ln_gamma(Complex64::new(x, 0.0))?;
    // Γ(x) < 0 exactly when an odd number of the recurrence factors is negative,
    // which shows up as an odd multiple of π in the imaginary part.
    let turns = (lg.im / PI).round() as i64;
    let sign = if turns.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok((lg.re, sign))
}

/// Real gamma function.
pub fn gamma(x: f64) -> Result<f64> {
    let (lg, sign) = ln_gamma_real(x)?;
    Ok(sign * lg.exp())
}

/// `1/Γ(z)`, entire; exactly zero at the poles of `Γ`.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    match ln_gamma(z) {
        Ok(lg) => (-lg).exp(),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// Digamma `ψ(x)` for real `x` away from the poles.
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    let mut x = x;
    let mut acc = 0.0;
    if x < 0.0 {
        // ψ(1 - x) - ψ(x) = π cot(π x)
        acc -= PI / (PI * x).tan();
        x = 1.0 - x;
    }
    while x < 16.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    acc + x.ln() - 0.5 * inv - series
}

pub(crate) fn euler_gamma() -> f64 {
    EULER_GAMMA
}
