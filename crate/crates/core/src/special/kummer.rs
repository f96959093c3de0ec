//! Kummer's confluent function `1F1(a; b; x)` and the logarithmic derivative
//! `d/dx ln 1F1(a; b; -x²)` used by the modified oscillator.
//!
//! Negative arguments go through Kummer's transformation
//! `1F1(a; b; -y) = e^{-y} 1F1(b - a; b; y)`, which turns the alternating
//! series into one with terms of a single sign whenever `b > a`. The ratios
//! needed for the log-derivative share the upper parameter `b - a`, so the
//! exponential prefactors cancel exactly.

use super::CompensatedSum;
use crate::error::{Error, Result};

/// Largest `|x|` (for `kummer_m`) or `x²` (for the log-derivative) accepted.
pub const MAX_ARGUMENT: f64 = 600.0;
const MAX_TERMS: usize = 20_000;
const REL_TOL: f64 = 1e-17;

fn check_lower(b: f64) -> Result<()> {
    if b <= 0.0 && b == b.round() {
        return Err(Error::Pole {
            function: "1F1",
            location: format!("b = {b}"),
        });
    }
    Ok(())
}

/// `Σ_n (c)_n / (b + j)_n y^n / n!` for `j = 0..shifts`, summed together.
fn shifted_series<const SHIFTS: usize>(c: f64, b: f64, y: f64) -> Result<[f64; SHIFTS]> {
    let mut sums = [CompensatedSum::default(); SHIFTS];
    let mut terms = [1.0; SHIFTS];
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        for (s, t) in sums.iter_mut().zip(terms.iter()) {
            s.add(*t);
        }
        let past_peak = nf > y + c.abs() + 2.0;
        let done = terms
            .iter()
            .zip(sums.iter())
            .all(|(t, s)| t.abs() <= REL_TOL * s.value().abs());
        if past_peak && done {
            return Ok(sums.map(|s| s.value()));
        }
        for (j, t) in terms.iter_mut().enumerate() {
            *t *= (c + nf) * y / ((b + j as f64 + nf) * (nf + 1.0));
        }
    }
    Err(Error::NoConvergence(format!(
        "1F1 series with y = {y} did not converge"
    )))
}

/// `1F1(a; b; x)` for real parameters, `|x| <= 600`.
pub fn kummer_m(a: f64, b: f64, x: f64) -> Result<f64> {
    check_lower(b)?;
    if !(x.abs() <= MAX_ARGUMENT) {
        return Err(Error::Domain {
            value: x,
            domain: "|x| <= 600",
        });
    }
    if x >= 0.0 {
        let [m] = shifted_series::<1>(a, b, x)?;
        Ok(m)
    } else {
        let [m] = shifted_series::<1>(b - a, b, -x)?;
        Ok((x).exp() * m)
    }
}

/// `f(x) = d/dx ln 1F1(a; b; -x²) = -2x (a/b) 1F1(a+1; b+1; -x²) / 1F1(a; b; -x²)`.
pub fn kummer_log_derivative(a: f64, b: f64, x: f64) -> Result<f64> {
    Ok(kummer_log_derivative_pair(a, b, x)?.0)
}

/// `(f(x), f'(x))` with `f` as in [`kummer_log_derivative`]; `f'` is obtained
/// analytically from `f' = M''/M - f²`.
pub fn kummer_log_derivative_pair(a: f64, b: f64, x: f64) -> Result<(f64, f64)> {
    check_lower(b)?;
    check_lower(b + 1.0)?;
    let y = x * x;
    if !(y <= MAX_ARGUMENT) {
        return Err(Error::Domain {
            value: x,
            domain: "x² <= 600",
        });
    }
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let [m0, m1, m2] = shifted_series::<3>(b - a, b, y)?;
    if !(m0.abs() > f64::MIN_POSITIVE) || !m0.is_finite() {
        return Err(Error::Parameter(format!(
            "1F1({a}; {b}; -x²) vanishes at x = {x}"
        )));
    }
    let r1 = m1 / m0;
    let r2 = m2 / m0;
    let ab = a / b;
    let f = -2.0 * x * ab * r1;
    let f_prime = -2.0 * ab * r1 + 4.0 * y * ab * (a + 1.0) / (b + 1.0) * r2 - f * f;
    Ok((f, f_prime))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_cases() {
        // 1F1(a; a; x) = e^x
        assert!((kummer_m(1.3, 1.3, -2.5).unwrap() - (-2.5f64).exp()).abs() < 1e-15);
        assert!((kummer_m(1.3, 1.3, 4.0).unwrap() / 4f64.exp() - 1.0).abs() < 1e-14);
        // 1F1(1; 2; x) = (e^x - 1)/x
        let x = -30.0;
        let want = (f64::exp(x) - 1.0) / x;
        assert!((kummer_m(1.0, 2.0, x).unwrap() / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_derivative_trivial_points() {
        assert_eq!(kummer_log_derivative(0.875, 1.75, 0.0).unwrap(), 0.0);
        for &x in &[0.3, 2.0, 9.0] {
            assert_eq!(kummer_log_derivative(0.0, 1.75, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        // reference derivative of ln 1F1(7/8; 7/4; -x²) at x = 1
        let f = kummer_log_derivative(0.875, 1.75, 1.0).unwrap();
        assert!((f - (-0.821_570_427_401_228_2)).abs() < 1e-13);

        let h = 1e-5;
        let ln_m = |x: f64| kummer_m(0.875, 1.75, -x * x).unwrap().ln();
        let fd = (ln_m(1.0 + h) - ln_m(1.0 - h)) / (2.0 * h);
        assert!((f - fd).abs() < 1e-7, "{f} vs {fd}");
    }

    #[test]
    fn derivative_of_log_derivative() {
        for &(a, b) in &[(0.875, 1.75), (1.1, 1.6), (-0.2, 1.9)] {
            for &x in &[0.4, 1.5, 4.0, 10.0] {
                let (_, fp) = kummer_log_derivative_pair(a, b, x).unwrap();
                let h = 1e-5;
                let fd = (kummer_log_derivative(a, b, x + h).unwrap()
                    - kummer_log_derivative(a, b, x - h).unwrap())
                    / (2.0 * h);
                assert!((fp - fd).abs() < 1e-7 * (1.0 + fp.abs()), "a={a} x={x}: {fp} vs {fd}");
            }
        }
    }

    #[test]
    fn large_argument_asymptotics() {
        // f(x) -> -2a/x for large x
        let x = 20.0;
        let f = kummer_log_derivative(0.875, 1.75, x).unwrap();
        assert!((f * x / (-2.0 * 0.875) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(kummer_m(1.0, -2.0, 1.0).is_err());
        assert!(kummer_log_derivative(0.5, 1.5, 30.0).is_err());
    }
}
