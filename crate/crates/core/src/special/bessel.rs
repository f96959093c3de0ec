//! Modified Bessel functions `I_ν(x)` and `K_ν(x)` of real order.
//!
//! Temme's series for `K` at small argument, Steed's continued fraction at
//! large argument, and the continued fraction for `I'/I` combined through
//! the Wronskian.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{euler_gamma, recip_gamma};
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 100_000;
const TEMME_SWITCH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    /// First kind, `I_ν`.
    I,
    /// Second kind, `K_ν`.
    K,
}

/// `I_ν`, `K_ν` and their derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselIk {
    pub i: f64,
    pub k: f64,
    pub i_prime: f64,
    pub k_prime: f64,
}

/// Values of `1/Γ(1 ± μ)` and the two combinations Temme's series needs.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = recip_gamma(Complex64::new(1.0 + mu, 0.0)).re;
    let gammi = recip_gamma(Complex64::new(1.0 - mu, 0.0)).re;
    let gam2 = 0.5 * (gammi + gampl);
    let gam1 = if mu.abs() < 0.02 {
        // odd part of the Taylor series of 1/Γ(1 + μ)
        let m2 = mu * mu;
        -(euler_gamma() - m2 * (0.042_002_635_034_095_2 + m2 * (0.042_197_734_555_544_3 - m2 * 0.007_218_943_246_663)))
    } else {
        (gammi - gampl) / (2.0 * mu)
    };
    (gam1, gam2, gampl, gammi)
}

fn no_convergence(what: &str) -> Error {
    Error::NoConvergence(format!("modified Bessel {what} did not converge"))
}

/// `I_ν(x)`, `K_ν(x)` and derivatives for `ν >= 0`, `x > 0`.
pub fn bessel_ik(nu: f64, x: f64) -> Result<BesselIk> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            value: x,
            domain: "x > 0",
        });
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::Domain {
            value: nu,
            domain: "order >= 0",
        });
    }
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    // continued fraction for I'_ν / I_ν
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(no_convergence("CF1"));
    }

    // downward recurrence to order μ
    let mut ril = FPMIN;
    let mut ripl = h * ril;
    let ril1 = ril;
    let rip1 = ripl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
    }
    let f = ripl / ril;

    let (mut rkmu, mut rk1);
    if x < TEMME_SWITCH {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= dd / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(no_convergence("Temme series"));
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * fi;
            c = -a * c / (fi + 1.0);
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(no_convergence("Steed continued fraction"));
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }

    let rkmup = xmu * xi * rkmu - rk1;
    let rimu = xi / (f * rkmu - rkmup);
    let i = rimu * ril1 / ril;
    let i_prime = rimu * rip1 / ril;
    for step in 1..=nl {
        let rktemp = (xmu + step as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    Ok(BesselIk {
        i,
        k: rkmu,
        i_prime,
        k_prime: nu * xi * rkmu - rk1,
    })
}

/// `I_ν(x)` or `K_ν(x)` for real order `ν` and `x > 0`.
pub fn bessel_modified(kind: BesselKind, nu: f64, x: f64) -> Result<f64> {
    let order = nu.abs();
    let ik = bessel_ik(order, x)?;
    Ok(match kind {
        BesselKind::K => ik.k,
        BesselKind::I if nu >= 0.0 => ik.i,
        // I_{-ν} = I_ν + (2/π) sin(νπ) K_ν
        BesselKind::I => ik.i + 2.0 / PI * (order * PI).sin() * ik.k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn reference_values() {
        // arbitrary-precision references
        let cases = [
            (BesselKind::I, 1.0, 2.0, 1.590_636_854_637_329_1),
            (BesselKind::K, 1.0, 2.0, 0.139_865_881_816_522_43),
            (BesselKind::I, 0.0, 1.0, 1.266_065_877_752_008_3),
            (BesselKind::K, 0.0, 1.0, 0.421_024_438_240_708_33),
            (BesselKind::K, 0.5, 3.0, 0.036_025_985_131_764_593),
            (BesselKind::K, 2.3, 0.1, 572.096_866_928_289_7),
            (BesselKind::I, 2.3, 0.1, 3.795_495_898_842_524e-4),
            (BesselKind::K, 0.2, 50.0, 3.411_518_728_419_645e-23),
            (BesselKind::I, 0.2, 50.0, 2.931_369_010_444_065_8e20),
        ];
        for (kind, nu, x, want) in cases {
            let got = bessel_modified(kind, nu, x).unwrap();
            assert!(rel(got, want) < 1e-13, "{kind:?} nu={nu} x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn k_matches_integral_representation() {
        // K_ν(x) = ∫_0^∞ exp(-x cosh t) cosh(ν t) dt, trapezoid on a fine grid
        for &(nu, x) in &[(1.0f64, 2.0f64), (0.5, 0.3), (2.0, 7.5), (0.75, 1.2)] {
            let h = 1e-3;
            let mut acc = 0.5 * (-x).exp();
            let mut t = h;
            loop {
                let term = (-x * f64::cosh(t)).exp() * f64::cosh(nu * t);
                acc += term;
                if term < 1e-30 {
                    break;
                }
                t += h;
            }
            let oracle = acc * h;
            let got = bessel_modified(BesselKind::K, nu, x).unwrap();
            assert!(rel(got, oracle) < 1e-12, "nu={nu} x={x}: {got} vs {oracle}");
        }
    }

    #[test]
    fn wronskian() {
        for &nu in &[0.0, 0.25, 0.5, 1.0, 1.5, 2.7] {
            for &x in &[0.05, 0.5, 1.9, 2.1, 10.0, 60.0] {
                let a = bessel_ik(nu, x).unwrap();
                let b = bessel_ik(nu + 1.0, x).unwrap();
                let w = a.i * b.k + b.i * a.k;
                assert!(rel(w, 1.0 / x) < 1e-10, "nu={nu} x={x}: {w}");
            }
        }
    }

    #[test]
    fn small_argument_limit() {
        let v = bessel_modified(BesselKind::I, 0.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn temme_small_mu_series_matches_direct() {
        for &mu in &[0.019, -0.015, 0.01] {
            let (gam1, ..) = temme_gammas(mu);
            let gampl = recip_gamma(Complex64::new(1.0 + mu, 0.0)).re;
            let gammi = recip_gamma(Complex64::new(1.0 - mu, 0.0)).re;
            let direct = (gammi - gampl) / (2.0 * mu);
            assert!((gam1 - direct).abs() < 1e-12, "{gam1} {direct}");
        }
    }

    #[test]
    fn negative_order_and_domain() {
        let k = bessel_modified(BesselKind::K, -1.5, 2.0).unwrap();
        assert_eq!(k, bessel_modified(BesselKind::K, 1.5, 2.0).unwrap());
        // I_{-1/2}(x) = sqrt(2/(πx)) cosh x
        let i = bessel_modified(BesselKind::I, -0.5, 2.0).unwrap();
        assert!(rel(i, (2.0 / (PI * 2.0)).sqrt() * 2f64.cosh()) < 1e-13);
        assert!(bessel_modified(BesselKind::I, 1.0, 0.0).is_err());
        assert!(bessel_modified(BesselKind::K, 1.0, -1.0).is_err());
    }
}
