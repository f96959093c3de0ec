//! Weight functions for the resolution of unity and their moments.
//!
//! Integrating the projector `|ζ⟩⟨ζ|` over the angle of `ζ` leaves only the
//! diagonal `|k,n⟩⟨k,n|`, and the factor `|N|^2` in the measure cancels the
//! states' normalization. The resolution of unity therefore reduces to the
//! moment problem
//!
//! ```text
//! ∫ ρ(t) t^n dt = ([ν_n]!)^2 / [φ_n]!,   t = |ζ|^2
//! ```
//!
//! which is `[φ_n]!` for BG states and `n! [χ_n]! / (2k)_n` for P states.
//! Its solutions are Meijer G-functions of `t/α_p`:
//!
//! ```text
//! BG: ρ(t) = G^{2p,0}_{0,2p}(t/α_p | –; 0, 2k-1, -a_i) / (α_p Γ(2k) Π Γ(1-a_i))
//! P:  ρ(t) = Γ(2k) G^{2p-1,0}_{1,2p-1}(t/α_p | 2k-1; 0, -a_i) / (α_p Π Γ(1-a_i))
//! ```
//!
//! For `p = 1` these reduce to `2 z^{k-1/2} K_{2k-1}(2√z) / (α_1 Γ(2k))` and
//! `(2k-1)(1-z)^{2k-2} / α_1` on `0 < z < 1`, which requires `2k > 1`.
//!
//! Moments are integrated in `u = ln(t/α_p)`. Below the cut-off `u_lo` the
//! integrand behaves like `e^{λu}` with `λ = n + 1 + min Re b`, and that tail
//! is added in closed form. The finite-support P weight uses the substitution
//! `w = (1-z)^{2k-1}`, giving `α_1^n ∫_0^1 (1 - w^{1/(2k-1)})^n dw`.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{ln_factorial, ln_rising, AlgebraSpec, StructureSequence};
use crate::coherent::Family;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_vec, Options};
use crate::special::{bessel_modified, ln_gamma, ln_gamma_real, meijer_g_scaled, BesselKind, MeijerSpec};
use crate::susy::OscillatorParams;

const LOWER_TAIL_DECADES: f64 = 40.0;
const UPPER_STEP: f64 = 0.5;
const UPPER_CUTOFF: f64 = 1e-17;
const POSITIVITY_POINTS: usize = 512;

/// Where the weight lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Support {
    /// `(0, ∞)`
    HalfLine,
    /// `(0, upper)`
    Interval(f64),
}

/// Weight function `ρ(t) = prefactor · G(t / scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    spec: AlgebraSpec,
    family: Family,
    meijer: MeijerSpec,
    ln_prefactor: f64,
    scale: f64,
    support: Support,
}

/// `ln Π Γ(1 - a_i)`, real for a conjugate-closed root set.
fn ln_gamma_product(seq: &StructureSequence) -> Result<f64> {
    let mut acc = 0.0;
    for &a in &seq.roots().real {
        let (l, sign) = ln_gamma_real(1.0 - a)?;
        if sign < 0.0 {
            return Err(Error::Parameter(format!("Γ(1 - a) < 0 for root a = {a}")));
        }
        acc += l;
    }
    for a in &seq.roots().pairs {
        acc += 2.0 * ln_gamma(Complex64::new(1.0, 0.0) - a)?.re;
    }
    Ok(acc)
}

impl WeightFunction {
    pub fn new(spec: &AlgebraSpec, family: &Family) -> Result<Self> {
        let seq = StructureSequence::new(spec.clone())?;
        let k = spec.k();
        let minus_roots: Vec<Complex64> = seq.roots().all().iter().map(|a| -a).collect();
        let zero = Complex64::new(0.0, 0.0);
        let scale = spec.leading();
        let ln_gprod = ln_gamma_product(&seq)?;
        let (ln_g2k, _) = ln_gamma_real(2.0 * k)?;
        let (meijer, ln_prefactor, support) = match family {
            Family::Bg => {
                let mut lower = vec![zero, Complex64::new(2.0 * k - 1.0, 0.0)];
                lower.extend(minus_roots);
                let ms = MeijerSpec::from_complex(vec![], lower)?;
                (ms, -(scale.ln() + ln_g2k + ln_gprod), Support::HalfLine)
            }
            Family::P => {
                if spec.p() == 1 && 2.0 * k <= 1.0 {
                    return Err(Error::Parameter(format!(
                        "P-type weight for p = 1 needs 2k > 1, got k = {k}"
                    )));
                }
                let mut lower = vec![zero];
                lower.extend(minus_roots);
                let ms = MeijerSpec::from_complex(vec![Complex64::new(2.0 * k - 1.0, 0.0)], lower)?;
                let support = if spec.p() == 1 {
                    Support::Interval(scale)
                } else {
                    Support::HalfLine
                };
                (ms, ln_g2k - scale.ln() - ln_gprod, support)
            }
            Family::Custom(_) => {
                return Err(Error::Parameter("no weight function for custom sequences".into()))
            }
        };
        Ok(Self {
            spec: spec.clone(),
            family: family.clone(),
            meijer,
            ln_prefactor,
            scale,
            support,
        })
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn meijer(&self) -> &MeijerSpec {
        &self.meijer
    }

    pub fn prefactor(&self) -> f64 {
        self.ln_prefactor.exp()
    }

    /// Argument scale `α_p` in `G(t / α_p)`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn support(&self) -> Support {
        self.support
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let inside = match self.support {
            Support::HalfLine => t > 0.0 && t.is_finite(),
            Support::Interval(hi) => t > 0.0 && t < hi,
        };
        if inside {
            Ok(())
        } else {
            Err(Error::Domain {
                value: t,
                domain: "weight support",
            })
        }
    }

    /// `ρ(t)`: closed forms for `p = 1`, Meijer G otherwise.
    pub fn density(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        if self.spec.p() > 1 {
            return self.density_via_meijer(t);
        }
        let k = self.spec.k();
        let z = t / self.scale;
        match self.family {
            Family::Bg => {
                let nu = 2.0 * k - 1.0;
                let kv = bessel_modified(BesselKind::K, nu, 2.0 * z.sqrt())?;
                Ok(2.0 * z.powf(nu / 2.0) * kv * self.ln_prefactor.exp())
            }
            _ => Ok((2.0 * k - 1.0) * (1.0 - z).powf(2.0 * k - 2.0) / self.scale),
        }
    }

    /// `ρ(t)` through the Meijer G representation for every `p`.
    pub fn density_via_meijer(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let g = meijer_g_scaled(&self.meijer, t / self.scale)?;
        Ok(g.mantissa * (g.log_scale + self.ln_prefactor).exp())
    }

    /// `(mantissa, log_scale)` with `ρ = mantissa · e^{log_scale}`.
    fn density_scaled(&self, t: f64) -> Result<(f64, f64)> {
        if self.spec.p() == 1 {
            let d = self.density(t)?;
            return Ok((d, 0.0));
        }
        let g = meijer_g_scaled(&self.meijer, t / self.scale)?;
        Ok((g.mantissa, g.log_scale + self.ln_prefactor))
    }

    /// Checks `ρ >= 0` on a 512-point grid over the support. The half-line
    /// grid is logarithmic from `10^-3 α_p` to where the density has decayed.
    pub fn check_positivity(&self) -> Result<()> {
        let grid: Vec<f64> = match self.support {
            Support::Interval(hi) => (1..=POSITIVITY_POINTS)
                .map(|i| hi * i as f64 / (POSITIVITY_POINTS + 1) as f64)
                .collect(),
            Support::HalfLine => {
                let q = (self.meijer.lower().len() - self.meijer.upper().len()) as f64;
                let z_hi = (36.0 / q).powf(q);
                let (lo, hi) = (1e-3f64.ln(), z_hi.ln());
                (0..POSITIVITY_POINTS)
                    .map(|i| self.scale * (lo + (hi - lo) * i as f64 / (POSITIVITY_POINTS - 1) as f64).exp())
                    .collect()
            }
        };
        for t in grid {
            let rho = self.density(t)?;
            if !(rho >= 0.0) {
                return Err(Error::Parameter(format!("weight is negative at t = {t}: {rho}")));
            }
        }
        Ok(())
    }
}

pub fn weight_density(ws: &WeightFunction, t: f64) -> Result<f64> {
    ws.density(t)
}

/// `ln ∫ ρ(t) t^n dt` required by the moment law.
pub fn moment_target(spec: &AlgebraSpec, family: &Family, n: usize) -> Result<f64> {
    let seq = StructureSequence::new(spec.clone())?;
    match family {
        Family::Bg => seq.log_phi_fact(n),
        Family::P => Ok(ln_factorial(n) + seq.log_chi_fact(n)? - ln_rising(2.0 * spec.k(), n)),
        Family::Custom(_) => Err(Error::Parameter("no moment law for custom sequences".into())),
    }
}

/// Moments `n = 0..=max_n` by quadrature, as logarithms, with relative
/// error estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moments {
    pub log_values: Vec<f64>,
    pub rel_errors: Vec<f64>,
}

/// Adaptive quadrature of `ρ(t) t^n` for all `n <= max_n` at once.
pub fn moments_quadrature(ws: &WeightFunction, max_n: usize) -> Result<Moments> {
    let targets: Vec<f64> = (0..=max_n)
        .map(|n| moment_target(&ws.spec, &ws.family, n))
        .collect::<Result<_>>()?;
    let opts = Options {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        max_intervals: 4000,
        initial_pieces: 16,
    };
    let dim = max_n + 1;
    let ln_scale = ws.scale.ln();

    let (values, errors) = match ws.support {
        Support::Interval(_) => {
            // α_1^n ∫_0^1 (1 - w^{1/(2k-1)})^n dw
            let expo = 1.0 / (2.0 * ws.spec.k() - 1.0);
            let r = integrate_vec(
                |w, out| {
                    let base = 1.0 - w.powf(expo);
                    for (n, o) in out.iter_mut().enumerate() {
                        *o = (n as f64 * ln_scale - targets[n]).exp() * base.powi(n as i32);
                    }
                    Ok(())
                },
                0.0,
                1.0,
                dim,
                opts,
            )?;
            (r.values, r.errors)
        }
        Support::HalfLine => {
            let min_b = ws.meijer.lower().iter().map(|b| b.re).fold(f64::INFINITY, f64::min);
            let lambda0 = 1.0 + min_b;
            if !(lambda0 > 0.0) {
                return Err(Error::Parameter("weight is not integrable at t = 0".into()));
            }
            // ρ(t) t^{n+1} in u = ln(t/α_p), divided by the target
            let integrand = |u: f64, out: &mut [f64]| -> Result<()> {
                let (m, ls) = ws.density_scaled(ws.scale * u.exp())?;
                for (n, o) in out.iter_mut().enumerate() {
                    let e = ls + (n as f64 + 1.0) * (u + ln_scale) - targets[n];
                    *o = if m == 0.0 { 0.0 } else { m * e.exp() };
                }
                Ok(())
            };
            let u_lo = (-LOWER_TAIL_DECADES / lambda0).max(-700.0);
            let mut buf = vec![0.0; dim];
            let mut u_hi = 0.0;
            let mut peak: f64 = 0.0;
            loop {
                integrand(u_hi, &mut buf)?;
                let here = buf.iter().copied().fold(0.0, f64::max);
                peak = peak.max(here);
                if u_hi > 0.0 && here < UPPER_CUTOFF * peak.max(1.0) {
                    break;
                }
                u_hi += UPPER_STEP;
                if u_hi > 60.0 {
                    return Err(Error::NoConvergence("weight tail does not decay".into()));
                }
            }
            let r = integrate_vec(integrand, u_lo, u_hi, dim, opts)?;
            integrand(u_lo, &mut buf)?;
            let values = r
                .values
                .iter()
                .enumerate()
                .map(|(n, v)| v + buf[n] / (n as f64 + lambda0))
                .collect();
            (values, r.errors)
        }
    };
    let mut log_values = Vec::with_capacity(dim);
    let mut rel_errors = Vec::with_capacity(dim);
    for n in 0..dim {
        if !(values[n] > 0.0) {
            return Err(Error::NoConvergence(format!(
                "moment {n} came out non-positive ({})",
                values[n]
            )));
        }
        log_values.push(values[n].ln() + targets[n]);
        rel_errors.push(errors[n] / values[n]);
    }
    Ok(Moments {
        log_values,
        rel_errors,
    })
}

/// `ln ∫ ρ(t) t^n dt` by quadrature.
pub fn moment_quadrature(ws: &WeightFunction, n: usize) -> Result<f64> {
    Ok(moments_quadrature(ws, n)?.log_values[n])
}

/// `max_{n <= m} |moment / target - 1|`.
pub fn unity_defect(spec: &AlgebraSpec, family: &Family, m: usize) -> Result<f64> {
    let ws = WeightFunction::new(spec, family)?;
    let moments = moments_quadrature(&ws, m)?;
    let mut worst: f64 = 0.0;
    for n in 0..=m {
        let target = moment_target(spec, family, n)?;
        worst = worst.max((moments.log_values[n] - target).exp_m1().abs());
    }
    Ok(worst)
}

/// One row of a weight table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightRow {
    pub gamma: f64,
    pub t: f64,
    pub rho: f64,
}

/// Cubic-oscillator weights for each `γ` on the grid `t_grid`.
pub fn weight_table(family: &Family, gammas: &[f64], t_grid: &[f64]) -> Result<Vec<WeightRow>> {
    let mut rows = Vec::with_capacity(gammas.len() * t_grid.len());
    for &gamma in gammas {
        let params = OscillatorParams::at_cubic_point(gamma)?;
        let spec = params.cubic_algebra_spec()?;
        let ws = WeightFunction::new(&spec, family)?;
        for &t in t_grid {
            let rho = ws.density(t)?;
            if !(rho.is_finite() && rho >= 0.0) {
                return Err(Error::Parameter(format!("weight at γ = {gamma}, t = {t} is {rho}")));
            }
            rows.push(WeightRow { gamma, t, rho });
        }
    }
    Ok(rows)
}

/// Writes `gamma,t,rho` rows with round-trip precision.
pub fn write_weight_csv<W: Write>(rows: &[WeightRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "gamma,t,rho")?;
    for r in rows {
        writeln!(out, "{:.16e},{:.16e},{:.16e}", r.gamma, r.t, r.rho)?;
    }
    Ok(())
}
