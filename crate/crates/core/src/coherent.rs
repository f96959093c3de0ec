//! Generalized coherent states
//!
//! ```text
//! |ζ⟩ = N^{-1} Σ_n √([φ_n]!) ζ^n / [ν_n]! |k,n⟩
//! ```
//!
//! with `ν_n = φ_n` for Barut–Girardello (BG) states, `ν_n = n χ_n` for
//! Perelomov (P) states, or a caller-supplied sequence.
//!
//! Amplitudes are accumulated as logarithms through the ratio
//! `|c_n / c_{n-1}|^2 = |ζ|^2 φ_n / ν_n^2`, using the structure factor
//! directly rather than the root factorization, so the construction stays
//! valid when roots run off to infinity (for example `α_2 → 0`). The series
//! is cut at the first `N` whose geometric tail bound is below the
//! requested tolerance. `N` is kept real and positive.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraSpec, StructureSequence};
use crate::error::{Error, Result};
use crate::rep::TruncatedRep;
use crate::special::pfq_complex;

/// Default truncation tolerance on the neglected norm.
pub const DEFAULT_TOL: f64 = 1e-14;
const MAX_ORDER: usize = 2_000_000;
const RATIO_WINDOW: usize = 8;

/// Which `ν_n` sequence defines the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bg,
    P,
    /// `ν_1, ν_2, …`; must be long enough to reach the truncation order.
    Custom(Vec<f64>),
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Bg => "bg",
            Family::P => "p",
            Family::Custom(_) => "custom",
        }
    }
}

/// Normalized, truncated coherent state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    spec: AlgebraSpec,
    family: Family,
    zeta: Complex64,
    coeffs: Vec<Complex64>,
    tail_bound: f64,
    tol: f64,
}

/// `‖(K_∓ - ζ) c‖` on the indices below the state's truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenDefects {
    pub minus_defect: f64,
    pub plus_defect: f64,
}

/// Generates `ln|c_n|^2` up to normalization.
struct Amplitudes<'a> {
    seq: StructureSequence,
    family: &'a Family,
    ln_abs2: f64,
}

impl<'a> Amplitudes<'a> {
    fn new(spec: &AlgebraSpec, family: &'a Family, abs_zeta: f64) -> Result<Self> {
        Ok(Self {
            seq: StructureSequence::new(spec.clone())?,
            family,
            ln_abs2: 2.0 * abs_zeta.ln(),
        })
    }

    fn nu(&self, n: usize) -> Result<f64> {
        let v = match self.family {
            Family::Bg => self.seq.phi(n),
            Family::P => n as f64 * self.seq.chi(n),
            Family::Custom(nu) => *nu.get(n - 1).ok_or_else(|| {
                Error::Parameter(format!("custom sequence has no entry for n = {n}"))
            })?,
        };
        if !(v > 0.0) {
            return Err(Error::NonPositiveFactor { n, value: v });
        }
        Ok(v)
    }

    /// `ln(|c_n|^2 / |c_{n-1}|^2)` for `n >= 1`.
    fn log_ratio(&self, n: usize) -> Result<f64> {
        let phi = self.seq.phi(n);
        if !(phi > 0.0) {
            return Err(Error::NonPositiveFactor { n, value: phi });
        }
        let nu = self.nu(n)?;
        Ok(self.ln_abs2 + phi.ln() - 2.0 * nu.ln())
    }

    /// Limit of the ratio as `n → ∞`, where known in closed form.
    fn limit_ratio(&self, abs2: f64) -> f64 {
        match self.family {
            Family::P if self.seq.spec().p() == 1 => abs2 / self.seq.spec().alpha()[0],
            _ => 0.0,
        }
    }

    /// Largest ratio over a window past `n`, or the known limit.
    fn ratio_bound(&self, n: usize, abs2: f64) -> Result<f64> {
        let mut r = self.limit_ratio(abs2);
        for m in n..n + RATIO_WINDOW {
            let l = match self.log_ratio(m) {
                Ok(l) => l,
                Err(_) if m > n && matches!(self.family, Family::Custom(_)) => break,
                Err(e) => return Err(e),
            };
            r = r.max(l.exp());
        }
        Ok(r)
    }

    /// Log-amplitudes `ln|c_n|^2` for `n = 0..=N` and a bound on the
    /// neglected mass relative to the retained one.
    fn truncated(&self, abs2: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
        let mut logs = vec![0.0];
        let mut lse = 0.0_f64;
        loop {
            let n = logs.len();
            if n > MAX_ORDER {
                return Err(Error::NoConvergence(format!(
                    "coherent-state series needs more than {MAX_ORDER} terms"
                )));
            }
            let next = logs[n - 1] + self.log_ratio(n)?;
            let rel_next = (next - lse).exp();
            if rel_next < tol {
                let r = self.ratio_bound(n + 1, abs2)?;
                if r < 1.0 {
                    let tail = rel_next / (1.0 - r);
                    if tail < tol {
                        return Ok((logs, tail));
                    }
                }
            }
            logs.push(next);
            lse = log_add(lse, next);
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn disk_check(spec: &AlgebraSpec, family: &Family, abs2: f64) -> Result<()> {
    if matches!(family, Family::P) && spec.p() == 1 && abs2 >= spec.alpha()[0] {
        return Err(Error::OutsideDisk {
            abs2,
            radius: spec.alpha()[0],
        });
    }
    Ok(())
}

impl CoherentState {
    /// Builds the state with truncation chosen so the neglected norm is
    /// below `tol`.
    pub fn build(spec: &AlgebraSpec, family: Family, zeta: Complex64, tol: f64) -> Result<Self> {
        if !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(Error::Parameter("zeta must be finite".into()));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Parameter(format!("tolerance {tol} must lie in (0, 1)")));
        }
        let abs2 = zeta.norm_sqr();
        disk_check(spec, &family, abs2)?;
        if abs2 == 0.0 {
            return Ok(Self {
                spec: spec.clone(),
                family,
                zeta,
                coeffs: vec![Complex64::new(1.0, 0.0)],
                tail_bound: 0.0,
                tol,
            });
        }
        let amps = Amplitudes::new(spec, &family, zeta.norm())?;
        let (logs, tail_bound) = amps.truncated(abs2, tol)?;
        let lmax = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = logs.iter().map(|l| (l - lmax).exp()).sum();
        let shift = lmax + total.ln();
        let theta = zeta.arg();
        let coeffs = logs
            .iter()
            .enumerate()
            .map(|(n, l)| Complex64::from_polar((0.5 * (l - shift)).exp(), n as f64 * theta))
            .collect();
        Ok(Self {
            spec: spec.clone(),
            family,
            zeta,
            coeffs,
            tail_bound,
            tol,
        })
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Bound on the neglected norm relative to the retained norm.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Coefficients multiplied by `e^{-i n phase}`.
    pub fn evolve_diagonal(&self, phase: f64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * phase))
            .collect()
    }

    /// Writes `n,re,im,abs2` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,re,im,abs2")?;
        for (n, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{n},{:.16e},{:.16e},{:.16e}", c.re, c.im, c.norm_sqr())?;
        }
        Ok(())
    }
}

pub fn build_state(spec: &AlgebraSpec, family: Family, zeta: Complex64, tol: f64) -> Result<CoherentState> {
    CoherentState::build(spec, family, zeta, tol)
}

/// `|N|^2` from the hypergeometric closed form:
/// `0F_{2p-1}(; 2k, 1-a_i; |ξ|^2/α_p)` (BG) or
/// `1F_{2p-2}(2k; 1-a_i; |η|^2/α_p)` (P).
pub fn normalization_closed_form(spec: &AlgebraSpec, family: &Family, abs_zeta: f64) -> Result<f64> {
    let abs2 = abs_zeta * abs_zeta;
    disk_check(spec, family, abs2)?;
    let seq = StructureSequence::new(spec.clone())?;
    let one = Complex64::new(1.0, 0.0);
    let two_k = Complex64::new(2.0 * spec.k(), 0.0);
    let shifted: Vec<Complex64> = seq.roots().all().iter().map(|a| one - a).collect();
    let z = Complex64::new(abs2 / spec.leading(), 0.0);
    let series = match family {
        Family::Bg => {
            let mut lower = vec![two_k];
            lower.extend(shifted);
            pfq_complex(&[], &lower, z)?
        }
        Family::P => pfq_complex(&[two_k], &shifted, z)?,
        Family::Custom(_) => {
            return Err(Error::Parameter(
                "custom sequences have no closed-form normalization".into(),
            ))
        }
    };
    Ok(series.value.re)
}

/// `|N|^2 = Σ [φ_n]! |ζ|^{2n} / ([ν_n]!)^2` summed directly.
pub fn normalization_series(spec: &AlgebraSpec, family: &Family, abs_zeta: f64) -> Result<f64> {
    let abs2 = abs_zeta * abs_zeta;
    disk_check(spec, family, abs2)?;
    if abs2 == 0.0 {
        return Ok(1.0);
    }
    let amps = Amplitudes::new(spec, family, abs_zeta)?;
    let (logs, _) = amps.truncated(abs2, 1e-17)?;
    let lmax = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = crate::special::CompensatedSum::default();
    for l in &logs {
        acc.add((l - lmax).exp());
    }
    Ok(acc.value() * lmax.exp())
}

/// `⟨s1|s2⟩ = Σ conj(c_n^{(1)}) c_n^{(2)}`.
pub fn inner_product(s1: &CoherentState, s2: &CoherentState) -> Result<Complex64> {
    if s1.spec != s2.spec {
        return Err(Error::Mismatch("states belong to different algebra specs".into()));
    }
    if s1.family != s2.family {
        return Err(Error::Mismatch("states belong to different families".into()));
    }
    Ok(s1
        .coeffs
        .iter()
        .zip(s2.coeffs.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Radius of convergence in `|ζ|^2`: infinite except for P-type with
/// `p = 1`, where it is `α_1`.
pub fn radius_of_convergence(spec: &AlgebraSpec, family: &Family) -> f64 {
    match family {
        Family::P if spec.p() == 1 => spec.alpha()[0],
        Family::Custom(nu) => numeric_radius(spec, family, nu.len()).unwrap_or(f64::NAN),
        _ => f64::INFINITY,
    }
}

/// `ν_n^2 / φ_n` at a finite `n`, the ratio whose limit is the radius.
pub fn numeric_radius(spec: &AlgebraSpec, family: &Family, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("numeric radius needs n >= 1".into()));
    }
    let amps = Amplitudes::new(spec, family, 1.0)?;
    Ok((-amps.log_ratio(n)?).exp())
}

/// Checks `K_- |ζ⟩ = ζ|ζ⟩` and `K_+ |ζ⟩ = ζ|ζ⟩` on indices `n < N`, where
/// `N` is the state's truncation order.
pub fn lowering_eigendefect(rep: &TruncatedRep, state: &CoherentState) -> Result<EigenDefects> {
    if rep.spec() != state.spec() {
        return Err(Error::Mismatch("representation and state use different specs".into()));
    }
    let order = state.order();
    if rep.order() < order + 1 {
        return Err(Error::Mismatch(format!(
            "representation order {} must exceed the state order {order}",
            rep.order()
        )));
    }
    let c = state.coeffs();
    let zeta = state.zeta();
    let mut minus = 0.0;
    let mut plus = 0.0;
    for n in 0..order {
        let down = rep.kminus()[(n, n + 1)] * c[n + 1];
        let up = if n > 0 {
            rep.kplus()[(n, n - 1)] * c[n - 1]
        } else {
            Complex64::new(0.0, 0.0)
        };
        minus += (down - zeta * c[n]).norm_sqr();
        plus += (up - zeta * c[n]).norm_sqr();
    }
    Ok(EigenDefects {
        minus_defect: minus.sqrt(),
        plus_defect: plus.sqrt(),
    })
}

/// State with `ζ → ζ e^{-i phase}`, the evolution under `K_0 - k`.
pub fn time_evolve(state: &CoherentState, phase: f64) -> Result<CoherentState> {
    let rotated = state.zeta * Complex64::from_polar(1.0, -phase);
    // exact rotations keep full periods bit-identical
    let turns = phase / (2.0 * PI);
    let zeta = if turns == turns.round() { state.zeta } else { rotated };
    CoherentState::build(&state.spec, state.family.clone(), zeta, state.tol)
}
