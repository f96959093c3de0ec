//! Structure function, structure factor, deformation factor and generalized
//! factorials of the polynomial algebra `su_{2p-1}(1,1)`.
//!
//! With `K = k(k-1)` and `Y_n = (k+n)(k+n-1)`,
//!
//! ```text
//! Φ(x)  = Σ_{r=1..p} α_r x^r
//! φ_n   = Φ(Y_n) - Φ(K)            (structure factor)
//! χ_n   = φ_n / (n (2k+n-1))       (deformation factor)
//!       = Σ_r α_r Σ_{s=1..r} K^{r-s} Y_n^{s-1}
//! ```
//!
//! Since `Y_n - K = n(2k+n-1)` exactly, `φ_n` is evaluated as that product
//! times the double sum, which avoids the cancellation in `Φ(Y_n) - Φ(K)`.
//!
//! As a polynomial in `n`, `χ_n = α_p Π_i (n - a_i)` with `2p-2` roots.
//! They are obtained from the `p-1` roots `y_j` of `Q(y) = (Φ(y) - Φ(K))/(y - K)`
//! through `(k + n - 1/2)^2 = y + 1/4`. Generalized factorials then follow
//! from Pochhammer symbols:
//!
//! ```text
//! [χ_n]! = α_p^n Π_i (1 - a_i)_n
//! [φ_n]! = n! (2k)_n [χ_n]!
//! ```
//!
//! All factorials are handled as natural logarithms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_gamma, CompensatedSum};

/// Default largest level index validated at construction.
pub const DEFAULT_N_MAX: usize = 256;
const MONOTONICITY_GRID: usize = 1024;
const IMAG_SNAP: f64 = 1e-10;

#[derive(Serialize, Deserialize)]
struct RawSpec {
    p: usize,
    alpha: Vec<f64>,
    k: f64,
}

/// Coefficients `α_1..α_p` of the structure function and the index `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct AlgebraSpec {
    alpha: Vec<f64>,
    k: f64,
    n_max: usize,
}

impl TryFrom<RawSpec> for AlgebraSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        if raw.p != raw.alpha.len() {
            return Err(Error::InvalidSpec(format!(
                "p = {} but {} coefficients given",
                raw.p,
                raw.alpha.len()
            )));
        }
        AlgebraSpec::new(raw.alpha, raw.k)
    }
}

impl From<AlgebraSpec> for RawSpec {
    fn from(spec: AlgebraSpec) -> Self {
        RawSpec {
            p: spec.alpha.len(),
            alpha: spec.alpha,
            k: spec.k,
        }
    }
}

impl AlgebraSpec {
    /// Validates with levels up to [`DEFAULT_N_MAX`].
    pub fn new(alpha: Vec<f64>, k: f64) -> Result<Self> {
        Self::with_n_max(alpha, k, DEFAULT_N_MAX)
    }

    /// Validates the spec for levels `n <= n_max`.
    ///
    /// Rejects `α_1 <= 0`, `α_p = 0`, `k <= 0`, non-finite input, and any
    /// structure function that fails to increase between consecutive levels:
    /// `φ_1 > 0` and `Φ' > 0` on a grid over `[k(k+1), (k+n_max)(k+n_max-1)]`.
    pub fn with_n_max(alpha: Vec<f64>, k: f64, n_max: usize) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidSpec("at least one coefficient is required".into()));
        }
        if alpha.iter().any(|a| !a.is_finite()) || !k.is_finite() {
            return Err(Error::InvalidSpec("coefficients and k must be finite".into()));
        }
        if alpha[0] <= 0.0 {
            return Err(Error::InvalidSpec(format!("alpha_1 = {} must be positive", alpha[0])));
        }
        if *alpha.last().unwrap() == 0.0 {
            return Err(Error::InvalidSpec("leading coefficient alpha_p must be nonzero".into()));
        }
        if k <= 0.0 {
            return Err(Error::InvalidSpec(format!("k = {k} must be positive")));
        }
        let spec = Self {
            alpha,
            k,
            n_max: n_max.max(1),
        };
        spec.check_monotone()?;
        Ok(spec)
    }

    fn check_monotone(&self) -> Result<()> {
        let lo = self.k * (self.k + 1.0);
        let m = self.n_max as f64;
        let hi = (self.k + m) * (self.k + m - 1.0);
        for i in 0..MONOTONICITY_GRID {
            let x = lo + (hi - lo) * i as f64 / (MONOTONICITY_GRID - 1) as f64;
            let slope = self.derivative(x);
            if !(slope > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "structure function is not increasing at x = {x} (slope {slope})"
                )));
            }
        }
        let phi1 = 2.0 * self.k * chi_double_sum(&self.alpha, self.casimir_argument(), lo);
        if !(phi1 > 0.0) {
            return Err(Error::InvalidSpec(format!("phi_1 = {phi1} must be positive")));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Leading coefficient `α_p`.
    pub fn leading(&self) -> f64 {
        *self.alpha.last().unwrap()
    }

    /// `K = k(k-1)`.
    pub fn casimir_argument(&self) -> f64 {
        self.k * (self.k - 1.0)
    }

    /// `Φ(x)` without domain checks.
    pub fn phi_unchecked(&self, x: f64) -> f64 {
        self.alpha.iter().rev().fold(0.0, |acc, a| (acc + a) * x)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.alpha
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (r, a)| acc * x + (r + 1) as f64 * a)
    }

    /// `Φ(k(k-1))`, the Casimir eigenvalue.
    pub fn casimir_value(&self) -> f64 {
        self.phi_unchecked(self.casimir_argument())
    }
}

/// `Φ(x) = Σ α_r x^r` for `x >= -1/4`.
pub fn eval_structure_function(spec: &AlgebraSpec, x: f64) -> Result<f64> {
    if !(x >= -0.25) {
        return Err(Error::Domain {
            value: x,
            domain: "x >= -1/4",
        });
    }
    Ok(spec.phi_unchecked(x))
}

fn chi_double_sum(alpha: &[f64], kk: f64, y: f64) -> f64 {
    // Σ_r α_r Σ_{s=1..r} K^{r-s} Y^{s-1}; the inner sum obeys h_r = K h_{r-1} + Y^{r-1}
    let mut acc = 0.0;
    let mut h = 0.0;
    let mut y_pow = 1.0;
    for a in alpha {
        h = kk * h + y_pow;
        acc += a * h;
        y_pow *= y;
    }
    acc
}

/// Which generalized factorial to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorialKind {
    Phi,
    Chi,
}

/// Roots of `χ_n` as a polynomial in `n`, grouped for real arithmetic.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    /// Real roots.
    pub real: Vec<f64>,
    /// One representative (positive imaginary part) per conjugate pair.
    pub pairs: Vec<Complex64>,
}

impl RootSet {
    /// All `2p-2` roots, each pair listed as `a, conj(a)`.
    pub fn all(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.real.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        for a in &self.pairs {
            out.push(*a);
            out.push(a.conj());
        }
        out
    }

    pub fn len(&self) -> usize {
        self.real.len() + 2 * self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_complex(&self) -> bool {
        !self.pairs.is_empty()
    }
}

/// Result of [`pochhammer_log`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PochhammerLog {
    /// The product contains an exact zero factor.
    Zero,
    /// `ln (z)_n` on a branch continuous in `z`.
    Log(Complex64),
}

/// `ln (z)_n = ln Γ(z+n) - ln Γ(z)`.
pub fn pochhammer_log(z: Complex64, n: usize) -> PochhammerLog {
    if n == 0 {
        return PochhammerLog::Log(Complex64::new(0.0, 0.0));
    }
    let nonpositive_int = z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round();
    if nonpositive_int && (-z.re) < n as f64 {
        return PochhammerLog::Zero;
    }
    if nonpositive_int || n <= 64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += (z + j as f64).ln();
        }
        return PochhammerLog::Log(acc);
    }
    match (ln_gamma(z + n as f64), ln_gamma(z)) {
        (Ok(a), Ok(b)) => PochhammerLog::Log(a - b),
        _ => PochhammerLog::Zero,
    }
}

fn real_pochhammer_log(x: f64, n: usize) -> Option<(f64, f64)> {
    match pochhammer_log(Complex64::new(x, 0.0), n) {
        PochhammerLog::Zero => None,
        PochhammerLog::Log(l) => {
            let sign = if (l.im / std::f64::consts::PI).round() as i64 % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            Some((l.re, sign))
        }
    }
}

/// `ln (x)_n` for real `x > 0`.
pub(crate) fn ln_rising(x: f64, n: usize) -> f64 {
    real_pochhammer_log(x, n).map_or(f64::NEG_INFINITY, |(l, _)| l)
}

/// `ln n!`.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    ln_rising(1.0, n)
}

/// Evaluated sequences `φ_n`, `χ_n` and factorials for one spec.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureSequence {
    spec: AlgebraSpec,
    roots: RootSet,
    /// Smallest `n >= 1` with `χ_n <= 0`, if any.
    first_nonpositive: Option<usize>,
}

impl StructureSequence {
    pub fn new(spec: AlgebraSpec) -> Result<Self> {
        let roots = if spec.p() == 1 {
            RootSet::default()
        } else {
            compute_roots(&spec)?
        };
        let mut seq = Self {
            spec,
            roots,
            first_nonpositive: None,
        };
        seq.first_nonpositive = seq.scan_nonpositive();
        Ok(seq)
    }

    /// Sign changes of `χ_n` for `n >= 1` can only happen at real roots
    /// `a >= 1`, or at infinity when `α_p < 0`; scanning past the largest
    /// such root settles the sign.
    fn scan_nonpositive(&self) -> Option<usize> {
        let largest = self
            .roots
            .real
            .iter()
            .copied()
            .fold(0.0_f64, f64::max);
        let limit = if self.spec.leading() < 0.0 {
            usize::MAX
        } else {
            largest.max(0.0).ceil() as usize + 2
        };
        let mut n = 1;
        while n <= limit {
            if !(self.chi(n) > 0.0) {
                return Some(n);
            }
            n += 1;
        }
        None
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    /// `φ_n = n(2k+n-1) χ_n`.
    pub fn phi(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        nf * (2.0 * self.spec.k + nf - 1.0) * self.chi(n)
    }

    /// `Φ(Y_n) - Φ(K)` evaluated literally.
    pub fn phi_difference(&self, n: usize) -> f64 {
        let k = self.spec.k + n as f64;
        self.spec.phi_unchecked(k * (k - 1.0)) - self.spec.casimir_value()
    }

    /// Deformation factor from the double sum.
    pub fn chi(&self, n: usize) -> f64 {
        self.chi_at(n as f64)
    }

    /// Deformation factor at real `n`.
    pub fn chi_at(&self, n: f64) -> f64 {
        let kn = self.spec.k + n;
        chi_double_sum(&self.spec.alpha, self.spec.casimir_argument(), kn * (kn - 1.0))
    }

    /// Deformation factor from the root product `α_p Π (n - a_i)`.
    pub fn chi_from_roots(&self, n: usize) -> f64 {
        let nf = n as f64;
        let mut prod = self.spec.leading();
        for r in &self.roots.real {
            prod *= nf - r;
        }
        for a in &self.roots.pairs {
            prod *= (Complex64::new(nf, 0.0) - a).norm_sqr();
        }
        prod
    }

    pub fn roots(&self) -> &RootSet {
        &self.roots
    }

    /// `ln [χ_n]!` via Pochhammer symbols of the roots.
    pub fn log_chi_fact(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        self.check_factors(n)?;
        let mut acc = CompensatedSum::default();
        acc.add(n as f64 * self.spec.leading().abs().ln());
        let mut sign = if self.spec.leading() < 0.0 && n % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        for &r in &self.roots.real {
            let (l, s) = real_pochhammer_log(1.0 - r, n).ok_or(Error::NonPositiveFactor {
                n,
                value: 0.0,
            })?;
            acc.add(l);
            sign *= s;
        }
        for a in &self.roots.pairs {
            match pochhammer_log(Complex64::new(1.0, 0.0) - a, n) {
                PochhammerLog::Log(l) => acc.add(2.0 * l.re),
                PochhammerLog::Zero => return Err(Error::NonPositiveFactor { n, value: 0.0 }),
            }
        }
        if sign < 0.0 {
            return Err(Error::NonPositiveFactor {
                n,
                value: -acc.value().exp(),
            });
        }
        Ok(acc.value())
    }

    /// `ln [φ_n]! = ln n! + ln (2k)_n + ln [χ_n]!`.
    pub fn log_phi_fact(&self, n: usize) -> Result<f64> {
        Ok(ln_factorial(n) + ln_rising(2.0 * self.spec.k, n) + self.log_chi_fact(n)?)
    }

    pub fn log_factorial(&self, which: FactorialKind, n: usize) -> Result<f64> {
        match which {
            FactorialKind::Phi => self.log_phi_fact(n),
            FactorialKind::Chi => self.log_chi_fact(n),
        }
    }

    /// `Σ_{l=1..n} ln χ_l` (or `ln φ_l`) by direct accumulation. Independent
    /// of the root factorization, so it remains usable when roots are
    /// ill-conditioned.
    pub fn log_factorial_direct(&self, which: FactorialKind, n: usize) -> Result<f64> {
        let mut acc = CompensatedSum::default();
        for l in 1..=n {
            let v = match which {
                FactorialKind::Phi => self.phi(l),
                FactorialKind::Chi => self.chi(l),
            };
            if !(v > 0.0) {
                return Err(Error::NonPositiveFactor { n: l, value: v });
            }
            acc.add(v.ln());
        }
        Ok(acc.value())
    }

    fn check_factors(&self, n: usize) -> Result<()> {
        match self.first_nonpositive {
            Some(bad) if bad <= n => Err(Error::NonPositiveFactor {
                n: bad,
                value: self.chi(bad),
            }),
            _ => Ok(()),
        }
    }
}

/// Structure factor `φ_n`.
pub fn structure_factor(seq: &StructureSequence, n: usize) -> f64 {
    seq.phi(n)
}

/// Deformation factor `χ_n`.
pub fn deformation_factor(seq: &StructureSequence, n: usize) -> f64 {
    seq.chi(n)
}

/// Roots of `χ_n` in `n`, conjugate-closed; empty for `p = 1`.
pub fn deformation_roots(seq: &StructureSequence) -> Vec<Complex64> {
    seq.roots.all()
}

/// Natural log of `[φ_n]!` or `[χ_n]!`.
pub fn log_generalized_factorial(seq: &StructureSequence, which: FactorialKind, n: usize) -> Result<f64> {
    seq.log_factorial(which, n)
}

/// Coefficients (ascending) of `Q(y) = (Φ(y) - Φ(K)) / (y - K)`.
fn reduced_coefficients(spec: &AlgebraSpec) -> Vec<f64> {
    let p = spec.p();
    let kk = spec.casimir_argument();
    (0..p)
        .map(|j| {
            (j + 1..=p)
                .map(|r| spec.alpha[r - 1] * kk.powi((r - 1 - j) as i32))
                .sum()
        })
        .collect()
}

fn compute_roots(spec: &AlgebraSpec) -> Result<RootSet> {
    let q = reduced_coefficients(spec);
    let y_roots = polynomial_roots(&q)?;
    let center = -(2.0 * spec.k - 1.0) / 2.0;
    let mut set = RootSet::default();
    for y in y_roots {
        let w2 = y + 0.25;
        if w2.im == 0.0 {
            if w2.re >= 0.0 {
                let w = w2.re.sqrt();
                set.real.push(center + w);
                set.real.push(center - w);
            } else {
                set.pairs.push(Complex64::new(center, (-w2.re).sqrt()));
            }
        } else if w2.im > 0.0 {
            // the conjugate y contributes the conjugates of both roots
            let w = w2.sqrt();
            for a in [center + w, center - w] {
                set.pairs.push(if a.im >= 0.0 { a } else { a.conj() });
            }
        }
    }
    set.real.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(set)
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a real polynomial (ascending coefficients) by Aberth–Ehrlich
/// iteration with Newton polishing. Near-real roots are snapped to the real
/// axis and complex roots are returned as exact conjugate pairs.
fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    match deg {
        0 => return Ok(vec![]),
        1 => return Ok(vec![Complex64::new(-coeffs[0] / lead, 0.0)]),
        _ => {}
    }
    let bound = 1.0 + coeffs[..deg].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|j| Complex64::from_polar(0.5 * bound, 0.4 + 2.0 * std::f64::consts::PI * j as f64 / deg as f64))
        .collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut biggest: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = horner(coeffs, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            biggest = biggest.max(step.norm() / z[i].norm().max(1e-300));
        }
        if biggest < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("root finder for the deformation factor".into()));
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(coeffs, *zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    for zi in z.iter_mut() {
        if zi.im.abs() <= IMAG_SNAP * zi.norm().max(1.0) {
            *zi = Complex64::new(zi.re, 0.0);
        }
    }
    let mut out = Vec::with_capacity(deg);
    let mut rest: Vec<Complex64> = Vec::new();
    for zi in z {
        if zi.im == 0.0 {
            out.push(zi);
        } else {
            rest.push(zi);
        }
    }
    while let Some(a) = rest.pop() {
        let (idx, _) = rest
            .iter()
            .enumerate()
            .map(|(i, b)| (i, (b - a.conj()).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if idx == usize::MAX {
            return Err(Error::NoConvergence("unpaired complex root".into()));
        }
        let b = rest.swap_remove(idx);
        let mean = 0.5 * (a + b.conj());
        out.push(mean);
        out.push(mean.conj());
    }
    Ok(out)
}
