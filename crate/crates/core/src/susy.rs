//! The conditionally solvable modified radial oscillator.
//!
//! SUSY potential `W = U + f` with
//!
//! ```text
//! U(x) = x + (γ+1)/x
//! f(x) = d/dx ln 1F1(1/2 - ε/2; γ + 3/2; -x²)
//! V_± = (W² ± W')/2
//!     V_+ = x²/2 + γ(γ+1)/(2x²) + γ + ε + 1/2
//!     V_- = (U² - U')/2 - f' + ε - 1
//! ```
//!
//! `f` solves `f² + 2Uf + f' = 2(ε - 1)`, which is what turns the two forms of
//! each potential into one another. The spectrum is `E_n = 2n + 2γ + 2 + ε`
//! for both partners. At `g = γ + ε + 1/2 = 0` the operators
//! `D_0 = H_-/2`, `D_± = A† C_± A` close into a cubic algebra with
//! `α_1 = 3/4 - γ(γ+1)`, `α_2 = 4`, `k = (2γ+3)/4`.
//!
//! [`grid_spectrum`] is an independent check: second-order finite
//! differences on `(0, r_max]` with Dirichlet ends, solved by Sturm-sequence
//! bisection on the symmetric tridiagonal matrix.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::special::kummer_log_derivative_pair;

/// Default outer radius of the grid.
pub const DEFAULT_R_MAX: f64 = 12.0;
/// Default number of interior grid points.
pub const DEFAULT_POINTS: usize = 4000;
/// Level shift under grid doubling above which a warning is attached.
pub const RICHARDSON_LIMIT: f64 = 1e-3;
const G_ZERO_TOL: f64 = 1e-12;

/// `γ` and `ε` of the modified oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorParams {
    pub gamma: f64,
    pub epsilon: f64,
}

/// Parameter-condition flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Validity {
    /// `ε + 2εγ + 2 > 0`.
    pub convergent: bool,
    /// `g = 0`, `3 - 4γ(γ+1) > 0` and the working window
    /// `0 < γ < 1/2`, `-1 < ε < 1/2`.
    pub cubic_ok: bool,
}

/// Potentials at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Potentials {
    pub v_plus: f64,
    pub v_minus: f64,
    pub u: f64,
    pub f: f64,
}

/// `D_±` matrix elements between `|d,n⟩` and `|d,n±1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ladder {
    pub up: f64,
    pub down: f64,
}

/// Which partner Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Partner {
    Plus,
    Minus,
}

/// Grid eigenvalues with the grid-doubling diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpectrum {
    pub levels: Vec<f64>,
    /// Largest level change when the number of points is doubled.
    pub richardson_shift: f64,
    pub warning: Option<String>,
}

impl OscillatorParams {
    pub fn new(gamma: f64, epsilon: f64) -> Result<Self> {
        if !(gamma.is_finite() && epsilon.is_finite()) {
            return Err(Error::Parameter("γ and ε must be finite".into()));
        }
        Ok(Self { gamma, epsilon })
    }

    /// `ε = -γ - 1/2`, so that `g = 0`; requires `0 < γ < 1/2`.
    pub fn at_cubic_point(gamma: f64) -> Result<Self> {
        let params = Self::new(gamma, -gamma - 0.5)?;
        if !params.validity().cubic_ok {
            return Err(Error::Parameter(format!("γ = {gamma} must lie in (0, 1/2)")));
        }
        Ok(params)
    }

    /// `g = γ + ε + 1/2`.
    pub fn g(&self) -> f64 {
        self.gamma + self.epsilon + 0.5
    }

    /// `c = d = (2γ+3)/4`.
    pub fn c(&self) -> f64 {
        (2.0 * self.gamma + 3.0) / 4.0
    }

    pub fn validity(&self) -> Validity {
        let (g, e) = (self.gamma, self.epsilon);
        let convergent = e + 2.0 * e * g + 2.0 > 0.0;
        let cubic_ok = self.g().abs() <= G_ZERO_TOL
            && 3.0 - 4.0 * g * (g + 1.0) > 0.0
            && g > 0.0
            && g < 0.5
            && e > -1.0
            && e < 0.5;
        Validity {
            convergent,
            cubic_ok,
        }
    }

    fn require_cubic(&self) -> Result<()> {
        if self.validity().cubic_ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "(γ, ε) = ({}, {}) is not a cubic-algebra point",
                self.gamma, self.epsilon
            )))
        }
    }

    fn require_convergent(&self) -> Result<()> {
        if self.validity().convergent {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "ε + 2εγ + 2 > 0 fails for (γ, ε) = ({}, {})",
                self.gamma, self.epsilon
            )))
        }
    }

    /// `E_n = 2n + 2γ + 2 + ε`, valid for any admissible `g`.
    pub fn general_level(&self, n: usize) -> f64 {
        2.0 * n as f64 + 2.0 * self.gamma + 2.0 + self.epsilon
    }

    /// `E_n = 2n + γ + 3/2` at `g = 0`.
    pub fn spectrum(&self, n: usize) -> Result<f64> {
        self.require_cubic()?;
        Ok(2.0 * n as f64 + self.gamma + 1.5)
    }

    /// `α_1 = 3/4 - γ(γ+1)`, `α_2 = 4`, `k = (2γ+3)/4`.
    pub fn cubic_algebra_spec(&self) -> Result<AlgebraSpec> {
        self.require_cubic()?;
        AlgebraSpec::new(vec![0.75 - self.gamma * (self.gamma + 1.0), 4.0], self.c())
    }

    /// `up = √((n+1)(n+γ+3/2) E_n E_{n+1})`, `down = √(n(n+γ+1/2) E_n E_{n-1})`.
    pub fn ladder_coefficients(&self, n: usize) -> Result<Ladder> {
        self.require_cubic()?;
        Ok(self.ladder_general(n))
    }

    fn ladder_general(&self, n: usize) -> Ladder {
        let g = self.gamma;
        let nf = n as f64;
        let up = ((nf + 1.0) * (nf + g + 1.5) * self.general_level(n) * self.general_level(n + 1)).sqrt();
        let down = if n == 0 {
            0.0
        } else {
            (nf * (nf + g + 0.5) * self.general_level(n) * self.general_level(n - 1)).sqrt()
        };
        Ladder { up, down }
    }

    /// `U`, `f`, `V_+` (closed form) and `V_-` (from `U` and `f'`).
    pub fn partner_potentials(&self, x: f64) -> Result<Potentials> {
        let (u, du, f, df) = self.pieces(x)?;
        let g = self.gamma;
        let v_plus = 0.5 * x * x + g * (g + 1.0) / (2.0 * x * x) + g + self.epsilon + 0.5;
        let v_minus = 0.5 * (u * u - du) - df + self.epsilon - 1.0;
        Ok(Potentials {
            v_plus,
            v_minus,
            u,
            f,
        })
    }

    /// `(W² + W')/2` and `(W² - W')/2` with `W = U + f`.
    pub fn potentials_from_superpotential(&self, x: f64) -> Result<(f64, f64)> {
        let (u, du, f, df) = self.pieces(x)?;
        let w = u + f;
        let dw = du + df;
        Ok((0.5 * (w * w + dw), 0.5 * (w * w - dw)))
    }

    fn pieces(&self, x: f64) -> Result<(f64, f64, f64, f64)> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Domain {
                value: x,
                domain: "x > 0",
            });
        }
        self.require_convergent()?;
        let g1 = self.gamma + 1.0;
        let u = x + g1 / x;
        let du = 1.0 - g1 / (x * x);
        let (f, df) = kummer_log_derivative_pair(0.5 - 0.5 * self.epsilon, self.gamma + 1.5, x)?;
        Ok((u, du, f, df))
    }

    /// Largest relative mismatch over `n < order` between the diagonal of
    /// `[D_+, D_-]`, assembled as `E^{1/2} C_± E^{1/2}`, and
    /// `-2(g² - (2c-1)² + 1) D_0 + 12 g D_0² - 16 D_0³` with `D_0 = E_n/2`.
    pub fn bracket_defect(&self, order: usize) -> f64 {
        let dim = order + 1;
        let g = self.g();
        let c = self.c();
        let sqrt_e = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                self.general_level(i).sqrt()
            } else {
                0.0
            }
        });
        let cplus = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j + 1 {
                let n = j as f64;
                ((n + 1.0) * (n + self.gamma + 1.5)).sqrt()
            } else {
                0.0
            }
        });
        let dplus = &sqrt_e * &cplus * &sqrt_e;
        let dminus = dplus.transpose();
        let bracket = &dplus * &dminus - &dminus * &dplus;
        let mut worst: f64 = 0.0;
        for n in 0..order {
            let d0 = 0.5 * self.general_level(n);
            let rhs = -2.0 * (g * g - (2.0 * c - 1.0).powi(2) + 1.0) * d0 + 12.0 * g * d0 * d0
                - 16.0 * d0.powi(3);
            let off = (0..dim)
                .filter(|&j| j != n)
                .map(|j| bracket[(n, j)].abs())
                .fold(0.0, f64::max);
            let scale = rhs.abs().max(1.0);
            worst = worst.max((bracket[(n, n)] - rhs).abs() / scale).max(off / scale);
        }
        worst
    }
}

fn sturm_count(diag: &[f64], off2: f64, lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, d) in diag.iter().enumerate() {
        q = if i == 0 { d - lambda } else { d - lambda - off2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d.abs() + lambda.abs()).max(1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn lowest_levels(diag: &[f64], off: f64, levels: usize) -> Vec<f64> {
    let off2 = off * off;
    let lo0 = diag.iter().copied().fold(f64::INFINITY, f64::min) - 2.0 * off.abs();
    let mut hi0 = lo0 + 1.0;
    while sturm_count(diag, off2, hi0) < levels {
        hi0 = lo0 + 2.0 * (hi0 - lo0);
    }
    (0..levels)
        .map(|j| {
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(diag, off2, mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

fn potential(params: &OscillatorParams, which: Partner, x: f64) -> Result<f64> {
    let v = params.partner_potentials(x)?;
    Ok(match which {
        Partner::Plus => v.v_plus,
        Partner::Minus => v.v_minus,
    })
}

fn grid_levels(
    v: &dyn Fn(f64) -> Result<f64>,
    r_max: f64,
    points: usize,
    levels: usize,
) -> Result<Vec<f64>> {
    let h = r_max / (points + 1) as f64;
    let kinetic = 1.0 / (h * h);
    let diag = (1..=points)
        .map(|i| Ok(kinetic + v(i as f64 * h)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(lowest_levels(&diag, -0.5 * kinetic, levels))
}

/// Lowest `levels` eigenvalues of `-½ d²/dx² + V(x)` on `(0, r_max]`.
pub fn grid_spectrum_of(
    v: &dyn Fn(f64) -> Result<f64>,
    r_max: f64,
    points: usize,
    levels: usize,
) -> Result<GridSpectrum> {
    if points < 1000 {
        return Err(Error::Parameter(format!("{points} grid points; at least 1000 are required")));
    }
    if !(r_max > 0.0 && r_max.is_finite()) || levels == 0 {
        return Err(Error::Parameter("r_max must be positive and levels nonzero".into()));
    }
    let coarse = grid_levels(v, r_max, points, levels)?;
    let top = *coarse.last().unwrap();
    let wall = v(r_max)?;
    if !(wall > 3.0 * top) {
        return Err(Error::Parameter(format!(
            "V(r_max) = {wall} must exceed three times the highest level {top}"
        )));
    }
    let fine = grid_levels(v, r_max, 2 * points + 1, levels)?;
    let richardson_shift = coarse
        .iter()
        .zip(fine.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let warning = (richardson_shift > RICHARDSON_LIMIT).then(|| {
        format!("doubling the grid moved a level by {richardson_shift:.3e}; discretization may be insufficient")
    });
    Ok(GridSpectrum {
        levels: coarse,
        richardson_shift,
        warning,
    })
}

/// Grid spectrum of `H_+` or `H_-`.
pub fn grid_spectrum(
    params: &OscillatorParams,
    which: Partner,
    r_max: f64,
    points: usize,
    levels: usize,
) -> Result<GridSpectrum> {
    params.require_convergent()?;
    grid_spectrum_of(&|x| potential(params, which, x), r_max, points, levels)
}
