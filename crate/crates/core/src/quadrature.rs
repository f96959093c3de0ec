//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! All components share the same evaluation points, so a family of moments
//! can be integrated in one pass. Intervals are bisected where the
//! Gauss/Kronrod difference of any component is largest relative to its
//! running total.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of a vector integration: one value and one error estimate per
/// component.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
    /// Number of equal pieces the range is split into before adapting.
    pub initial_pieces: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 0.0,
            max_intervals: 20_000,
            initial_pieces: 8,
        }
    }
}

struct Piece {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
}

fn rule<F>(f: &mut F, lo: f64, hi: f64, dim: usize) -> Result<Piece>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kronrod = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let points: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &sign in points {
            f(center + sign * half * x, &mut buf)?;
            for d in 0..dim {
                if !buf[d].is_finite() {
                    return Err(Error::NoConvergence(format!(
                        "non-finite integrand at {}",
                        center + sign * half * x
                    )));
                }
                kronrod[d] += wk * buf[d];
                if i % 2 == 1 {
                    gauss[d] += WG[i / 2] * buf[d];
                }
            }
        }
    }
    let values: Vec<f64> = kronrod.iter().map(|k| k * half).collect();
    let errors = kronrod
        .iter()
        .zip(gauss.iter())
        .map(|(k, g)| ((k - g) * half).abs())
        .collect();
    Ok(Piece {
        lo,
        hi,
        values,
        errors,
    })
}

/// Integrate `f` over `[lo, hi]`. `f(x, out)` fills `out` (length `dim`).
pub fn integrate_vec<F>(mut f: F, lo: f64, hi: f64, dim: usize, opts: Options) -> Result<Integral>
where
    F: FnMut(f64, &mut [f64]) -> Result<()>,
{
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Domain {
            value: hi - lo,
            domain: "finite interval with hi > lo",
        });
    }
    let n0 = opts.initial_pieces.max(1);
    let width = (hi - lo) / n0 as f64;
    let mut pieces = Vec::with_capacity(n0);
    for i in 0..n0 {
        let a = lo + i as f64 * width;
        let b = if i + 1 == n0 { hi } else { a + width };
        pieces.push(rule(&mut f, a, b, dim)?);
    }
    let mut evaluations = 15 * n0;

    loop {
        let mut totals = vec![0.0; dim];
        let mut errors = vec![0.0; dim];
        for p in &pieces {
            for d in 0..dim {
                totals[d] += p.values[d];
                errors[d] += p.errors[d];
            }
        }
        let target: Vec<f64> = totals
            .iter()
            .map(|t| (opts.rel_tol * t.abs()).max(opts.abs_tol))
            .collect();
        let done = (0..dim).all(|d| errors[d] <= target[d]);
        if done {
            return Ok(Integral {
                values: totals,
                errors,
                evaluations,
            });
        }
        if pieces.len() >= opts.max_intervals {
            let worst = (0..dim)
                .map(|d| errors[d] / totals[d].abs().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            return Err(Error::NoConvergence(format!(
                "quadrature reached {} intervals with relative error {worst:e}",
                pieces.len()
            )));
        }
        let score = |p: &Piece| {
            (0..dim)
                .map(|d| p.errors[d] / target[d].max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
        };
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .map(|(i, p)| (i, score(p)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let worst = pieces.swap_remove(idx);
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Err(Error::NoConvergence("quadrature interval underflow".into()));
        }
        pieces.push(rule(&mut f, worst.lo, mid, dim)?);
        pieces.push(rule(&mut f, mid, worst.hi, dim)?);
        evaluations += 30;
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, opts: Options) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let r = integrate_vec(
        |x, out| {
            out[0] = f(x)?;
            Ok(())
        },
        lo,
        hi,
        1,
        opts,
    )?;
    Ok((r.values[0], r.errors[0]))
}
