//! Generalized hypergeometric series `pFq(a; b; z)`.
//!
//! The series is summed term by term with a compensated accumulator.
//! Summation stops once a geometric majorant of the remaining terms falls
//! below the requested relative tolerance; that majorant is returned as a
//! tail-bound certificate.

use num_complex::Complex64;

use super::ComplexCompensatedSum;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 200_000;
const RELATIVE_TAIL: f64 = 1e-15;

/// A summed series together with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Number of terms included.
    pub terms: usize,
    /// Upper bound on the modulus of the neglected tail.
    pub tail_bound: f64,
}

fn nonpositive_integer(z: Complex64) -> Option<usize> {
    (z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()).then(|| (-z.re) as usize)
}

/// `pFq` with complex parameters and argument.
pub fn pfq_complex(a: &[Complex64], b: &[Complex64], z: Complex64) -> Result<SeriesValue> {
    if let Some(bad) = b.iter().find(|bj| nonpositive_integer(**bj).is_some()) {
        return Err(Error::Pole {
            function: "pfq",
            location: format!("lower parameter {bad}"),
        });
    }
    let one = Complex64::new(1.0, 0.0);
    if z == Complex64::new(0.0, 0.0) {
        return Ok(SeriesValue {
            value: one,
            terms: 1,
            tail_bound: 0.0,
        });
    }
    let terminating = a.iter().filter_map(|ai| nonpositive_integer(*ai)).min();
    if terminating.is_none() {
        if a.len() > b.len() + 1 {
            return Err(Error::Divergent {
                abs_z: z.norm(),
                radius: 0.0,
            });
        }
        if a.len() == b.len() + 1 && z.norm() >= 1.0 {
            return Err(Error::Divergent {
                abs_z: z.norm(),
                radius: 1.0,
            });
        }
    }

    let max_b = b.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let abs_z = z.norm();
    let mut sum = ComplexCompensatedSum::default();
    let mut term = one;
    for n in 0..MAX_TERMS {
        sum.add(term);
        if terminating == Some(n) {
            return Ok(SeriesValue {
                value: sum.value(),
                terms: n + 1,
                tail_bound: 0.0,
            });
        }
        let nf = n as f64;
        let mut next = term * z / (nf + 1.0);
        for ai in a {
            next *= *ai + nf;
        }
        for bj in b {
            next /= *bj + nf;
        }
        term = next;

        // For m > max|b| every later ratio |t_{j+1}/t_j|, j >= m, is bounded by
        // |z| Π(m+|a_i|) / (Π(m-|b_j|) (m+1)), which decreases in m.
        let m = nf + 1.0;
        if terminating.is_none() && m > max_b + 1.0 {
            let mut ratio = abs_z / (m + 1.0);
            for ai in a {
                ratio *= m + ai.norm();
            }
            for bj in b {
                ratio /= m - bj.norm();
            }
            if ratio < 1.0 {
                let tail = term.norm() / (1.0 - ratio);
                let scale = sum.value().norm().max(f64::MIN_POSITIVE);
                if tail <= RELATIVE_TAIL * scale {
                    return Ok(SeriesValue {
                        value: sum.value(),
                        terms: n + 1,
                        tail_bound: tail,
                    });
                }
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "pfq did not reach its tail bound within {MAX_TERMS} terms"
    )))
}

/// `pFq` with real parameters and argument.
pub fn pfq(a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    let a: Vec<Complex64> = a.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    let b: Vec<Complex64> = b.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    Ok(pfq_complex(&a, &b, Complex64::new(z, 0.0))?.value.re)
}
