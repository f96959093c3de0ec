//! Truncated matrix representation of `K_0`, `K_±` and the Casimir on
//! `|k,n⟩`, `n = 0..N`.
//!
//! ```text
//! K_0 |k,n⟩ = (k+n) |k,n⟩
//! K_+ |k,n⟩ = √φ_{n+1} |k,n+1⟩
//! K_- |k,n⟩ = √φ_n     |k,n-1⟩
//! ```
//!
//! Truncation cuts `K_- K_+` short at the last level, so every algebra check
//! skips index `N`. Defects are measured entrywise relative to
//! `max(1, Φ((k+n)(k+n+1)))`, the size of the terms being compared, since the
//! matrix elements grow like `n^{2p}`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{AlgebraSpec, StructureSequence};
use crate::error::{Error, Result};

/// Dense `(N+1) x (N+1)` matrices of the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedRep {
    spec: AlgebraSpec,
    k0: DMatrix<f64>,
    kplus: DMatrix<f64>,
    kminus: DMatrix<f64>,
    casimir: DMatrix<f64>,
}

/// Casimir and adjointness defects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureDefects {
    pub casimir_defect: f64,
    pub adjoint_defect: f64,
}

impl TruncatedRep {
    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.k0.nrows() - 1
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn k0(&self) -> &DMatrix<f64> {
        &self.k0
    }

    pub fn kplus(&self) -> &DMatrix<f64> {
        &self.kplus
    }

    pub fn kminus(&self) -> &DMatrix<f64> {
        &self.kminus
    }

    pub fn casimir(&self) -> &DMatrix<f64> {
        &self.casimir
    }

    /// Copy with `Kplus[row, col]` shifted by `delta`, for sensitivity checks.
    pub fn with_perturbed_kplus(&self, row: usize, col: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.kplus[(row, col)] += delta;
        out
    }

    fn scale(&self, n: usize) -> f64 {
        let m = self.spec.k() + n as f64;
        self.spec.phi_unchecked(m * (m + 1.0)).abs().max(1.0)
    }
}

/// Builds the representation up to level `N >= 2`.
pub fn build_rep(spec: &AlgebraSpec, order: usize) -> Result<TruncatedRep> {
    if order < 2 {
        return Err(Error::Parameter(format!("truncation order {order} must be at least 2")));
    }
    let seq = StructureSequence::new(spec.clone())?;
    let dim = order + 1;
    let mut k0 = DMatrix::zeros(dim, dim);
    let mut kplus = DMatrix::zeros(dim, dim);
    let mut casimir = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        k0[(n, n)] = spec.k() + n as f64;
        casimir[(n, n)] = spec.casimir_value();
        if n + 1 < dim {
            let phi = seq.phi(n + 1);
            if !(phi >= 0.0) {
                return Err(Error::NonPositiveFactor { n: n + 1, value: phi });
            }
            kplus[(n + 1, n)] = phi.sqrt();
        }
    }
    let kminus = kplus.transpose();
    Ok(TruncatedRep {
        spec: spec.clone(),
        k0,
        kplus,
        kminus,
        casimir,
    })
}

fn diag_phi(rep: &TruncatedRep, shift: f64) -> DMatrix<f64> {
    let dim = rep.order() + 1;
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            let m = rep.k0[(i, i)];
            rep.spec.phi_unchecked(m * (m + shift))
        } else {
            0.0
        }
    })
}

fn interior_max(rep: &TruncatedRep, m: &DMatrix<f64>) -> f64 {
    let last = rep.order();
    let mut worst: f64 = 0.0;
    for i in 0..last {
        for j in 0..last {
            let scale = rep.scale(i).max(rep.scale(j));
            worst = worst.max(m[(i, j)].abs() / scale);
        }
    }
    worst
}

/// Largest interior deviation from
/// `[K_+, K_-] = Φ(K_0(K_0-1)) - Φ(K_0(K_0+1))` and `[K_0, K_±] = ±K_±`.
pub fn commutator_defect(rep: &TruncatedRep) -> f64 {
    let (kp, km, k0) = (&rep.kplus, &rep.kminus, &rep.k0);
    let bracket = kp * km - km * kp;
    let rhs = diag_phi(rep, -1.0) - diag_phi(rep, 1.0);
    let raise = k0 * kp - kp * k0 - kp;
    let lower = k0 * km - km * k0 + km;
    [bracket - rhs, raise, lower]
        .iter()
        .map(|m| interior_max(rep, m))
        .fold(0.0, f64::max)
}

/// Casimir defect over both forms
/// `Φ(K_0(K_0+1)) - K_- K_+` and `Φ(K_0(K_0-1)) - K_+ K_-`, plus
/// `max |K_+ - K_-ᵀ|`.
pub fn structure_defects(rep: &TruncatedRep) -> StructureDefects {
    let (kp, km) = (&rep.kplus, &rep.kminus);
    let first = diag_phi(rep, 1.0) - km * kp - &rep.casimir;
    let second = diag_phi(rep, -1.0) - kp * km - &rep.casimir;
    let casimir_defect = interior_max(rep, &first).max(interior_max(rep, &second));
    let adjoint_defect = (kp - km.transpose()).amax();
    StructureDefects {
        casimir_defect,
        adjoint_defect,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> AlgebraSpec {
        AlgebraSpec::new(vec![7.0 / 16.0, 4.0], 7.0 / 8.0).unwrap()
    }

    #[test]
    fn linear_matrix_elements() {
        let rep = build_rep(&AlgebraSpec::new(vec![1.0], 1.0).unwrap(), 2).unwrap();
        assert!((rep.kplus()[(1, 0)] - 2f64.sqrt()).abs() < 1e-15);
        assert!((rep.kplus()[(2, 1)] - 6f64.sqrt()).abs() < 1e-15);
        assert!(rep.kminus().column(0).iter().all(|&x| x == 0.0));
        assert!(build_rep(&AlgebraSpec::new(vec![1.0], 1.0).unwrap(), 1).is_err());
    }

    #[test]
    fn cubic_first_element() {
        let rep = build_rep(&cubic(), 2).unwrap();
        assert!((rep.kplus()[(1, 0)] - (735.0f64 / 64.0).sqrt()).abs() < 1e-14);
        assert!((rep.kplus()[(1, 0)] - 3.389).abs() < 1e-3);
    }

    #[test]
    fn commutators_hold_in_the_interior() {
        let lin = build_rep(&AlgebraSpec::new(vec![1.0], 1.0).unwrap(), 16).unwrap();
        assert!(commutator_defect(&lin) <= 1e-12);
        let cub = build_rep(&cubic(), 32).unwrap();
        assert!(commutator_defect(&cub) <= 1e-10);
        let bad = lin.with_perturbed_kplus(1, 0, 0.1);
        assert!(commutator_defect(&bad) >= 0.01);
    }

    #[test]
    fn casimir_is_constant() {
        let rep = build_rep(&AlgebraSpec::new(vec![1.0], 1.5).unwrap(), 16).unwrap();
        assert!((rep.casimir()[(3, 3)] - 0.75).abs() < 1e-15);
        let d = structure_defects(&rep);
        assert!(d.casimir_defect <= 1e-12);
        assert_eq!(d.adjoint_defect, 0.0);
        let cub = build_rep(&cubic(), 32).unwrap();
        let d = structure_defects(&cub);
        assert!(d.casimir_defect <= 1e-10);
        let dd = 7.0 / 8.0 * (7.0 / 8.0 - 1.0);
        assert!((cub.casimir()[(0, 0)] - cub.spec().phi_unchecked(dd)).abs() < 1e-15);
    }

    #[test]
    fn k0_commutes_with_number_like_products() {
        let rep = build_rep(&AlgebraSpec::new(vec![1.0, 0.5, 0.25], 0.6).unwrap(), 20).unwrap();
        let prod = rep.kplus() * rep.kminus();
        let c = rep.k0() * &prod - &prod * rep.k0();
        assert_eq!(c.amax(), 0.0);
        for n in 0..=20 {
            assert_eq!(rep.k0()[(n, n)], 0.6 + n as f64);
        }
    }

    #[test]
    fn high_degree_defects_are_relative() {
        for k in [0.6, 0.875, 1.5] {
            let rep = build_rep(&AlgebraSpec::new(vec![1.0, 0.5, 0.25], k).unwrap(), 256).unwrap();
            assert!(commutator_defect(&rep) <= 1e-10);
            assert!(structure_defects(&rep).casimir_defect <= 1e-10);
        }
    }
}
