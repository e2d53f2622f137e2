//! Eigenbasis-backed calculus for fractional powers of self-adjoint operators with
//! compact resolvent.
//!
//! Every operator is represented by a truncated eigenbasis ([`SpectralBasis`]): powers act
//! diagonally on the coefficients, and the primal/dual norms of the domains `V^r` and
//! their duals are weighted `ℓ²` norms of the coefficients.

mod basis;
mod field;

pub use basis::{BoundaryCondition, NormKind, SpectralBasis};
pub use field::{DualElement, Field, InterpolationGap};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("need at least 2 modes, got {0}")]
    TooFewModes(usize),
    #[error("domain lengths must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("only 1 or 2 space dimensions are supported, got {0}")]
    Dimension(usize),
    #[error("operator power must be at least 1")]
    ZeroPower,
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(f64),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("fields live on incompatible bases")]
    BasisMismatch,
    #[error("dual element has nonzero mean pairing {0} but the operator has a null mode")]
    MeanConstraint(f64),
    #[error("operation requires a constant null mode (lambda_1 = 0)")]
    NoNullMode,
    #[error("operators do not share an eigenbasis")]
    DifferentEigenbases,
}

/// Both sides of `‖v‖² ≤ δ‖B^σ v‖² + c_δ ‖v‖²_{A,-r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompactnessSplit {
    pub lhs: f64,
    pub rhs: f64,
    pub c_delta: f64,
}

/// Sharp finite-dimensional `c_δ` for the compactness inequality, evaluated on `v`.
///
/// `a` and `b` must share eigenfunctions; `c_δ` is the largest of
/// `(1 − δ λ'_j^{2σ}) / w_j` over the retained modes, where `w_j` is the dual weight of `A`.
pub fn compactness_split(
    a: &SpectralBasis,
    b: &SpectralBasis,
    r: f64,
    sigma: f64,
    delta: f64,
    v: &Field,
) -> Result<CompactnessSplit, SpectraError> {
    if !a.shares_eigenfunctions(b) || !a.shares_eigenfunctions(v.basis()) {
        return Err(SpectraError::DifferentEigenbases);
    }
    let dual = a.norm_weights(NormKind::Dual(r));
    let c_delta = (0..a.len())
        .map(|j| (1.0 - delta * b.eigen_power(j, 2.0 * sigma)) / dual[j])
        .fold(0.0, f64::max);
    let coeffs = v.coefficients();
    let lhs = coeffs.iter().map(|c| c * c).sum();
    let rhs = (0..a.len())
        .map(|j| (delta * b.eigen_power(j, 2.0 * sigma) + c_delta * dual[j]) * coeffs[j] * coeffs[j])
        .sum();
    Ok(CompactnessSplit { lhs, rhs, c_delta })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn basis(bc: BoundaryCondition, l: f64, m: usize) -> Arc<SpectralBasis> {
        Arc::new(SpectralBasis::laplacian(&[l], bc, m, 1).unwrap())
    }

    fn random_field(b: &Arc<SpectralBasis>, rng: &mut ChaCha8Rng) -> Field {
        let coeffs = (0..b.len())
            .map(|j| rng.gen_range(-1.0..1.0) / (1.0 + j as f64))
            .collect();
        Field::synthesize(b, coeffs).unwrap()
    }

    #[test]
    fn analyze_constant_and_mode() {
        let b = basis(BoundaryCondition::Neumann, PI, 6);
        let v = Field::from_fn(&b, |_| 3.0);
        assert!((v.coefficients()[0] - 3.0 * PI.sqrt()).abs() < 1e-12);
        assert!(v.coefficients()[1..].iter().all(|c| c.abs() < 1e-12));
        assert!((v.mean() - 3.0).abs() < 1e-13);
        assert!((v.mean() - v.coefficients()[0] / PI.sqrt()).abs() < 1e-13);

        let e2 = Field::mode(&b, 1);
        let back = Field::analyze(&b, e2.values()).unwrap();
        let expected = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        for (c, e) in back.coefficients().iter().zip(expected) {
            assert!((c - e).abs() < 1e-13);
        }
    }

    #[test]
    fn analyze_rejects_wrong_size() {
        let b = basis(BoundaryCondition::Neumann, 1.0, 4);
        assert!(matches!(
            Field::analyze(&b, &[1.0; 3]),
            Err(SpectraError::SizeMismatch { .. })
        ));
        assert!(Field::synthesize(&b, vec![0.0; 5]).is_err());
    }

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let b = basis(bc, 1.3, 16);
            for _ in 0..20 {
                let v = random_field(&b, &mut rng);
                let back = Field::analyze(&b, v.values()).unwrap();
                for (x, y) in v.coefficients().iter().zip(back.coefficients()) {
                    assert!((x - y).abs() < 1e-12);
                }
                let quad = v.integrate_map(|s| s * s);
                assert!((quad - v.norm().powi(2)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn power_examples() {
        let d = basis(BoundaryCondition::Dirichlet, PI, 4);
        let e2 = Field::mode(&d, 1);
        let half = e2.apply_power(0.5).unwrap();
        assert!((half.coefficients()[1] - 2.0).abs() < 1e-14);
        let n = basis(BoundaryCondition::Neumann, PI, 4);
        let c = Field::from_fn(&n, |_| 2.5);
        assert!(c.apply_power(0.37).unwrap().norm() < 1e-12);
        assert!(c.apply_power(0.0).is_err());
    }

    #[test]
    fn adjoint_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let b = basis(BoundaryCondition::Neumann, 2.0, 12);
        for &(r1, r2) in &[(0.3, 0.5), (0.5, 1.0), (1.0, 0.3)] {
            let v = random_field(&b, &mut rng);
            let w = random_field(&b, &mut rng);
            let lhs = v.apply_power(r1 + r2).unwrap().inner(&w).unwrap();
            let rhs = v
                .apply_power(r1)
                .unwrap()
                .inner(&w.apply_power(r2).unwrap())
                .unwrap();
            assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + v.norm() * w.norm()));
        }
    }

    #[test]
    fn primal_norm_examples() {
        let n = basis(BoundaryCondition::Neumann, PI, 5);
        assert!((Field::mode(&n, 0).norm_primal(0.7) - 1.0).abs() < 1e-14);
        let d = basis(BoundaryCondition::Dirichlet, PI, 5);
        let lam = d.eigenvalues()[3];
        assert!((Field::mode(&d, 3).norm_primal(0.4) - lam.powf(0.4)).abs() < 1e-12);
    }

    #[test]
    fn dual_norm_examples() {
        let d = basis(BoundaryCondition::Dirichlet, PI, 5);
        let f = Field::mode(&d, 2).to_dual();
        assert!((f.norm_dual(0.5) - 9f64.powf(-0.5)).abs() < 1e-14);
        let n = basis(BoundaryCondition::Neumann, PI, 5);
        assert!((Field::mode(&n, 0).to_dual().norm_dual(0.5) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn riesz_solve_examples() {
        let d = basis(BoundaryCondition::Dirichlet, PI, 5);
        let u = Field::mode(&d, 1).to_dual().riesz_solve(0.75).unwrap();
        assert!((u.coefficients()[1] - 4f64.powf(-1.5)).abs() < 1e-14);
        let zero = DualElement::new(&d, vec![0.0; 5]).unwrap();
        assert!(zero.riesz_solve(0.5).unwrap().norm() == 0.0);

        let n = basis(BoundaryCondition::Neumann, PI, 5);
        let bad = Field::mode(&n, 0).to_dual();
        assert!(matches!(bad.riesz_solve(0.5), Err(SpectraError::MeanConstraint(_))));
    }

    #[test]
    fn riesz_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let b = basis(bc, 1.7, 10);
            let r = 0.6;
            let mut pairings: Vec<f64> = (0..b.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if b.has_null_mode() {
                pairings[0] = 0.0;
            }
            let f = DualElement::new(&b, pairings).unwrap();
            let u = f.riesz_solve(r).unwrap();
            for _ in 0..50 {
                let v = random_field(&b, &mut rng);
                let lhs = u.apply_power(r).unwrap().inner(&v.apply_power(r).unwrap()).unwrap();
                let rhs = f.pair(&v).unwrap();
                assert!((lhs - rhs).abs() < 1e-11);
            }
            let self_pair = f.pair(&u).unwrap();
            assert!((self_pair - f.norm_dual(r).powi(2)).abs() < 1e-11);
        }
    }

    #[test]
    fn identification_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = basis(BoundaryCondition::Neumann, 1.0, 8);
        let v = random_field(&b, &mut rng);
        let w = random_field(&b, &mut rng);
        assert!((v.to_dual().pair(&w).unwrap() - v.inner(&w).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn extension_examples() {
        let n = basis(BoundaryCondition::Neumann, PI, 5);
        let e3 = Field::mode(&n, 2).extend_power_to_dual(0.5);
        assert!((e3.pairings()[2] - 4.0).abs() < 1e-13);
        assert!(e3.pairings().iter().enumerate().all(|(i, p)| i == 2 || *p == 0.0));
        let c = Field::from_fn(&n, |_| 1.2).extend_power_to_dual(0.5);
        assert!(c.pairings().iter().all(|p| p.abs() < 1e-12));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = basis(BoundaryCondition::Dirichlet, 2.0, 10);
        for _ in 0..20 {
            let v = random_field(&d, &mut rng);
            let lhs = v.extend_power_to_dual(0.4).norm_dual(0.4);
            assert!(lhs <= v.power_norm(0.4) * (1.0 + 1e-13));
        }
    }

    #[test]
    fn interpolation_examples() {
        let d = basis(BoundaryCondition::Dirichlet, PI, 6);
        let gap = Field::mode(&d, 3).interpolation_gap(0.5, 0.25);
        assert!((gap.lhs - 1.0).abs() < 1e-14 && (gap.rhs - 1.0).abs() < 1e-12);
        assert!((gap.theta - 2.0 / 3.0).abs() < 1e-15);
        let n = basis(BoundaryCondition::Neumann, PI, 6);
        let c = Field::from_fn(&n, |_| -0.8);
        let gap = c.interpolation_gap(1.0, 0.5);
        assert!((gap.lhs - gap.rhs).abs() < 1e-12);
    }

    #[test]
    fn compactness_examples() {
        let a = basis(BoundaryCondition::Neumann, PI, 8);
        let b = basis(BoundaryCondition::Neumann, PI, 8);
        let zero = Field::zeros(&a);
        let s = compactness_split(&a, &b, 0.5, 0.5, 1.0, &zero).unwrap();
        assert_eq!((s.lhs, s.rhs), (0.0, 0.0));

        let e1 = Field::mode(&a, 0);
        let s = compactness_split(&a, &b, 0.5, 0.5, 1.0, &e1).unwrap();
        assert!(s.lhs <= s.rhs * (1.0 + 1e-14));
        // sharpness: some direction attains equality
        let attained = (0..a.len()).any(|j| {
            let s = compactness_split(&a, &b, 0.5, 0.5, 1.0, &Field::mode(&a, j)).unwrap();
            (s.lhs - s.rhs).abs() < 1e-12
        });
        assert!(attained);

        let d = basis(BoundaryCondition::Dirichlet, PI, 8);
        assert!(matches!(
            compactness_split(&a, &d, 0.5, 0.5, 1.0, &e1),
            Err(SpectraError::DifferentEigenbases)
        ));
    }
}
