use std::sync::Arc;

use serde::Serialize;

use super::{DiagnosticsError, InterpolantTriple};
use crate::spectra::{Field, NormKind};
use crate::stepper::{Scheme, Trajectory};

/// Both sides of the stability bound for the difference of two solutions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuousDependence {
    /// `‖y₁ − y₂‖_{L∞(V_A^{−r})}`
    pub linf_dual: f64,
    /// `‖y₁ − y₂‖_{L²(V_B^σ)}`
    pub l2_vb: f64,
    /// `τ^{1/2}‖y₁ − y₂‖_{L∞(H)}`
    pub tau_linf_h: f64,
    pub lhs: f64,
    /// `‖u₁ − u₂‖_{L²(H)}`
    pub rhs: f64,
    /// `lhs/rhs`; absent for identical forcings.
    pub ratio: Option<f64>,
    /// Solver-tolerance bound the left side must respect when the forcings coincide.
    pub uniqueness_bound: Option<f64>,
}

impl ContinuousDependence {
    /// Without a ratio, the uniqueness probe must pass.
    pub fn uniqueness_holds(&self) -> bool {
        self.uniqueness_bound.is_none_or(|b| self.lhs <= b)
    }
}

/// Runs the scheme for both forcings from the same `y₀` and compares the trajectories.
pub fn continuous_dependence(
    scheme: &Arc<Scheme>,
    y0: &Field,
    u1: Vec<Field>,
    u2: Vec<Field>,
) -> Result<ContinuousDependence, DiagnosticsError> {
    let t1 = scheme.run(y0, u1)?;
    let t2 = scheme.run(y0, u2)?;
    compare_trajectories(&t1, &t2)
}

/// The stability quantities for two trajectories of the same scheme.
pub fn compare_trajectories(
    t1: &Trajectory,
    t2: &Trajectory,
) -> Result<ContinuousDependence, DiagnosticsError> {
    if t1.states.len() != t2.states.len() {
        return Err(DiagnosticsError::LengthMismatch {
            expected: t1.states.len(),
            found: t2.states.len(),
        });
    }
    let scheme = &t1.scheme;
    let config = scheme.config();
    let h = config.h();
    let diffs: Vec<Field> = t1
        .states
        .iter()
        .zip(&t2.states)
        .map(|(a, b)| &a.y - &b.y)
        .collect();
    let in_a: Vec<Field> = diffs
        .iter()
        .map(|d| d.rebased(scheme.a()))
        .collect::<Result<_, _>>()?;
    let du: Vec<Field> = t1
        .forcing
        .iter()
        .zip(&t2.forcing)
        .map(|(a, b)| Ok(&a.rebased(scheme.b())? - &b.rebased(scheme.b())?))
        .collect::<Result<_, DiagnosticsError>>()?;

    let dual = InterpolantTriple::from_fields(&in_a, NormKind::Dual(config.r), h)?;
    let vb = InterpolantTriple::from_fields(&diffs, NormKind::Graph(config.sigma), h)?;
    let plain = InterpolantTriple::from_fields(&diffs, NormKind::H, h)?;
    let forcing = InterpolantTriple::from_fields(&du, NormKind::H, h)?;

    let linf_dual = dual.hat_linf();
    let l2_vb = vb.bar_l2();
    let tau_linf_h = config.tau.sqrt() * plain.hat_linf();
    let lhs = linf_dual + l2_vb + tau_linf_h;
    let rhs = forcing.bar_l2();
    let (ratio, uniqueness_bound) = if rhs > 0.0 {
        (Some(lhs / rhs), None)
    } else {
        let scale = 1.0
            + t1.states
                .iter()
                .map(|s| s.y.norm() + s.mu.norm())
                .fold(0.0, f64::max);
        let tol = config.inner_tol_abs + config.inner_tol_rel * scale;
        (None, Some(config.steps as f64 * tol * scale))
    };
    Ok(ContinuousDependence {
        linf_dual,
        l2_vb,
        tau_linf_h,
        lhs,
        rhs,
        ratio,
        uniqueness_bound,
    })
}

/// `max_j ‖y_h^{⌈j/2⌉} − y_{h/2}^j‖`, the `L∞(H)` distance of the piecewise constant
/// interpolants of a run and its refinement with half the step.
pub fn self_cauchy(coarse: &Trajectory, fine: &Trajectory) -> Result<f64, DiagnosticsError> {
    let n = coarse.states.len() - 1;
    if fine.states.len() - 1 != 2 * n {
        return Err(DiagnosticsError::LengthMismatch {
            expected: 2 * n + 1,
            found: fine.states.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for j in 1..=2 * n {
        let c = &coarse.states[j.div_ceil(2)].y;
        let f = fine.states[j].y.rebased(c.basis())?;
        worst = worst.max((c - &f).norm());
    }
    Ok(worst)
}
