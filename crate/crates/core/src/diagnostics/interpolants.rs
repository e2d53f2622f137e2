use serde::Serialize;

use super::DiagnosticsError;
use crate::spectra::{Field, NormKind};

// three-point Gauss–Legendre on [0, 1]
const GL_NODES: [f64; 3] = [
    0.112_701_665_379_258_31,
    0.5,
    0.887_298_334_620_741_7,
];
const GL_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

/// Time values `z⁰..z^N` in a Hilbert space whose norm is diagonal in coefficient space,
/// together with the step `h`.
///
/// Represents the right-continuous piecewise constant `z̄`, the left one `z̲` and the
/// piecewise linear `ẑ` on the intervals `I_n = ((n−1)h, nh)`.
#[derive(Debug, Clone)]
pub struct InterpolantTriple {
    values: Vec<Vec<f64>>,
    weights: Vec<f64>,
    h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Identity,
    Inequality,
}

/// One relation between interpolant norms: `lhs` from integrating the interpolants in
/// time, `rhs` from the nodal values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs: f64,
}

impl Check {
    /// Relative error for identities, relative excess for inequalities (≤ 0 when they hold).
    pub fn defect(&self) -> f64 {
        let scale = self.lhs.abs().max(self.rhs.abs()).max(f64::MIN_POSITIVE);
        match self.kind {
            CheckKind::Identity => (self.lhs - self.rhs).abs() / scale,
            CheckKind::Inequality => (self.lhs - self.rhs) / scale,
        }
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.defect() <= rel_tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpolantReport {
    pub checks: Vec<Check>,
}

impl InterpolantReport {
    pub fn all_hold(&self, rel_tol: f64) -> bool {
        self.checks.iter().all(|c| c.holds(rel_tol))
    }

    pub fn first_failure(&self, rel_tol: f64) -> Option<&Check> {
        self.checks.iter().find(|c| !c.holds(rel_tol))
    }

    pub fn max_identity_defect(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.kind == CheckKind::Identity)
            .map(Check::defect)
            .fold(0.0, f64::max)
    }
}

impl InterpolantTriple {
    pub fn new(values: Vec<Vec<f64>>, weights: Vec<f64>, h: f64) -> Result<Self, DiagnosticsError> {
        if values.len() < 2 {
            return Err(DiagnosticsError::TooFewValues(values.len()));
        }
        if !(h > 0.0) {
            return Err(DiagnosticsError::NonPositiveStep(h));
        }
        if let Some(bad) = values.iter().find(|v| v.len() != weights.len()) {
            return Err(DiagnosticsError::LengthMismatch {
                expected: weights.len(),
                found: bad.len(),
            });
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(DiagnosticsError::Negative("norm weight"));
        }
        Ok(InterpolantTriple { values, weights, h })
    }

    /// Values in the norm `kind` of the fields' (common) basis.
    pub fn from_fields(fields: &[Field], kind: NormKind, h: f64) -> Result<Self, DiagnosticsError> {
        let first = fields.first().ok_or(DiagnosticsError::TooFewValues(0))?;
        let weights = first.basis().norm_weights(kind);
        let values = fields.iter().map(|f| f.coefficients().to_vec()).collect();
        Self::new(values, weights, h)
    }

    /// Scalar values with the absolute value as norm.
    pub fn scalar(values: &[f64], h: f64) -> Result<Self, DiagnosticsError> {
        Self::new(values.iter().map(|&v| vec![v]).collect(), vec![1.0], h)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| w * x * y)
            .sum()
    }

    fn sq(&self, a: &[f64]) -> f64 {
        self.inner(a, a)
    }

    fn diff(&self, n: usize) -> Vec<f64> {
        self.values[n + 1]
            .iter()
            .zip(&self.values[n])
            .map(|(a, b)| a - b)
            .collect()
    }

    pub fn node_norm(&self, n: usize) -> f64 {
        self.sq(&self.values[n]).sqrt()
    }

    /// `‖z^{n+1} − zⁿ‖`.
    pub fn increment_norm(&self, n: usize) -> f64 {
        self.sq(&self.diff(n)).sqrt()
    }

    // interval n = 1..=N, s ∈ [0, 1] the local time
    fn bar_at(&self, n: usize, _s: f64) -> Vec<f64> {
        self.values[n].clone()
    }

    fn under_at(&self, n: usize, _s: f64) -> Vec<f64> {
        self.values[n - 1].clone()
    }

    fn hat_at(&self, n: usize, s: f64) -> Vec<f64> {
        self.values[n - 1]
            .iter()
            .zip(&self.values[n])
            .map(|(a, b)| (1.0 - s) * a + s * b)
            .collect()
    }

    fn dt_at(&self, n: usize, _s: f64) -> Vec<f64> {
        self.diff(n - 1).iter().map(|d| d / self.h).collect()
    }

    fn quad_l2(&self, f: impl Fn(usize, f64) -> Vec<f64>) -> f64 {
        let mut total = 0.0;
        for n in 1..=self.intervals() {
            for (s, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                total += self.h * w * self.sq(&f(n, *s));
            }
        }
        total
    }

    fn sampled_linf(&self, f: impl Fn(usize, f64) -> Vec<f64>) -> f64 {
        let mut best: f64 = 0.0;
        for n in 1..=self.intervals() {
            for s in [0.0, GL_NODES[0], 0.5, GL_NODES[2], 1.0] {
                best = best.max(self.sq(&f(n, s)).sqrt());
            }
        }
        best
    }

    /// `‖z̄‖_{L∞}` from the nodal values.
    pub fn bar_linf(&self) -> f64 {
        (1..self.values.len()).map(|n| self.node_norm(n)).fold(0.0, f64::max)
    }

    pub fn under_linf(&self) -> f64 {
        (0..self.intervals()).map(|n| self.node_norm(n)).fold(0.0, f64::max)
    }

    pub fn hat_linf(&self) -> f64 {
        self.node_norm(0).max(self.bar_linf())
    }

    pub fn dt_linf(&self) -> f64 {
        (0..self.intervals()).map(|n| self.increment_norm(n)).fold(0.0, f64::max) / self.h
    }

    /// `‖z̄‖²_{L²}`.
    pub fn bar_l2_sq(&self) -> f64 {
        self.h * (1..self.values.len()).map(|n| self.sq(&self.values[n])).sum::<f64>()
    }

    pub fn under_l2_sq(&self) -> f64 {
        self.h * (0..self.intervals()).map(|n| self.sq(&self.values[n])).sum::<f64>()
    }

    /// Exact `‖ẑ‖²_{L²} = (h/3) Σ (‖z^{n−1}‖² + (z^{n−1}, zⁿ) + ‖zⁿ‖²)`.
    pub fn hat_l2_sq(&self) -> f64 {
        (1..=self.intervals())
            .map(|n| {
                let (a, b) = (&self.values[n - 1], &self.values[n]);
                self.sq(a) + self.inner(a, b) + self.sq(b)
            })
            .sum::<f64>()
            * self.h
            / 3.0
    }

    pub fn dt_l2_sq(&self) -> f64 {
        (0..self.intervals()).map(|n| self.sq(&self.diff(n))).sum::<f64>() / self.h
    }

    /// `Σ ‖z^{n+1} − zⁿ‖²`.
    pub fn increments_sq(&self) -> f64 {
        (0..self.intervals()).map(|n| self.sq(&self.diff(n))).sum()
    }

    pub fn bar_l2(&self) -> f64 {
        self.bar_l2_sq().sqrt()
    }

    pub fn under_l2(&self) -> f64 {
        self.under_l2_sq().sqrt()
    }

    pub fn hat_l2(&self) -> f64 {
        self.hat_l2_sq().sqrt()
    }

    pub fn dt_l2(&self) -> f64 {
        self.dt_l2_sq().sqrt()
    }

    /// Both sides of every relation between interpolant norms and nodal values.
    pub fn report(&self) -> InterpolantReport {
        use CheckKind::{Identity, Inequality};
        let h = self.h;
        let n_int = self.intervals();
        let max_inc = (0..n_int).map(|n| self.increment_norm(n)).fold(0.0, f64::max);
        let inc_sq = self.increments_sq();
        let max_pair = (1..=n_int)
            .map(|n| self.node_norm(n - 1).max(self.node_norm(n)))
            .fold(0.0, f64::max);
        let pair_sum = h * (1..=n_int)
            .map(|n| self.sq(&self.values[n - 1]) + self.sq(&self.values[n]))
            .sum::<f64>();

        let bar_minus_hat = |n: usize, s: f64| -> Vec<f64> {
            let (a, b) = (self.bar_at(n, s), self.hat_at(n, s));
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        };
        let under_minus_hat = |n: usize, s: f64| -> Vec<f64> {
            let (a, b) = (self.under_at(n, s), self.hat_at(n, s));
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        };
        let bar_minus_under = |n: usize, s: f64| -> Vec<f64> {
            let (a, b) = (self.bar_at(n, s), self.under_at(n, s));
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        };
        // piecewise constants are sampled strictly inside each interval
        let interior_linf = |f: &dyn Fn(usize, f64) -> Vec<f64>| -> f64 {
            (1..=n_int)
                .map(|n| self.sq(&f(n, 0.5)).sqrt())
                .fold(0.0, f64::max)
        };
        let bar = |n, s| self.bar_at(n, s);
        let under = |n, s| self.under_at(n, s);
        let hat = |n, s| self.hat_at(n, s);
        let dt = |n, s| self.dt_at(n, s);

        let c = |name, kind, lhs, rhs| Check { name, kind, lhs, rhs };
        let dt_l2_sq_q = self.quad_l2(dt);
        let bmh_l2_sq_q = self.quad_l2(bar_minus_hat);
        let bmu_linf_q = interior_linf(&bar_minus_under);
        let checks = vec![
            c("bar_linf", Identity, interior_linf(&bar), self.bar_linf()),
            c("under_linf", Identity, interior_linf(&under), self.under_linf()),
            c("dt_hat_linf", Identity, interior_linf(&dt), max_inc / h),
            c("bar_l2", Identity, self.quad_l2(bar), self.bar_l2_sq()),
            c("under_l2", Identity, self.quad_l2(under), self.under_l2_sq()),
            c("dt_hat_l2", Identity, dt_l2_sq_q, inc_sq / h),
            c("hat_linf", Identity, self.sampled_linf(hat), max_pair),
            c("hat_linf_via_bar", Identity, max_pair, self.hat_linf()),
            c("bar_minus_hat_linf", Identity, self.sampled_linf(bar_minus_hat), max_inc),
            c("bar_minus_hat_linf_via_dt", Identity, max_inc, h * self.dt_linf()),
            c("bar_minus_hat_l2", Identity, bmh_l2_sq_q, h / 3.0 * inc_sq),
            c("bar_minus_hat_l2_via_dt", Identity, bmh_l2_sq_q, h * h / 3.0 * dt_l2_sq_q),
            c("under_minus_hat_linf", Identity, self.sampled_linf(under_minus_hat), max_inc),
            c("under_minus_hat_l2", Identity, self.quad_l2(under_minus_hat), h / 3.0 * inc_sq),
            c("hat_l2_bound", Inequality, self.quad_l2(hat), pair_sum),
            c(
                "hat_l2_bound_via_bar",
                Inequality,
                pair_sum,
                h * self.sq(&self.values[0]) + 2.0 * self.bar_l2_sq(),
            ),
            c("bar_minus_under_linf", Inequality, bmu_linf_q, 2.0 * h * self.dt_linf()),
            c(
                "bar_minus_under_l2",
                Inequality,
                self.quad_l2(bar_minus_under),
                4.0 * h * h / 3.0 * self.dt_l2_sq(),
            ),
        ];
        InterpolantReport { checks }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_triple(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> InterpolantTriple {
        let values = (0..=n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let weights = (0..dim).map(|_| rng.gen_range(0.1..3.0)).collect();
        InterpolantTriple::new(values, weights, rng.gen_range(0.01..0.5)).unwrap()
    }

    fn check<'a>(report: &'a InterpolantReport, name: &str) -> &'a Check {
        report.checks.iter().find(|c| c.name == name).unwrap()
    }

    #[test]
    fn single_interval_unit_jump() {
        let h = 0.7;
        let t = InterpolantTriple::scalar(&[0.0, 1.0], h).unwrap();
        let rep = t.report();
        let c = check(&rep, "bar_minus_hat_l2");
        assert!((c.lhs - h / 3.0).abs() < 1e-15);
        assert!((c.rhs - h / 3.0).abs() < 1e-15);
        let c = check(&rep, "bar_minus_hat_l2_via_dt");
        assert!((c.rhs - h / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_tuple() {
        let t = InterpolantTriple::new(vec![vec![3.0, 4.0]; 5], vec![1.0, 1.0], 0.25).unwrap();
        assert_eq!(t.bar_linf(), 5.0);
        assert_eq!(t.dt_linf(), 0.0);
        let rep = t.report();
        for name in ["bar_minus_hat_linf", "bar_minus_hat_l2", "bar_minus_under_l2"] {
            assert_eq!(check(&rep, name).lhs, 0.0);
        }
        assert!(rep.all_hold(1e-12));
    }

    #[test]
    fn random_tuples_satisfy_all_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = random_triple(&mut rng, 8, 5);
            let rep = t.report();
            assert!(rep.all_hold(1e-12), "{:?}", rep.first_failure(1e-12));
            assert!(rep.max_identity_defect() <= 1e-12);
        }
    }

    #[test]
    fn from_fields_uses_norm_weights() {
        use crate::spectra::{BoundaryCondition, SpectralBasis};
        use std::sync::Arc;
        let b = Arc::new(
            SpectralBasis::laplacian(&[std::f64::consts::PI], BoundaryCondition::Dirichlet, 4, 1)
                .unwrap(),
        );
        let fields = vec![Field::mode(&b, 1), Field::mode(&b, 1).scaled(2.0)];
        let t = InterpolantTriple::from_fields(&fields, NormKind::Power(1.0), 1.0).unwrap();
        // λ₂ = 4
        assert!((t.bar_linf() - 8.0).abs() < 1e-12);
        assert!((t.dt_linf() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            InterpolantTriple::scalar(&[1.0], 0.1),
            Err(DiagnosticsError::TooFewValues(1))
        ));
        assert!(InterpolantTriple::scalar(&[1.0, 2.0], 0.0).is_err());
        assert!(InterpolantTriple::new(vec![vec![1.0], vec![1.0, 2.0]], vec![1.0], 0.1).is_err());
    }
}
