use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use serde::Serialize;

use super::{NormKind, SpectraError, SpectralBasis};

/// A truncated function on the shared quadrature grid, kept both as grid values and as
/// coefficients `c_j = (v, e_j)`.
///
/// Values are always the synthesis of the coefficients, so building a field from
/// arbitrary grid samples projects them onto the retained modes.
#[derive(Debug, Clone)]
pub struct Field {
    basis: Arc<SpectralBasis>,
    values: Vec<f64>,
    coeffs: Vec<f64>,
}

impl Field {
    /// Projects grid samples onto the basis.
    pub fn analyze(basis: &Arc<SpectralBasis>, values: &[f64]) -> Result<Self, SpectraError> {
        let n = basis.n_nodes();
        if values.len() != n {
            return Err(SpectraError::SizeMismatch {
                expected: n,
                found: values.len(),
            });
        }
        let weighted: Vec<f64> = values
            .iter()
            .zip(basis.weights())
            .map(|(v, w)| v * w)
            .collect();
        let coeffs = (0..basis.len())
            .map(|j| dot(basis.mode_samples(j), &weighted))
            .collect();
        Self::synthesize(basis, coeffs)
    }

    pub fn synthesize(basis: &Arc<SpectralBasis>, coeffs: Vec<f64>) -> Result<Self, SpectraError> {
        if coeffs.len() != basis.len() {
            return Err(SpectraError::SizeMismatch {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        let mut values = vec![0.0; basis.n_nodes()];
        for (j, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                for (v, e) in values.iter_mut().zip(basis.mode_samples(j)) {
                    *v += c * e;
                }
            }
        }
        Ok(Field {
            basis: Arc::clone(basis),
            values,
            coeffs,
        })
    }

    pub fn zeros(basis: &Arc<SpectralBasis>) -> Self {
        Field {
            basis: Arc::clone(basis),
            values: vec![0.0; basis.n_nodes()],
            coeffs: vec![0.0; basis.len()],
        }
    }

    /// Samples `f` at the quadrature nodes and projects.
    pub fn from_fn(basis: &Arc<SpectralBasis>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values: Vec<f64> = basis.nodes().iter().map(|&x| f(x)).collect();
        Self::analyze(basis, &values).expect("node count matches by construction")
    }

    /// The `j`-th eigenfunction (zero-based).
    pub fn mode(basis: &Arc<SpectralBasis>, j: usize) -> Self {
        let mut coeffs = vec![0.0; basis.len()];
        coeffs[j] = 1.0;
        Self::synthesize(basis, coeffs).expect("length matches by construction")
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coeffs
    }

    /// Quadrature of `f(v)` over the domain.
    pub fn integrate_map(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.values
            .iter()
            .zip(self.basis.weights())
            .map(|(&v, w)| w * f(v))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.integrate_map(|v| v) / self.basis.volume()
    }

    /// `‖v‖` in `H`, from the coefficients.
    pub fn norm(&self) -> f64 {
        dot(&self.coeffs, &self.coeffs).sqrt()
    }

    /// `(v, w)` by quadrature; the bases only need to share the grid.
    pub fn inner(&self, other: &Field) -> Result<f64, SpectraError> {
        if !self.basis.shares_grid(&other.basis) {
            return Err(SpectraError::BasisMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.basis.weights())
            .map(|((a, b), w)| a * b * w)
            .sum())
    }

    pub fn weighted_norm(&self, kind: NormKind) -> f64 {
        self.basis
            .norm_weights(kind)
            .iter()
            .zip(&self.coeffs)
            .map(|(w, c)| w * c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// `A^ρ v`: coefficients `λ_j^ρ c_j`.
    pub fn apply_power(&self, rho: f64) -> Result<Field, SpectraError> {
        if !(rho > 0.0) {
            return Err(SpectraError::NonPositiveExponent(rho));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| self.basis.eigen_power(j, rho) * c)
            .collect();
        Field::synthesize(&self.basis, coeffs)
    }

    /// `‖A^ρ v‖`.
    pub fn power_norm(&self, rho: f64) -> f64 {
        self.weighted_norm(NormKind::Power(rho))
    }

    /// The `V^r` norm: `‖A^r v‖`, or `(c₁² + ‖A^r v‖²)^{1/2}` when `λ₁ = 0`.
    pub fn norm_primal(&self, r: f64) -> f64 {
        self.weighted_norm(NormKind::Primal(r))
    }

    /// `(‖v‖² + ‖A^r v‖²)^{1/2}`.
    pub fn graph_norm(&self, r: f64) -> f64 {
        self.weighted_norm(NormKind::Graph(r))
    }

    /// `‖v‖_{-r}` of `v ∈ H` seen in the dual space.
    pub fn norm_dual(&self, r: f64) -> f64 {
        self.weighted_norm(NormKind::Dual(r))
    }

    /// Embedding `H ⊂ V^{-r}`: the pairing with `e_j` is `(v, e_j)`.
    pub fn to_dual(&self) -> DualElement {
        DualElement {
            basis: Arc::clone(&self.basis),
            pairings: self.coeffs.clone(),
        }
    }

    /// `A^{2r} v` extended to a dual element: `⟨A^{2r}v, w⟩ = (A^r v, A^r w)`.
    pub fn extend_power_to_dual(&self, r: f64) -> DualElement {
        let pairings = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| self.basis.eigen_power(j, 2.0 * r) * c)
            .collect();
        DualElement {
            basis: Arc::clone(&self.basis),
            pairings,
        }
    }

    /// Both sides of `‖v‖ ≤ ‖v‖_{η}^θ ‖v‖_{-r}^{1-θ}` with `θ = r/(r+η)`.
    pub fn interpolation_gap(&self, r: f64, eta: f64) -> InterpolationGap {
        let theta = r / (r + eta);
        let lhs = self.norm();
        let rhs = self.norm_primal(eta).powf(theta) * self.norm_dual(r).powf(1.0 - theta);
        InterpolationGap { lhs, rhs, theta }
    }

    /// Re-expresses the field in another basis on the same grid.
    ///
    /// With identical eigenfunctions the coefficients carry over unchanged; otherwise the
    /// grid values are projected.
    pub fn rebased(&self, basis: &Arc<SpectralBasis>) -> Result<Field, SpectraError> {
        if self.basis.shares_eigenfunctions(basis) {
            Ok(Field {
                basis: Arc::clone(basis),
                values: self.values.clone(),
                coeffs: self.coeffs.clone(),
            })
        } else if self.basis.shares_grid(basis) {
            Field::analyze(basis, &self.values)
        } else {
            Err(SpectraError::BasisMismatch)
        }
    }

    /// Pointwise map on the grid followed by projection onto the basis.
    pub fn map_project(&self, f: impl Fn(f64) -> f64) -> Field {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        Field::analyze(&self.basis, &values).expect("same grid")
    }

    pub fn scaled(&self, a: f64) -> Field {
        Field {
            basis: Arc::clone(&self.basis),
            values: self.values.iter().map(|v| a * v).collect(),
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    fn combine(&self, other: &Field, a: f64, b: f64) -> Field {
        assert!(
            self.basis.shares_eigenfunctions(&other.basis),
            "field arithmetic across different eigenbases"
        );
        Field {
            basis: Arc::clone(&self.basis),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }
}

impl Add for &Field {
    type Output = Field;

    fn add(self, rhs: &Field) -> Field {
        self.combine(rhs, 1.0, 1.0)
    }
}

impl Sub for &Field {
    type Output = Field;

    fn sub(self, rhs: &Field) -> Field {
        self.combine(rhs, 1.0, -1.0)
    }
}

impl Mul<&Field> for f64 {
    type Output = Field;

    fn mul(self, rhs: &Field) -> Field {
        rhs.scaled(self)
    }
}

/// An element of `V^{-r}` stored through its pairings `f_j = ⟨f, e_j⟩`.
#[derive(Debug, Clone)]
pub struct DualElement {
    basis: Arc<SpectralBasis>,
    pairings: Vec<f64>,
}

impl DualElement {
    pub fn new(basis: &Arc<SpectralBasis>, pairings: Vec<f64>) -> Result<Self, SpectraError> {
        if pairings.len() != basis.len() {
            return Err(SpectraError::SizeMismatch {
                expected: basis.len(),
                found: pairings.len(),
            });
        }
        Ok(DualElement {
            basis: Arc::clone(basis),
            pairings,
        })
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn pairings(&self) -> &[f64] {
        &self.pairings
    }

    /// `⟨f, v⟩` for a field on the same eigenfunctions.
    pub fn pair(&self, v: &Field) -> Result<f64, SpectraError> {
        if !self.basis.shares_eigenfunctions(v.basis()) {
            return Err(SpectraError::BasisMismatch);
        }
        Ok(dot(&self.pairings, v.coefficients()))
    }

    /// Series representation of the dual norm.
    pub fn norm_dual(&self, r: f64) -> f64 {
        self.basis
            .norm_weights(NormKind::Dual(r))
            .iter()
            .zip(&self.pairings)
            .map(|(w, f)| w * f * f)
            .sum::<f64>()
            .sqrt()
    }

    /// `A₀^{-2r} f`, the inverse of the Riesz map restricted to mean-free elements when
    /// `λ₁ = 0`.
    pub fn riesz_solve(&self, r: f64) -> Result<Field, SpectraError> {
        let scale = self.pairings.iter().map(|f| f.abs()).fold(0.0, f64::max);
        if self.basis.has_null_mode() && self.pairings[0].abs() > 1e-12 * scale {
            return Err(SpectraError::MeanConstraint(self.pairings[0]));
        }
        let coeffs = self
            .pairings
            .iter()
            .zip(self.basis.eigenvalues())
            .map(|(f, &lam)| if lam == 0.0 { 0.0 } else { lam.powf(-2.0 * r) * f })
            .collect();
        Field::synthesize(&self.basis, coeffs)
    }
}

/// The two sides of the interpolation inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationGap {
    pub lhs: f64,
    pub rhs: f64,
    pub theta: f64,
}

impl InterpolationGap {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
