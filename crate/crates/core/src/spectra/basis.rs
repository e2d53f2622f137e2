use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpectraError;

/// Boundary condition shared by every axis of a rectangular domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    /// Eigenvalue of `-d²/dx²` on `(0, length)` for the zero-based axis mode `k`.
    pub fn axis_eigenvalue(self, k: usize, length: f64) -> f64 {
        let freq = self.axis_frequency(k, length);
        freq * freq
    }

    /// Orthonormal eigenfunction of `-d²/dx²` on `(0, length)` for axis mode `k`.
    pub fn axis_eigenfunction(self, k: usize, length: f64, x: f64) -> f64 {
        let amp = (2.0 / length).sqrt();
        match self {
            BoundaryCondition::Dirichlet => amp * (self.axis_frequency(k, length) * x).sin(),
            BoundaryCondition::Neumann if k == 0 => length.sqrt().recip(),
            BoundaryCondition::Neumann => amp * (self.axis_frequency(k, length) * x).cos(),
        }
    }

    fn axis_frequency(self, k: usize, length: f64) -> f64 {
        let j = match self {
            BoundaryCondition::Dirichlet => k + 1,
            BoundaryCondition::Neumann => k,
        };
        j as f64 * PI / length
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Dirichlet => f.write_str("dirichlet"),
            BoundaryCondition::Neumann => f.write_str("neumann"),
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            other => Err(format!("unknown boundary condition `{other}`")),
        }
    }
}

/// Truncated eigenbasis of a power of the Laplacian on an interval or a rectangle.
///
/// Modes are stored flattened and sorted by eigenvalue. The quadrature grid is the
/// composite one-point Gauss–Legendre (midpoint) rule with `2M` cells per axis, which
/// integrates every product of two retained eigenfunctions exactly up to rounding.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    lengths: Vec<f64>,
    bc: BoundaryCondition,
    modes_per_axis: usize,
    power: u32,
    eigenvalues: Vec<f64>,
    multi_index: Vec<[usize; 2]>,
    nodes: Vec<[f64; 2]>,
    weights: Vec<f64>,
    // samples[j * n_nodes + q] = e_j(x_q)
    samples: Vec<f64>,
}

impl SpectralBasis {
    /// Closed-form eigenpairs of `(-Δ)^power` with the given boundary condition.
    ///
    /// One length gives an interval, two lengths a rectangle (tensor-product modes,
    /// `n_modes` per axis).
    pub fn laplacian(
        lengths: &[f64],
        bc: BoundaryCondition,
        n_modes: usize,
        power: u32,
    ) -> Result<Self, SpectraError> {
        if lengths.is_empty() || lengths.len() > 2 {
            return Err(SpectraError::Dimension(lengths.len()));
        }
        if let Some(&l) = lengths.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(SpectraError::NonPositiveLength(l));
        }
        if n_modes < 2 {
            return Err(SpectraError::TooFewModes(n_modes));
        }
        if power == 0 {
            return Err(SpectraError::ZeroPower);
        }

        let mut modes: Vec<([usize; 2], f64)> = Vec::new();
        match lengths {
            [l] => {
                for k in 0..n_modes {
                    modes.push(([k, 0], bc.axis_eigenvalue(k, *l)));
                }
            }
            [lx, ly] => {
                for kx in 0..n_modes {
                    for ky in 0..n_modes {
                        let lam = bc.axis_eigenvalue(kx, *lx) + bc.axis_eigenvalue(ky, *ly);
                        modes.push(([kx, ky], lam));
                    }
                }
            }
            _ => unreachable!(),
        }
        // stable: ties keep lexicographic multi-index order
        modes.sort_by(|a, b| a.1.total_cmp(&b.1));

        let cells = 2 * n_modes;
        let axis_nodes = |l: f64| -> Vec<f64> {
            (0..cells).map(|q| (q as f64 + 0.5) * l / cells as f64).collect()
        };
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        match lengths {
            [l] => {
                for x in axis_nodes(*l) {
                    nodes.push([x, 0.0]);
                    weights.push(l / cells as f64);
                }
            }
            [lx, ly] => {
                let (xs, ys) = (axis_nodes(*lx), axis_nodes(*ly));
                let w = lx * ly / (cells * cells) as f64;
                for &x in &xs {
                    for &y in &ys {
                        nodes.push([x, y]);
                        weights.push(w);
                    }
                }
            }
            _ => unreachable!(),
        }

        let n_nodes = nodes.len();
        let mut samples = Vec::with_capacity(modes.len() * n_nodes);
        for (idx, _) in &modes {
            for node in &nodes {
                let mut value = bc.axis_eigenfunction(idx[0], lengths[0], node[0]);
                if lengths.len() == 2 {
                    value *= bc.axis_eigenfunction(idx[1], lengths[1], node[1]);
                }
                samples.push(value);
            }
        }

        let eigenvalues = modes
            .iter()
            .map(|(_, lam)| lam.powi(power as i32))
            .collect();
        Ok(SpectralBasis {
            lengths: lengths.to_vec(),
            bc,
            modes_per_axis: n_modes,
            power,
            eigenvalues,
            multi_index: modes.into_iter().map(|(idx, _)| idx).collect(),
            nodes,
            weights,
            samples,
        })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn dimension(&self) -> usize {
        self.lengths.len()
    }

    pub fn boundary_condition(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn modes_per_axis(&self) -> usize {
        self.modes_per_axis
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// Total number of retained modes.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Zero-based per-axis mode indices of each flattened mode (second entry is 0 in 1D).
    pub fn multi_index(&self) -> &[[usize; 2]] {
        &self.multi_index
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Values of the `j`-th eigenfunction at the quadrature nodes.
    pub fn mode_samples(&self, j: usize) -> &[f64] {
        let n = self.n_nodes();
        &self.samples[j * n..(j + 1) * n]
    }

    /// `λ₁ = 0`, i.e. the first eigenfunction is constant.
    pub fn has_null_mode(&self) -> bool {
        self.eigenvalues[0] == 0.0
    }

    /// Same eigenfunctions (geometry, boundary condition and truncation); eigenvalues may
    /// differ through the power.
    pub fn shares_eigenfunctions(&self, other: &SpectralBasis) -> bool {
        self.lengths == other.lengths
            && self.bc == other.bc
            && self.modes_per_axis == other.modes_per_axis
    }

    /// Same quadrature grid, so grid values can be exchanged directly.
    pub fn shares_grid(&self, other: &SpectralBasis) -> bool {
        self.lengths == other.lengths && self.modes_per_axis == other.modes_per_axis
    }

    /// `λ_j^ρ` with `0^ρ := 0`.
    pub fn eigen_power(&self, j: usize, rho: f64) -> f64 {
        let lam = self.eigenvalues[j];
        if lam == 0.0 {
            0.0
        } else {
            lam.powf(rho)
        }
    }

    /// Diagonal weights `w_j` with `‖v‖² = Σ w_j c_j²` for the selected norm.
    pub fn norm_weights(&self, kind: NormKind) -> Vec<f64> {
        let null = self.has_null_mode();
        (0..self.len())
            .map(|j| match kind {
                NormKind::H => 1.0,
                NormKind::Power(rho) => self.eigen_power(j, 2.0 * rho),
                NormKind::Primal(_) if null && j == 0 => 1.0,
                NormKind::Primal(r) => self.eigen_power(j, 2.0 * r),
                NormKind::Dual(_) if null && j == 0 => 1.0,
                NormKind::Dual(r) => self.eigenvalues[j].powf(-2.0 * r),
                NormKind::Graph(r) => 1.0 + self.eigen_power(j, 2.0 * r),
            })
            .collect()
    }

    /// Sharp constant of `‖v − mean v‖ ≤ C ‖A^r v‖` over the truncated space.
    pub fn poincare_ratio(&self, r: f64) -> Result<f64, SpectraError> {
        if !self.has_null_mode() {
            return Err(SpectraError::NoNullMode);
        }
        if r <= 0.0 {
            return Err(SpectraError::NonPositiveExponent(r));
        }
        // directions e_j, j ≥ 2, give ratios λ_j^{-r}; the largest is at the smallest λ_j > 0
        Ok(self.eigenvalues[1..]
            .iter()
            .map(|lam| lam.powf(-r))
            .fold(0.0, f64::max))
    }
}

/// Norms that are diagonal in the eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// `L²(Ω)`.
    H,
    /// Seminorm `‖A^ρ v‖`.
    Power(f64),
    /// Hilbert norm of `V^r` that replaces `λ₁^r` by 1 when `λ₁ = 0`.
    Primal(f64),
    /// Dual norm of `V^{-r}` applied to the coefficients of an `H` element.
    Dual(f64),
    /// Graph norm `(‖v‖² + ‖A^r v‖²)^{1/2}`.
    Graph(f64),
}
