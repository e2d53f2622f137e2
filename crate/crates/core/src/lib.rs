//! Spectral-Galerkin simulation of generalized fractional Cahn–Hilliard systems
//!
//! ```text
//! ∂ₜy + A^{2r}μ = 0,    τ∂ₜy + B^{2σ}y + β(y) + π(y) ∋ μ + u,
//! ```
//!
//! discretized by Moreau–Yosida regularization of `β` and an implicit Euler scheme, with
//! monitors for the conservation laws, energy inequalities and a priori bounds that the
//! scheme satisfies.

pub mod checks;
pub mod commands;
pub mod config;
pub mod diagnostics;
pub mod oracle;
pub mod potentials;
pub mod spectra;
pub mod stepper;
