//! Interpolants in time, discrete calculus identities, estimate ledgers and stability
//! experiments over trajectories.

mod contdep;
mod interpolants;
mod ledger;
mod sums;

use thiserror::Error;

use crate::spectra::SpectraError;
use crate::stepper::RunError;

pub use contdep::{compare_trajectories, continuous_dependence, self_cauchy, ContinuousDependence};
pub use interpolants::{Check, CheckKind, InterpolantReport, InterpolantTriple};
pub use ledger::{
    apriori_ledger, regularity_ledger, sweep_variation, Aggregate, DataNorms, EnergyRow,
    EnergyTerms, EstimateLedger, Scaling, Variation,
};
pub use sums::{
    discrete_gronwall, elementary_identity, gronwall_check, summation_by_parts_check,
    summation_by_parts_scale, young_gap, GronwallCheck,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("at least two time values are needed, got {0}")]
    TooFewValues(usize),
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("expected length {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{0} must be nonnegative")]
    Negative(&'static str),
    #[error("non-finite ledger entry {0}")]
    NonFinite(String),
    #[error("precondition not verified: {0}")]
    PreconditionUnverified(String),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}
