//! Implicit time discretization of the Yosida-regularized system.
//!
//! Each step solves, for `(yⁿ⁺¹, μⁿ⁺¹)`,
//!
//! ```text
//! (yⁿ⁺¹ − yⁿ)/h + μⁿ⁺¹ + A^{2r}μⁿ⁺¹ = μⁿ
//! τ(yⁿ⁺¹ − yⁿ)/h + (L'_π I + B^{2σ} + β_λ + π)(yⁿ⁺¹) = L'_π yⁿ + μⁿ⁺¹ + uⁿ⁺¹
//! ```
//!
//! in spectral-Galerkin form: `y` is expanded in the eigenbasis of `B`, `μ` in that of
//! `A`, the first equation is tested against the `A` modes and the second against the
//! `B` modes. Nonlinear terms are evaluated at the quadrature nodes and projected.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potentials::{default_delta0, Potential, PotentialError, YosidaView};
use crate::spectra::{Field, SpectraError, SpectralBasis};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("invalid scheme configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("inner solve stalled after {iterations} iterations with residual {residual:e}")]
    InnerNonconvergence {
        iterations: usize,
        residual: f64,
        best_y: Vec<f64>,
        best_mu: Vec<f64>,
    },
    #[error("mean value {0} of the initial datum is not interior to D(beta)")]
    MeanOutsideDomain(f64),
    #[error("invalid initial datum: {0}")]
    InitialData(String),
    #[error("regularity initialization not satisfied: {0}")]
    RegularityInit(String),
    #[error("expected {expected} forcing samples, found {found}")]
    ForcingLength { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("step {step}: {source}")]
pub struct RunError {
    pub step: usize,
    #[source]
    pub source: StepError,
}

/// Every scheme parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    /// Viscosity `τ ∈ [0, 1]`.
    pub tau: f64,
    pub r: f64,
    pub sigma: f64,
    pub final_time: f64,
    pub steps: usize,
    /// Yosida level.
    pub lambda: f64,
    pub inner_tol_abs: f64,
    pub inner_tol_rel: f64,
    pub newton_max_iter: usize,
    pub fallback_max_iter: usize,
    /// Require an interior mean value when `A` has a null mode.
    pub m0_guard: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            tau: 0.0,
            r: 0.5,
            sigma: 0.5,
            final_time: 1.0,
            steps: 64,
            lambda: 0.05,
            inner_tol_abs: 1e-10,
            inner_tol_rel: 1e-10,
            newton_max_iter: 50,
            fallback_max_iter: 500,
            m0_guard: true,
        }
    }
}

impl SchemeConfig {
    pub fn h(&self) -> f64 {
        self.final_time / self.steps as f64
    }

    pub fn validate(&self) -> Result<(), StepError> {
        let bad = |msg: String| Err(StepError::InvalidConfig(msg));
        if !(0.0..=1.0).contains(&self.tau) {
            return bad(format!("tau must lie in [0, 1], got {}", self.tau));
        }
        if !(self.r > 0.0) || !(self.sigma > 0.0) {
            return bad(format!("r and sigma must be positive, got {} and {}", self.r, self.sigma));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return bad(format!("final time must be positive, got {}", self.final_time));
        }
        if self.steps < 1 {
            return bad("at least one time step is required".into());
        }
        if !(self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.inner_tol_abs >= 0.0 && self.inner_tol_rel >= 0.0)
            || self.inner_tol_abs + self.inner_tol_rel == 0.0
        {
            return bad("inner tolerances must be nonnegative and not both zero".into());
        }
        if self.newton_max_iter == 0 {
            return bad("newton_max_iter must be positive".into());
        }
        Ok(())
    }
}

/// Convergence record of one inner solve.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct InnerStats {
    pub iterations: usize,
    /// Max of the two equation residuals in `H`.
    pub residual: f64,
    pub fallback: bool,
    /// Combined residual `(‖R₁‖² + ‖R₂‖²)^{1/2}` at each accepted monolithic Newton iterate.
    pub history: Vec<f64>,
    /// Quadrature nodes where the log-well resolvent stopped at its guard.
    pub guard_hits: usize,
}

#[derive(Debug, Clone)]
pub struct State {
    pub n: usize,
    /// In the eigenbasis of `B`.
    pub y: Field,
    /// In the eigenbasis of `A`.
    pub mu: Field,
    pub stats: InnerStats,
}

/// Which regularity hypothesis a trajectory was started under.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegularityInit {
    /// `τ > 0`: `y₀ ∈ V_B^{2σ}` and `β°(y₀)` finite on the grid.
    Viscous {
        b2sigma_norm: f64,
        beta_min_section_max: f64,
    },
    /// `τ = 0`: `‖μ₀^λ(t)‖_{A,r} ≤ M₀` at every forcing sample.
    Nonviscous { m0_bound: f64, max_norm: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scheme: Arc<Scheme>,
    pub states: Vec<State>,
    pub forcing: Vec<Field>,
    pub m0: f64,
    /// Interior margin of `m0` in `D(β)`, when it exists.
    pub delta0: Option<f64>,
    pub regularity: Option<RegularityInit>,
}

impl Trajectory {
    pub fn h(&self) -> f64 {
        self.scheme.config.h()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `uⁿ = u(nh)`, `n = 0..=steps`.
pub fn sample_forcing(u: impl Fn(f64) -> Field, steps: usize, h: f64) -> Vec<Field> {
    (0..=steps).map(|n| u(n as f64 * h)).collect()
}

/// Operators, regularized potential and parameters of one discrete problem.
#[derive(Debug, Clone)]
pub struct Scheme {
    a: Arc<SpectralBasis>,
    b: Arc<SpectralBasis>,
    potential: Potential,
    view: YosidaView,
    config: SchemeConfig,
    // 1 + λ_j^{2r} on the A modes
    a_diag: Vec<f64>,
    // λ'_j^{2σ} on the B modes
    b_diag: Vec<f64>,
    // (e_i^A, e_j^B) when the eigenfunctions differ
    coupling: Option<DMatrix<f64>>,
    // B eigenfunctions at the nodes, n_nodes × M_B
    b_samples: DMatrix<f64>,
}

struct Residual {
    r1: Vec<f64>,
    r2: Vec<f64>,
    guard_hits: usize,
}

impl Residual {
    fn max_norm(&self) -> f64 {
        norm(&self.r1).max(norm(&self.r2))
    }

    fn merit(&self) -> f64 {
        0.5 * (dot(&self.r1, &self.r1) + dot(&self.r2, &self.r2))
    }
}

impl Scheme {
    pub fn new(
        a: Arc<SpectralBasis>,
        b: Arc<SpectralBasis>,
        potential: Potential,
        config: SchemeConfig,
    ) -> Result<Self, StepError> {
        config.validate()?;
        if !a.shares_grid(&b) {
            return Err(StepError::InvalidConfig(
                "A and B must live on the same domain with the same truncation".into(),
            ));
        }
        let view = potential.yosida(config.lambda)?;
        let a_diag = (0..a.len()).map(|j| 1.0 + a.eigen_power(j, 2.0 * config.r)).collect();
        let b_diag = (0..b.len()).map(|j| b.eigen_power(j, 2.0 * config.sigma)).collect();
        let coupling = if a.shares_eigenfunctions(&b) {
            None
        } else {
            Some(DMatrix::from_fn(a.len(), b.len(), |i, j| {
                a.mode_samples(i)
                    .iter()
                    .zip(b.mode_samples(j))
                    .zip(b.weights())
                    .map(|((x, y), w)| x * y * w)
                    .sum()
            }))
        };
        let b_samples = DMatrix::from_fn(b.n_nodes(), b.len(), |q, j| b.mode_samples(j)[q]);
        Ok(Scheme {
            a,
            b,
            potential,
            view,
            config,
            a_diag,
            b_diag,
            coupling,
            b_samples,
        })
    }

    pub fn a(&self) -> &Arc<SpectralBasis> {
        &self.a
    }

    pub fn b(&self) -> &Arc<SpectralBasis> {
        &self.b
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn yosida(&self) -> &YosidaView {
        &self.view
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    /// Same problem with another configuration (bases and potential are shared).
    pub fn with_config(&self, config: SchemeConfig) -> Result<Scheme, StepError> {
        Scheme::new(
            Arc::clone(&self.a),
            Arc::clone(&self.b),
            self.potential.clone(),
            config,
        )
    }

    fn b_to_a(&self, c: &[f64]) -> Vec<f64> {
        match &self.coupling {
            None => c.to_vec(),
            Some(m) => (m * DVector::from_column_slice(c)).as_slice().to_vec(),
        }
    }

    fn a_to_b(&self, c: &[f64]) -> Vec<f64> {
        match &self.coupling {
            None => c.to_vec(),
            Some(m) => (m.tr_mul(&DVector::from_column_slice(c))).as_slice().to_vec(),
        }
    }

    /// `P_B[(β_λ + π)(y)]`, the nodal slopes `β_λ' + π'`, and the log-guard hit count.
    fn nonlinearity(&self, y: &Field) -> (Vec<f64>, Vec<f64>, usize) {
        let mut guard_hits = 0;
        let mut values = Vec::with_capacity(y.values().len());
        let mut slopes = Vec::with_capacity(y.values().len());
        for &s in y.values() {
            let j = self
                .view
                .resolvent_detailed(s)
                .expect("resolvent converges for monotone wells");
            guard_hits += j.guard_hit as usize;
            values.push((s - j.value) / self.view.lambda() + self.potential.pi(s));
            slopes.push(self.view.yosida_slope(s) + self.potential.pi_prime(s));
        }
        let projected = Field::analyze(&self.b, &values)
            .expect("same grid")
            .into_coefficients();
        (projected, slopes, guard_hits)
    }

    fn residual(&self, prev: &State, u: &[f64], y: &[f64], mu: &[f64]) -> (Residual, Vec<f64>) {
        let h = self.config.h();
        let lh = self.config.tau / h + self.potential.lipschitz_pi_prime();
        let y_old = prev.y.coefficients();
        let mu_old = prev.mu.coefficients();
        let dy: Vec<f64> = y.iter().zip(y_old).map(|(a, b)| a - b).collect();
        let dy_a = self.b_to_a(&dy);
        let r1 = (0..mu.len())
            .map(|i| dy_a[i] / h + self.a_diag[i] * mu[i] - mu_old[i])
            .collect();
        let y_field = Field::synthesize(&self.b, y.to_vec()).expect("length checked");
        let (nl, slopes, guard_hits) = self.nonlinearity(&y_field);
        let mu_b = self.a_to_b(mu);
        let r2 = (0..y.len())
            .map(|i| lh * dy[i] + self.b_diag[i] * y[i] + nl[i] - mu_b[i] - u[i])
            .collect();
        (Residual { r1, r2, guard_hits }, slopes)
    }

    /// `Sᵀ diag(w·d) S` on the `B` modes.
    fn weighted_gram(&self, slopes: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.b_samples.clone();
        for (q, (d, w)) in slopes.iter().zip(self.b.weights()).enumerate() {
            scaled.row_mut(q).scale_mut(d * w);
        }
        self.b_samples.tr_mul(&scaled)
    }

    /// Equation residuals `(‖R₁‖, ‖R₂‖)` of a candidate pair (fields in any basis on the
    /// shared grid).
    pub fn equation_residuals(
        &self,
        prev: &State,
        y: &Field,
        mu: &Field,
        u: &Field,
    ) -> Result<(f64, f64), StepError> {
        let y = y.rebased(&self.b)?;
        let mu = mu.rebased(&self.a)?;
        let u = u.rebased(&self.b)?;
        let (res, _) = self.residual(prev, u.coefficients(), y.coefficients(), mu.coefficients());
        Ok((norm(&res.r1), norm(&res.r2)))
    }

    pub fn initial_state(&self, y0: &Field) -> Result<State, StepError> {
        Ok(State {
            n: 0,
            y: y0.rebased(&self.b)?,
            mu: Field::zeros(&self.a),
            stats: InnerStats::default(),
        })
    }

    /// Advances one step.
    pub fn step(&self, state: &State, u_next: &Field) -> Result<State, StepError> {
        let u = u_next.rebased(&self.b)?;
        let tol = self.config.inner_tol_abs
            + self.config.inner_tol_rel * (state.y.norm() + state.mu.norm() + u.norm());
        let (mb, ma) = (self.b.len(), self.a.len());
        let h = self.config.h();
        let lh = self.config.tau / h + self.potential.lipschitz_pi_prime();

        let mut y = state.y.coefficients().to_vec();
        let mut mu = state.mu.coefficients().to_vec();
        let mut stats = InnerStats::default();
        let (mut res, mut slopes) = self.residual(state, u.coefficients(), &y, &mu);
        stats.history.push((2.0 * res.merit()).sqrt());

        let mut converged = res.max_norm() <= tol;
        while !converged && stats.iterations < self.config.newton_max_iter {
            let mut jac = DMatrix::<f64>::zeros(mb + ma, mb + ma);
            let gram = self.weighted_gram(&slopes);
            jac.view_mut((0, 0), (mb, mb)).copy_from(&gram);
            for i in 0..mb {
                jac[(i, i)] += lh + self.b_diag[i];
            }
            for i in 0..ma {
                jac[(mb + i, mb + i)] = self.a_diag[i];
            }
            match &self.coupling {
                None => {
                    for i in 0..mb {
                        jac[(i, mb + i)] = -1.0;
                        jac[(mb + i, i)] = 1.0 / h;
                    }
                }
                Some(c) => {
                    jac.view_mut((0, mb), (mb, ma)).copy_from(&(-c.transpose()));
                    jac.view_mut((mb, 0), (ma, mb)).copy_from(&(c / h));
                }
            }
            let rhs = DVector::from_iterator(
                mb + ma,
                res.r2.iter().chain(&res.r1).map(|v| -v),
            );
            let Some(dir) = jac.lu().solve(&rhs) else {
                break;
            };

            let merit0 = res.merit();
            let mut alpha = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let y_try: Vec<f64> = (0..mb).map(|i| y[i] + alpha * dir[i]).collect();
                let mu_try: Vec<f64> = (0..ma).map(|i| mu[i] + alpha * dir[mb + i]).collect();
                let (r_try, s_try) = self.residual(state, u.coefficients(), &y_try, &mu_try);
                if r_try.merit() <= (1.0 - 2e-4 * alpha) * merit0 {
                    accepted = Some((y_try, mu_try, r_try, s_try));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((y_new, mu_new, r_new, s_new)) = accepted else {
                break;
            };
            y = y_new;
            mu = mu_new;
            res = r_new;
            slopes = s_new;
            stats.iterations += 1;
            stats.history.push((2.0 * res.merit()).sqrt());
            converged = res.max_norm() <= tol;
        }

        if !converged {
            log::debug!(
                "monolithic Newton stalled at step {} (residual {:e}); switching to reduced solve",
                state.n + 1,
                res.max_norm()
            );
            let (y_red, mu_red, res_red, iters) = self.reduced_solve(state, u.coefficients(), tol);
            stats.fallback = true;
            stats.iterations += iters;
            if res_red.max_norm() < res.max_norm() {
                y = y_red;
                mu = mu_red;
                res = res_red;
            }
            converged = res.max_norm() <= tol;
        }

        if !converged {
            return Err(StepError::InnerNonconvergence {
                iterations: stats.iterations,
                residual: res.max_norm(),
                best_y: y,
                best_mu: mu,
            });
        }
        stats.residual = res.max_norm();
        stats.guard_hits = res.guard_hits;
        Ok(State {
            n: state.n + 1,
            y: Field::synthesize(&self.b, y)?,
            mu: Field::synthesize(&self.a, mu)?,
            stats,
        })
    }

    /// Eliminates `μ` through the first equation and minimizes the resulting strictly
    /// convex energy in `y` by damped Newton.
    fn reduced_solve(
        &self,
        state: &State,
        u: &[f64],
        tol: f64,
    ) -> (Vec<f64>, Vec<f64>, Residual, usize) {
        let h = self.config.h();
        let lh = self.config.tau / h + self.potential.lipschitz_pi_prime();
        let y_old = state.y.coefficients();
        let mu_old = state.mu.coefficients();
        let mb = self.b.len();

        let mu_of = |y: &[f64]| -> Vec<f64> {
            let dy: Vec<f64> = y.iter().zip(y_old).map(|(a, b)| a - b).collect();
            let dy_a = self.b_to_a(&dy);
            (0..mu_old.len())
                .map(|i| (mu_old[i] - dy_a[i] / h) / self.a_diag[i])
                .collect()
        };
        let energy = |y: &[f64]| -> f64 {
            let dy: Vec<f64> = y.iter().zip(y_old).map(|(a, b)| a - b).collect();
            let dy_a = self.b_to_a(&dy);
            let field = Field::synthesize(&self.b, y.to_vec()).expect("length");
            let bulk = field.integrate_map(|s| self.view.envelope(s) + self.potential.pi_hat(s));
            let mut e = 0.5 * lh * dot(&dy, &dy) + bulk - dot(u, y);
            e += 0.5 * (0..mb).map(|i| self.b_diag[i] * y[i] * y[i]).sum::<f64>();
            let mu_b = self.a_to_b(
                &(0..mu_old.len())
                    .map(|i| mu_old[i] / self.a_diag[i])
                    .collect::<Vec<_>>(),
            );
            e -= dot(&mu_b, y);
            e += 0.5 / h
                * (0..dy_a.len())
                    .map(|i| dy_a[i] * dy_a[i] / self.a_diag[i])
                    .sum::<f64>();
            e
        };
        let a_inv_c = self.coupling.as_ref().map(|c| {
            let mut scaled = c.clone();
            for (i, d) in self.a_diag.iter().enumerate() {
                scaled.row_mut(i).scale_mut(1.0 / d);
            }
            c.tr_mul(&scaled)
        });

        let mut y = y_old.to_vec();
        let mut iters = 0;
        loop {
            let mu = mu_of(&y);
            let (res, slopes) = self.residual(state, u, &y, &mu);
            if res.max_norm() <= tol || iters >= self.config.fallback_max_iter {
                return (y, mu, res, iters);
            }
            let mut hess = self.weighted_gram(&slopes);
            for i in 0..mb {
                hess[(i, i)] += lh + self.b_diag[i];
            }
            match &a_inv_c {
                None => {
                    for i in 0..mb {
                        hess[(i, i)] += 1.0 / (h * self.a_diag[i]);
                    }
                }
                Some(m) => hess += m / h,
            }
            let grad = DVector::from_column_slice(&res.r2);
            let dir = match hess.clone().cholesky() {
                Some(ch) => -ch.solve(&grad),
                None => -grad.clone(),
            };
            let slope = grad.dot(&dir);
            let e0 = energy(&y);
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..50 {
                let y_try: Vec<f64> = (0..mb).map(|i| y[i] + alpha * dir[i]).collect();
                if energy(&y_try) <= e0 + 1e-4 * alpha * slope {
                    y = y_try;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            iters += 1;
            if !moved {
                // energy decrease is below rounding: take the full step and let the
                // residual test decide
                y = (0..mb).map(|i| y[i] + dir[i]).collect();
            }
        }
    }

    /// Full trajectory from `y0` with forcing samples `u⁰..u^N`.
    pub fn run(self: &Arc<Self>, y0: &Field, forcing: Vec<Field>) -> Result<Trajectory, RunError> {
        let at0 = |source| RunError { step: 0, source };
        let n_steps = self.config.steps;
        if forcing.len() != n_steps + 1 {
            return Err(at0(StepError::ForcingLength {
                expected: n_steps + 1,
                found: forcing.len(),
            }));
        }
        let first = self.initial_state(y0).map_err(at0)?;
        let m0 = first.y.mean();
        // a mean within rounding of the boundary counts as on it
        let delta0 = default_delta0(&self.potential, m0)
            .ok()
            .filter(|&d| d > 1e-12 * (1.0 + m0.abs()));
        if self.a.has_null_mode() && self.config.m0_guard && delta0.is_none() {
            return Err(at0(StepError::MeanOutsideDomain(m0)));
        }
        if let Some(bad) = first
            .y
            .values()
            .iter()
            .find(|&&s| !self.potential.beta_hat_rounded(s).is_finite())
        {
            return Err(at0(StepError::InitialData(format!(
                "convex part is infinite at grid value {bad}"
            ))));
        }

        let mut states = Vec::with_capacity(n_steps + 1);
        states.push(first);
        for n in 0..n_steps {
            let next = self.step(&states[n], &forcing[n + 1]).map_err(|source| RunError {
                step: n + 1,
                source,
            })?;
            if next.stats.guard_hits > 0 {
                log::warn!(
                    "step {}: {} grid values reached the log-well guard",
                    n + 1,
                    next.stats.guard_hits
                );
            }
            states.push(next);
        }
        Ok(Trajectory {
            scheme: Arc::clone(self),
            states,
            forcing,
            m0,
            delta0,
            regularity: None,
        })
    }

    /// Verifies the regularity hypothesis matching `τ` before running.
    pub fn check_regularity_init(
        &self,
        y0: &Field,
        forcing: &[Field],
        m0_bound: Option<f64>,
    ) -> Result<RegularityInit, StepError> {
        let y0 = y0.rebased(&self.b)?;
        let b2 = y0.apply_power(2.0 * self.config.sigma)?;
        if self.config.tau > 0.0 {
            let mut worst: f64 = 0.0;
            for &s in y0.values() {
                match self.potential.beta_min_section(s) {
                    Some(v) if v.is_finite() => worst = worst.max(v.abs()),
                    _ => {
                        return Err(StepError::RegularityInit(format!(
                            "minimal section undefined at grid value {s}"
                        )))
                    }
                }
            }
            Ok(RegularityInit::Viscous {
                b2sigma_norm: b2.norm(),
                beta_min_section_max: worst,
            })
        } else {
            let bound = m0_bound.ok_or_else(|| {
                StepError::RegularityInit("tau = 0 requires a bound M0".into())
            })?;
            let nl = y0.map_project(|s| self.view.yosida(s) + self.potential.pi(s));
            let base = &b2 + &nl;
            let mut max_norm: f64 = 0.0;
            for u in forcing {
                let mu0 = &base - &u.rebased(&self.b)?;
                max_norm = max_norm.max(mu0.rebased(&self.a)?.norm_primal(self.config.r));
            }
            if max_norm > bound {
                return Err(StepError::RegularityInit(format!(
                    "initial chemical potential norm {max_norm} exceeds M0 = {bound}"
                )));
            }
            Ok(RegularityInit::Nonviscous {
                m0_bound: bound,
                max_norm,
            })
        }
    }

    /// [`Scheme::run`] after certifying the regularity initialization.
    pub fn run_regular(
        self: &Arc<Self>,
        y0: &Field,
        forcing: Vec<Field>,
        m0_bound: Option<f64>,
    ) -> Result<Trajectory, RunError> {
        let init = self
            .check_regularity_init(y0, &forcing, m0_bound)
            .map_err(|source| RunError { step: 0, source })?;
        let mut traj = self.run(y0, forcing)?;
        traj.regularity = Some(init);
        Ok(traj)
    }

    /// `‖y¹ − y‖ + ‖μ¹‖` for one unforced step from `(y, 0)`; zero at discrete equilibria.
    pub fn stationarity_residual(&self, y: &Field) -> Result<f64, StepError> {
        let start = self.initial_state(y)?;
        let next = self.step(&start, &Field::zeros(&self.b))?;
        Ok((&next.y - &start.y).norm() + next.mu.norm())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
