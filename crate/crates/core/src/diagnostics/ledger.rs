//! Per-step evaluation of the terms in the stability and regularity estimates.

use rayon::prelude::*;
use serde::Serialize;

use super::{DiagnosticsError, InterpolantTriple};
use crate::potentials::mean_interior_constant;
use crate::spectra::{Field, NormKind};
use crate::stepper::{RegularityInit, Trajectory};

/// The terms on the left of the discrete energy inequality at one index `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyTerms {
    /// `(h/2)‖μᵏ‖²`
    pub mu_sq: f64,
    /// `Σ (h/2)‖μⁿ⁺¹ − μⁿ‖²`
    pub mu_increments: f64,
    /// `Σ h‖A^rμⁿ⁺¹‖²`
    pub dissipation: f64,
    /// `τ Σ h‖(yⁿ⁺¹ − yⁿ)/h‖²`
    pub viscous: f64,
    /// `½‖B^σyᵏ‖²`
    pub bsigma_sq: f64,
    /// `Σ ½‖B^σ(yⁿ⁺¹ − yⁿ)‖²`
    pub bsigma_increments: f64,
    /// `(L'_π/2) Σ ‖yⁿ⁺¹ − yⁿ‖²`
    pub increments: f64,
    /// `∫(β̂_λ + π̂)(yᵏ)`
    pub potential: f64,
}

impl EnergyTerms {
    fn total(&self) -> f64 {
        self.mu_sq
            + self.mu_increments
            + self.dissipation
            + self.viscous
            + self.bsigma_sq
            + self.bsigma_increments
            + self.increments
            + self.potential
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub k: usize,
    pub terms: EnergyTerms,
    /// `(uᵏ, yᵏ) − (u¹, y₀) − Σ_{n=1}^{k−1} (uⁿ⁺¹ − uⁿ, yⁿ)`
    pub forcing_work: f64,
    pub lhs: f64,
    /// Initial energy plus forcing work.
    pub rhs: f64,
    pub slack: f64,
}

/// How an aggregate is expected to behave under `h → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// Converges to a nonzero limit.
    Bounded,
    /// Bounded and tends to zero with `h`.
    Vanishing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub name: &'static str,
    pub group: &'static str,
    pub scaling: Scaling,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataNorms {
    /// `½‖B^σy₀‖² + ∫(β̂ + π̂)(y₀)`
    pub initial_energy: f64,
    pub y0_vb: f64,
    pub u_linf_h: f64,
    pub u_h1_h: f64,
    pub u_l2_h: f64,
}

impl DataNorms {
    /// `1 + |initial energy| + ‖u‖_{L∞(H)} + ‖u‖_{H¹(H)}`.
    pub fn scale(&self) -> f64 {
        1.0 + self.initial_energy.abs() + self.u_linf_h + self.u_h1_h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateLedger {
    pub rows: Vec<EnergyRow>,
    pub tol_accum: f64,
    pub min_slack: f64,
    pub aggregates: Vec<Aggregate>,
    pub data: DataNorms,
    /// Sum of the terms bounded by `K₁`.
    pub k1_hat: f64,
    /// Sum of the regularity terms bounded by `K₃`, once filled.
    pub k3_hat: Option<f64>,
    /// Set by the continuous-dependence experiment.
    pub k2_hat: Option<f64>,
    /// Max over steps of `lhs_k / data scale`.
    pub energy_ratio: f64,
    /// Max distance of grid values of `yⁿ` from the closure of `D(β)`.
    pub overshoot: f64,
    pub guard_hits: usize,
    pub m0: f64,
    pub delta0: Option<f64>,
    /// Mean-interior constant `C₀` for `(m₀, δ₀)` at the run's Yosida level.
    pub c0: Option<f64>,
    pub regularity: Option<RegularityInit>,
}

impl EstimateLedger {
    pub fn energy_holds(&self) -> bool {
        self.min_slack >= -self.tol_accum
    }

    pub fn aggregate(&self, name: &str) -> Option<f64> {
        self.aggregates.iter().find(|a| a.name == name).map(|a| a.value)
    }
}

struct StepScalars {
    mu_sq: f64,
    ar_mu_sq: f64,
    bs_y_sq: f64,
    potential: f64,
    potential_abs: f64,
    beta_hat_l1: f64,
    beta_l1: f64,
    mean_mu: f64,
    overshoot: f64,
}

/// Every term of the energy inequality at each `k`, and the interpolant norms of the a
/// priori estimates.
pub fn apriori_ledger(traj: &Trajectory) -> Result<EstimateLedger, DiagnosticsError> {
    let scheme = &traj.scheme;
    let config = scheme.config();
    let (a, b) = (scheme.a(), scheme.b());
    let (r, sigma, tau, h) = (config.r, config.sigma, config.tau, config.h());
    let potential = scheme.potential();
    let view = scheme.yosida();
    let lp = potential.lipschitz_pi_prime();
    let dom = potential.beta_domain();
    let n_steps = traj.states.len() - 1;

    let scalars: Vec<StepScalars> = traj
        .states
        .par_iter()
        .map(|st| {
            let y = &st.y;
            StepScalars {
                mu_sq: st.mu.norm().powi(2),
                ar_mu_sq: st.mu.power_norm(r).powi(2),
                bs_y_sq: y.power_norm(sigma).powi(2),
                potential: y.integrate_map(|s| view.envelope(s) + potential.pi_hat(s)),
                potential_abs: y.integrate_map(|s| (view.envelope(s) + potential.pi_hat(s)).abs()),
                beta_hat_l1: y.integrate_map(|s| view.envelope(s)),
                beta_l1: y.integrate_map(|s| view.yosida(s).abs()),
                mean_mu: st.mu.mean(),
                overshoot: y
                    .values()
                    .iter()
                    .map(|&s| (dom.lo - s).max(s - dom.hi).max(0.0))
                    .fold(0.0, f64::max),
            }
        })
        .collect();

    let forcing: Vec<Field> = traj
        .forcing
        .iter()
        .map(|u| u.rebased(b))
        .collect::<Result<_, _>>()?;
    let ys: Vec<Field> = traj.states.iter().map(|s| s.y.clone()).collect();
    let mus: Vec<Field> = traj.states.iter().map(|s| s.mu.clone()).collect();
    let y_in_a: Vec<Field> = ys.iter().map(|y| y.rebased(a)).collect::<Result<_, _>>()?;

    let y_h = InterpolantTriple::from_fields(&ys, NormKind::H, h)?;
    let y_bs = InterpolantTriple::from_fields(&ys, NormKind::Power(sigma), h)?;
    let y_vb = InterpolantTriple::from_fields(&ys, NormKind::Graph(sigma), h)?;
    let y_dual = InterpolantTriple::from_fields(&y_in_a, NormKind::Dual(r), h)?;
    let mu_h = InterpolantTriple::from_fields(&mus, NormKind::H, h)?;
    let mu_ar = InterpolantTriple::from_fields(&mus, NormKind::Power(r), h)?;
    let mu_va = InterpolantTriple::from_fields(&mus, NormKind::Primal(r), h)?;
    let u_h = InterpolantTriple::from_fields(&forcing, NormKind::H, h)?;

    let y0 = &ys[0];
    let initial_energy = 0.5 * scalars[0].bs_y_sq
        + y0.integrate_map(|s| potential.beta_hat_rounded(s) + potential.pi_hat(s));
    let data = DataNorms {
        initial_energy,
        y0_vb: y0.graph_norm(sigma),
        u_linf_h: (0..forcing.len()).map(|n| u_h.node_norm(n)).fold(0.0, f64::max),
        u_h1_h: (u_h.bar_l2_sq() + u_h.dt_l2_sq()).sqrt(),
        u_l2_h: u_h.bar_l2(),
    };

    let coef_dot = |f: &Field, g: &Field| -> f64 {
        f.coefficients()
            .iter()
            .zip(g.coefficients())
            .map(|(x, y)| x * y)
            .sum()
    };

    let mut rows = Vec::with_capacity(n_steps + 1);
    let mut acc = EnergyTerms {
        mu_sq: 0.0,
        mu_increments: 0.0,
        dissipation: 0.0,
        viscous: 0.0,
        bsigma_sq: 0.0,
        bsigma_increments: 0.0,
        increments: 0.0,
        potential: 0.0,
    };
    let mut by_parts_tail = 0.0;
    let mut min_slack = f64::INFINITY;
    let mut energy_ratio: f64 = 0.0;
    for k in 0..=n_steps {
        if k > 0 {
            let n = k - 1;
            let dy_sq = y_h.increment_norm(n).powi(2);
            acc.mu_increments += 0.5 * h * mu_h.increment_norm(n).powi(2);
            acc.dissipation += h * scalars[k].ar_mu_sq;
            acc.viscous += tau * dy_sq / h;
            acc.bsigma_increments += 0.5 * y_bs.increment_norm(n).powi(2);
            acc.increments += 0.5 * lp * dy_sq;
            if k >= 2 {
                by_parts_tail += coef_dot(&(&forcing[k - 1] - &forcing[k - 2]), &ys[k - 1]);
            }
        }
        let terms = EnergyTerms {
            mu_sq: 0.5 * h * scalars[k].mu_sq,
            bsigma_sq: 0.5 * scalars[k].bs_y_sq,
            potential: scalars[k].potential,
            ..acc.clone()
        };
        let forcing_work = if k == 0 {
            0.0
        } else {
            coef_dot(&forcing[k], &ys[k]) - coef_dot(&forcing[1], y0) - by_parts_tail
        };
        let lhs = terms.total();
        let rhs = initial_energy + forcing_work;
        min_slack = min_slack.min(rhs - lhs);
        energy_ratio = energy_ratio.max(lhs / data.scale());
        rows.push(EnergyRow {
            k,
            terms,
            forcing_work,
            lhs,
            rhs,
            slack: rhs - lhs,
        });
    }

    let worst_residual = traj
        .states
        .iter()
        .map(|s| s.stats.residual)
        .fold(config.inner_tol_abs, f64::max);
    let state_scale = 1.0
        + data.scale()
        + (0..=n_steps)
            .map(|n| y_h.node_norm(n) + mu_h.node_norm(n))
            .fold(0.0, f64::max);
    let tol_accum = n_steps.max(1) as f64 * worst_residual * state_scale;

    let beta_l1: Vec<f64> = scalars.iter().map(|s| s.beta_l1).collect();
    let beta_l1_t = InterpolantTriple::scalar(&beta_l1, h)?;
    let mean_mu: Vec<f64> = scalars.iter().map(|s| s.mean_mu).collect();
    let mean_mu_t = InterpolantTriple::scalar(&mean_mu, h)?;
    let potential_linf_l1 = scalars[1..]
        .iter()
        .map(|s| s.potential_abs)
        .fold(0.0, f64::max);
    let beta_hat_l1_q = h * scalars[1..].iter().map(|s| s.beta_hat_l1).sum::<f64>();

    use Scaling::{Bounded, Vanishing};
    let agg = |name, group, scaling, value| Aggregate {
        name,
        group,
        scaling,
        value,
    };
    let sqrt_tau = tau.sqrt();
    let aggregates = vec![
        agg("mu_bar_minus_under_l2_h", "first", Vanishing, (h * mu_h.increments_sq()).sqrt()),
        agg("ar_mu_bar_l2_h", "first", Bounded, mu_ar.bar_l2()),
        agg("ar_mu_under_l2_h", "first", Bounded, mu_ar.under_l2()),
        agg("y_under_linf_vb", "first", Bounded, y_vb.under_linf()),
        agg("y_bar_linf_vb", "first", Bounded, y_vb.bar_linf()),
        agg("y_hat_linf_vb", "first", Bounded, y_vb.hat_linf()),
        agg("tau_dt_y_l2_h", "first", Bounded, sqrt_tau * y_h.dt_l2()),
        agg("potential_linf_l1", "first", Bounded, potential_linf_l1),
        agg("bsigma_y_jump_l2_scaled", "first", Vanishing, y_bs.increments_sq().sqrt()),
        agg("y_jump_l2_scaled", "first", Vanishing, y_h.increments_sq().sqrt()),
        agg("dt_y_l2_va_dual", "second", Bounded, y_dual.dt_l2()),
        agg("mu_bar_l2_va", "third", Bounded, mu_va.bar_l2()),
        agg("mu_under_l2_va", "third", Bounded, mu_va.under_l2()),
        agg("beta_l2_l1", "third", Bounded, beta_l1_t.bar_l2()),
        agg("mean_mu_l2", "third", Bounded, mean_mu_t.bar_l2()),
    ];
    let k1_hat = (y_dual.hat_l2_sq() + y_dual.dt_l2_sq()).sqrt()
        + y_vb.bar_linf()
        + mu_va.bar_l2()
        + beta_hat_l1_q
        + sqrt_tau * y_h.dt_l2();

    let c0 = traj.delta0.and_then(|d| {
        mean_interior_constant(potential, traj.m0, d, &[config.lambda]).ok()
    });

    let ledger = EstimateLedger {
        rows,
        tol_accum,
        min_slack,
        aggregates,
        data,
        k1_hat,
        k3_hat: None,
        k2_hat: None,
        energy_ratio,
        overshoot: scalars.iter().map(|s| s.overshoot).fold(0.0, f64::max),
        guard_hits: traj.states.iter().map(|s| s.stats.guard_hits).sum(),
        m0: traj.m0,
        delta0: traj.delta0,
        c0,
        regularity: traj.regularity.clone(),
    };
    ensure_finite(&ledger)?;
    Ok(ledger)
}

/// Adds the regularity-estimate terms to a ledger built from the same trajectory.
pub fn regularity_ledger(
    traj: &Trajectory,
    ledger: &mut EstimateLedger,
) -> Result<(), DiagnosticsError> {
    if traj.regularity.is_none() {
        return Err(DiagnosticsError::PreconditionUnverified(
            "trajectory was not started under a certified regularity initialization".into(),
        ));
    }
    let scheme = &traj.scheme;
    let config = scheme.config();
    let (r, sigma, h) = (config.r, config.sigma, config.h());
    let sqrt_tau = config.tau.sqrt();
    let ys: Vec<Field> = traj.states.iter().map(|s| s.y.clone()).collect();
    let mus: Vec<Field> = traj.states.iter().map(|s| s.mu.clone()).collect();
    let y_in_a: Vec<Field> = ys
        .iter()
        .map(|y| y.rebased(scheme.a()))
        .collect::<Result<_, _>>()?;

    let y_h = InterpolantTriple::from_fields(&ys, NormKind::H, h)?;
    let y_bs = InterpolantTriple::from_fields(&ys, NormKind::Power(sigma), h)?;
    let y_vb = InterpolantTriple::from_fields(&ys, NormKind::Graph(sigma), h)?;
    let y_dual = InterpolantTriple::from_fields(&y_in_a, NormKind::Dual(r), h)?;
    let mu_h = InterpolantTriple::from_fields(&mus, NormKind::H, h)?;
    let mu_ar = InterpolantTriple::from_fields(&mus, NormKind::Power(r), h)?;
    let mu_va = InterpolantTriple::from_fields(&mus, NormKind::Primal(r), h)?;
    let mu_va2 = InterpolantTriple::from_fields(&mus, NormKind::Primal(2.0 * r), h)?;

    use Scaling::Bounded;
    let agg = |name, value| Aggregate {
        name,
        group: "regularity",
        scaling: Bounded,
        value,
    };
    let extra = vec![
        agg("ar_mu_bar_linf_h", mu_ar.bar_linf()),
        agg("bsigma_dt_y_l2_h", y_bs.dt_l2()),
        agg("tau_dt_y_linf_h", sqrt_tau * y_h.dt_linf()),
        agg("mu_bar_linf_h", mu_h.bar_linf()),
        agg("dt_y_linf_va_dual", y_dual.dt_linf()),
        agg("dt_y_l2_vb", y_vb.dt_l2()),
        agg("mu_bar_linf_va", mu_va.bar_linf()),
        agg("tau_mu_bar_linf_va2r", sqrt_tau * mu_va2.bar_linf()),
    ];
    let k3: f64 = ["dt_y_linf_va_dual", "dt_y_l2_vb", "mu_bar_linf_va", "tau_dt_y_linf_h", "tau_mu_bar_linf_va2r"]
        .iter()
        .map(|n| extra.iter().find(|a| a.name == *n).map_or(0.0, |a| a.value))
        .sum();
    ledger.aggregates.retain(|a| a.group != "regularity");
    ledger.aggregates.extend(extra);
    ledger.k3_hat = Some(k3);
    ensure_finite(ledger)
}

fn ensure_finite(ledger: &EstimateLedger) -> Result<(), DiagnosticsError> {
    for a in &ledger.aggregates {
        if !a.value.is_finite() {
            return Err(DiagnosticsError::NonFinite(a.name.to_string()));
        }
    }
    for row in &ledger.rows {
        if !(row.lhs.is_finite() && row.rhs.is_finite()) {
            return Err(DiagnosticsError::NonFinite(format!("energy row {}", row.k)));
        }
    }
    if !ledger.k1_hat.is_finite() {
        return Err(DiagnosticsError::NonFinite("k1_hat".into()));
    }
    Ok(())
}

/// Behavior of one aggregate across a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variation {
    pub name: &'static str,
    pub scaling: Scaling,
    pub values: Vec<f64>,
    /// `(max − min)/max` for bounded terms, `max/first − 1` for vanishing ones.
    pub metric: f64,
    pub pass: bool,
}

/// Compares every aggregate across ledgers ordered from coarsest to finest.
///
/// Bounded terms pass when `(max − min)/max ≤ threshold`. Vanishing terms pass when no
/// level exceeds the coarsest by more than `threshold` relative.
pub fn sweep_variation(ledgers: &[EstimateLedger], threshold: f64) -> Vec<Variation> {
    let Some(first) = ledgers.first() else {
        return Vec::new();
    };
    first
        .aggregates
        .iter()
        .map(|agg| {
            let values: Vec<f64> = ledgers
                .iter()
                .map(|l| l.aggregate(agg.name).unwrap_or(f64::NAN))
                .collect();
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let metric = match agg.scaling {
                _ if max == 0.0 && min == 0.0 => 0.0,
                Scaling::Bounded => (max - min) / max.abs(),
                Scaling::Vanishing => max / values[0] - 1.0,
            };
            Variation {
                name: agg.name,
                scaling: agg.scaling,
                pass: metric <= threshold,
                metric,
                values,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;
    use std::sync::Arc;

    use super::*;
    use crate::potentials::Potential;
    use crate::spectra::{BoundaryCondition, SpectralBasis};
    use crate::stepper::{sample_forcing, Scheme, SchemeConfig};

    fn scheme(potential: Potential, tau: f64, steps: usize) -> Arc<Scheme> {
        let a = Arc::new(SpectralBasis::laplacian(&[PI], BoundaryCondition::Neumann, 16, 1).unwrap());
        let config = SchemeConfig {
            tau,
            steps,
            final_time: 0.5,
            ..SchemeConfig::default()
        };
        Arc::new(Scheme::new(a.clone(), a, potential, config).unwrap())
    }

    #[test]
    fn zero_trajectory() {
        let s = scheme(Potential::regular(), 0.0, 8);
        let forcing = sample_forcing(|_| Field::zeros(s.b()), 8, s.config().h());
        let traj = s.run(&Field::zeros(s.b()), forcing).unwrap();
        let ledger = apriori_ledger(&traj).unwrap();
        // π̂(0) = 1/4 on a domain of length π
        let pi_hat0 = 0.25 * PI;
        for row in &ledger.rows {
            assert!((row.terms.potential - pi_hat0).abs() < 1e-13);
            assert_eq!(row.terms.dissipation, 0.0);
            assert_eq!(row.terms.bsigma_sq, 0.0);
            assert!(row.slack.abs() < 1e-13);
        }
        for agg in &ledger.aggregates {
            if agg.name != "potential_linf_l1" {
                assert_eq!(agg.value, 0.0, "{}", agg.name);
            }
        }
    }

    #[test]
    fn unforced_energy_decreases() {
        for potential in [Potential::regular(), Potential::logarithmic(1.2).unwrap()] {
            for tau in [0.0, 1.0] {
                let s = scheme(potential.clone(), tau, 16);
                let y0 = Field::from_fn(s.b(), |x| 0.1 + 0.5 * x[0].cos() - 0.2 * (2.0 * x[0]).cos());
                let forcing = sample_forcing(|_| Field::zeros(s.b()), 16, s.config().h());
                let traj = s.run(&y0, forcing).unwrap();
                let ledger = apriori_ledger(&traj).unwrap();
                assert!(ledger.energy_holds(), "slack {}", ledger.min_slack);
                assert!(ledger.rows.iter().all(|r| r.forcing_work == 0.0));
            }
        }
    }

    #[test]
    fn forcing_work_matches_direct_sum() {
        let s = scheme(Potential::regular(), 0.5, 10);
        let y0 = Field::from_fn(s.b(), |x| 0.3 * x[0].cos());
        let e3 = Field::mode(s.b(), 2);
        let forcing = sample_forcing(|t| e3.scaled(1.0 + t), 10, s.config().h());
        let traj = s.run(&y0, forcing).unwrap();
        let ledger = apriori_ledger(&traj).unwrap();
        let mut direct = 0.0;
        for (k, row) in ledger.rows.iter().enumerate().skip(1) {
            let dy = &traj.states[k].y - &traj.states[k - 1].y;
            direct += traj.forcing[k].inner(&dy).unwrap();
            assert!((row.forcing_work - direct).abs() < 1e-13);
        }
        assert!(ledger.energy_holds());
    }

    #[test]
    fn regularity_needs_certified_start() {
        let s = scheme(Potential::regular(), 1.0, 8);
        let y0 = Field::from_fn(s.b(), |x| 0.3 * x[0].cos());
        let forcing = sample_forcing(|_| Field::zeros(s.b()), 8, s.config().h());
        let traj = s.run(&y0, forcing.clone()).unwrap();
        let mut ledger = apriori_ledger(&traj).unwrap();
        assert!(matches!(
            regularity_ledger(&traj, &mut ledger),
            Err(DiagnosticsError::PreconditionUnverified(_))
        ));
        let traj = s.run_regular(&y0, forcing, None).unwrap();
        let mut ledger = apriori_ledger(&traj).unwrap();
        regularity_ledger(&traj, &mut ledger).unwrap();
        assert!(ledger.k3_hat.unwrap() > 0.0);
    }

    #[test]
    fn nonviscous_regularity_has_zero_tau_terms() {
        let s = scheme(Potential::regular(), 0.0, 8);
        let y0 = Field::from_fn(s.b(), |x| 0.3 * x[0].cos());
        let forcing = sample_forcing(|_| Field::zeros(s.b()), 8, s.config().h());
        let traj = s.run_regular(&y0, forcing, Some(10.0)).unwrap();
        let mut ledger = apriori_ledger(&traj).unwrap();
        regularity_ledger(&traj, &mut ledger).unwrap();
        assert_eq!(ledger.aggregate("tau_dt_y_linf_h"), Some(0.0));
        assert_eq!(ledger.aggregate("tau_mu_bar_linf_va2r"), Some(0.0));
        assert_eq!(ledger.aggregate("tau_dt_y_l2_h"), Some(0.0));
    }

    #[test]
    fn variation_metrics() {
        let s = scheme(Potential::regular(), 0.0, 4);
        let forcing = sample_forcing(|_| Field::zeros(s.b()), 4, s.config().h());
        let traj = s.run(&Field::zeros(s.b()), forcing).unwrap();
        let base = apriori_ledger(&traj).unwrap();
        let mut other = base.clone();
        for a in &mut other.aggregates {
            a.value *= 1.1;
        }
        let rows = sweep_variation(&[base, other], 0.2);
        assert!(rows.iter().all(|v| v.pass));
        let row = rows.iter().find(|v| v.name == "potential_linf_l1").unwrap();
        assert!((row.metric - 0.1 / 1.1).abs() < 1e-12);
    }
}
