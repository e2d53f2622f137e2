//! Invariant suites over every module, shared by the `check` command and the acceptance
//! harness.
//!
//! Each suite is deterministic given its seed and reports the number of cases, the number
//! of failures, the largest defect and the first counterexample. A case passes when its
//! defect is at most the suite tolerance; defects of inequalities are their violations.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::{
    apriori_ledger, compare_trajectories, elementary_identity, gronwall_check,
    regularity_ledger, self_cauchy, summation_by_parts_check, summation_by_parts_scale,
    sweep_variation, young_gap, InterpolantTriple,
};
use crate::oracle::{dense_step_solve, dual_norm_by_maximization};
use crate::potentials::{mean_interior_constant, Potential, YosidaView};
use crate::spectra::{compactness_split, BoundaryCondition, DualElement, Field, SpectralBasis};
use crate::stepper::{sample_forcing, InnerStats, Scheme, SchemeConfig, State, Trajectory};

pub const IDENTITY_TOL: f64 = 1e-11;
pub const INEQUALITY_TOL: f64 = 1e-12;
pub const MASS_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-8;
pub const YOSIDA_LAMBDAS: [f64; 3] = [0.1, 0.05, 0.025];

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{suite}: {message}")]
pub struct CheckError {
    pub suite: String,
    pub message: String,
}

fn fail(suite: &str) -> impl Fn(String) -> CheckError + '_ {
    move |message| CheckError {
        suite: suite.to_string(),
        message,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub max_defect: f64,
    pub tolerance: f64,
    pub counterexample: Option<String>,
    /// Named sequences produced by experiment suites.
    pub series: BTreeMap<String, Vec<f64>>,
}

impl SuiteReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        SuiteReport {
            name: name.into(),
            cases: 0,
            failures: 0,
            max_defect: 0.0,
            tolerance,
            counterexample: None,
            series: BTreeMap::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.cases > 0 && self.failures == 0
    }

    /// Records one case; NaN defects count as failures.
    pub fn record(&mut self, defect: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        let defect = if defect.is_nan() { f64::INFINITY } else { defect };
        self.max_defect = self.max_defect.max(defect);
        if defect > self.tolerance {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }

    fn series(&mut self, name: &str, values: Vec<f64>) {
        self.series.insert(name.to_string(), values);
    }
}

fn violation(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).max(0.0) / rhs.abs().max(lhs.abs()).max(f64::MIN_POSITIVE)
}

fn rel_gap(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Small bases covering both boundary conditions in one and two dimensions.
pub fn sample_bases() -> Vec<Arc<SpectralBasis>> {
    let mk = |lengths: &[f64], bc, m| Arc::new(SpectralBasis::laplacian(lengths, bc, m, 1).expect("valid basis"));
    vec![
        mk(&[PI], BoundaryCondition::Neumann, 12),
        mk(&[1.7], BoundaryCondition::Dirichlet, 12),
        mk(&[PI, 2.0], BoundaryCondition::Neumann, 6),
        mk(&[1.0, 1.5], BoundaryCondition::Dirichlet, 6),
    ]
}

/// Random coefficients with algebraic decay, an overall scale in `[10⁻³, 10³]` and a
/// random sparsity pattern.
pub fn random_field(basis: &Arc<SpectralBasis>, rng: &mut ChaCha8Rng) -> Field {
    let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
    let density: f64 = rng.gen_range(0.3..1.0);
    let coeffs = (0..basis.len())
        .map(|j| {
            if j > 0 && rng.gen::<f64>() > density {
                0.0
            } else {
                scale * rng.gen_range(-1.0..1.0) / (1.0 + j as f64)
            }
        })
        .collect();
    Field::synthesize(basis, coeffs).expect("matching size")
}

/// Both sides of every interpolant identity and inequality on random tuples.
pub fn interpolant_identities(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("interpolant_identities", IDENTITY_TOL);
    for case in 0..cases {
        let n = rng.gen_range(1..=12);
        let dim = rng.gen_range(1..=4);
        let h = rng.gen_range(0.01..1.0);
        let weights: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..2.0)).collect();
        let values: Vec<Vec<f64>> = (0..=n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let triple = InterpolantTriple::new(values, weights, h).expect("valid tuple");
        for check in triple.report().checks {
            rep.record(check.defect(), || {
                format!("case {case} (N={n}, h={h}): {} lhs={} rhs={}", check.name, check.lhs, check.rhs)
            });
        }
    }
    rep
}

pub fn summation_by_parts(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("summation_by_parts", IDENTITY_TOL);
    for case in 0..cases {
        let k = rng.gen_range(1..=20);
        let a: Vec<f64> = (0..k).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let b: Vec<f64> = (0..=k).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let (lhs, rhs) = summation_by_parts_check(&a, &b).expect("matching lengths");
        let scale = summation_by_parts_scale(&a, &b);
        rep.record(rel_gap(lhs, rhs, scale), || format!("case {case} (k={k}): lhs={lhs} rhs={rhs}"));
    }
    rep
}

pub fn elementary_identity_suite(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("elementary_identity", IDENTITY_TOL);
    for _ in 0..cases {
        let a = rng.gen_range(-1e3..1e3);
        let b = rng.gen_range(-1e3..1e3);
        let (lhs, rhs) = elementary_identity(a, b);
        rep.record(rel_gap(lhs, rhs, a * a + b * b), || format!("a={a} b={b}: lhs={lhs} rhs={rhs}"));
    }
    rep
}

pub fn young_inequality(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("young_inequality", INEQUALITY_TOL);
    for _ in 0..cases {
        let a = rng.gen_range(0.0..1e3);
        let b = rng.gen_range(0.0..1e3);
        let d = 10f64.powf(rng.gen_range(-3.0..3.0));
        let gap = young_gap(a, b, d);
        let scale = d * a * a + b * b / (4.0 * d);
        rep.record((-gap).max(0.0) / scale.max(f64::MIN_POSITIVE), || {
            format!("a={a} b={b} delta={d}: gap={gap}")
        });
    }
    rep
}

/// Sequences meeting the Gronwall hypothesis with equality must satisfy the conclusion.
pub fn gronwall_suite(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("discrete_gronwall", IDENTITY_TOL);
    for case in 0..cases {
        let n = rng.gen_range(1..=30);
        let m = rng.gen_range(0.0..5.0);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.5)).collect();
        let mut a = Vec::with_capacity(n + 1);
        let mut running = m;
        for k in 0..=n {
            a.push(running);
            if k < n {
                running += b[k] * running;
            }
        }
        let check = gronwall_check(m, &a, &b).expect("admissible sequence");
        let scale = a.iter().cloned().fold(1.0, f64::max);
        let defect = if check.hypothesis {
            (-check.min_margin).max(0.0) / scale
        } else {
            f64::INFINITY
        };
        rep.record(defect, || format!("case {case}: M={m}, margin={}", check.min_margin));
    }
    rep
}

/// `(A^r A₀^{-2r} f, A^r v) = ⟨f, v⟩` for random dual elements and fields.
pub fn riesz_identity(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = sample_bases();
    let mut rep = SuiteReport::new("riesz_identity", IDENTITY_TOL);
    for case in 0..cases {
        let basis = &bases[case % bases.len()];
        let r = rng.gen_range(0.2..1.2);
        let mut pairings: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if basis.has_null_mode() {
            pairings[0] = 0.0;
        }
        let f = DualElement::new(basis, pairings).expect("matching size");
        let v = random_field(basis, &mut rng);
        let u = f.riesz_solve(r).expect("mean-free element");
        let lhs = u
            .apply_power(r)
            .and_then(|x| x.inner(&v.apply_power(r)?))
            .expect("same basis");
        let rhs = f.pair(&v).expect("same basis");
        let scale = f.norm_dual(r) * v.norm_primal(r);
        rep.record(rel_gap(lhs, rhs, scale), || format!("case {case} (r={r}): lhs={lhs} rhs={rhs}"));
    }
    rep
}

/// Series representation of the dual norm against the maximization oracle, and the
/// embedding of `H` into the dual.
pub fn dual_norm_representation(seed: u64, cases: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = sample_bases();
    let mut rep = SuiteReport::new("dual_norm_representation", IDENTITY_TOL);
    for case in 0..cases {
        let basis = &bases[case % bases.len()];
        let r = rng.gen_range(0.2..1.2);
        let v = random_field(basis, &mut rng);
        let f = v.extend_power_to_dual(rng.gen_range(0.1..0.6));
        let series = f.norm_dual(r);
        let oracle = dual_norm_by_maximization(basis, r, &f).expect("small basis");
        rep.record(rel_gap(series, oracle, series.max(oracle)), || {
            format!("case {case} (r={r}): series={series} maximizer={oracle}")
        });
        let embedded = v.to_dual().norm_dual(r);
        let direct = v.norm_dual(r);
        rep.record(rel_gap(embedded, direct, direct), || {
            format!("case {case} (r={r}): embedded={embedded} direct={direct}")
        });
    }
    rep
}

/// Norm equivalence, the Poincaré bound, interpolation and the compactness inequality on
/// random fields for every `(r, η)` pair.
pub fn norm_equivalence(seed: u64, fields: usize, exponents: &[f64]) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = sample_bases();
    let mut rep = SuiteReport::new("norm_equivalence_interpolation", INEQUALITY_TOL);
    for case in 0..fields {
        let basis = &bases[case % bases.len()];
        let v = random_field(basis, &mut rng);
        let lam = basis.eigenvalues();
        for &r in exponents {
            let primal = v.norm_primal(r);
            let graph = v.graph_norm(r);
            let smallest = if basis.has_null_mode() { lam[1] } else { lam[0] };
            let c = (1.0 + smallest.powf(-2.0 * r)).sqrt();
            rep.record(violation(primal, graph), || format!("field {case}, r={r}: primal {primal} > graph {graph}"));
            rep.record(violation(graph, c * primal), || {
                format!("field {case}, r={r}: graph {graph} > {c}·primal {primal}")
            });
            if basis.has_null_mode() {
                let ratio = basis.poincare_ratio(r).expect("null mode present");
                let c1 = v.coefficients()[0];
                let osc = (v.norm().powi(2) - c1 * c1).max(0.0).sqrt();
                let ar = v.power_norm(r);
                rep.record(violation(osc, ratio * ar), || {
                    format!("field {case}, r={r}: Poincaré {osc} > {ratio}·{ar}")
                });
            }
            for &eta in exponents {
                let gap = v.interpolation_gap(r, eta);
                rep.record(violation(gap.lhs, gap.rhs), || {
                    format!("field {case}, r={r}, eta={eta}: interpolation {} > {}", gap.lhs, gap.rhs)
                });
                let delta = 10f64.powf(rng.gen_range(-2.0..1.0));
                let split = compactness_split(basis, basis, r, eta, delta, &v).expect("same basis");
                rep.record(violation(split.lhs, split.rhs), || {
                    format!("field {case}, r={r}, sigma={eta}, delta={delta}: compactness {} > {}", split.lhs, split.rhs)
                });
            }
        }
    }
    rep
}

fn resolvent_residual(view: &YosidaView, s: f64) -> f64 {
    let p = view.potential();
    let j = view.resolvent(s);
    let lambda = view.lambda();
    let dom = p.beta_domain();
    let defect = if dom.interior_contains(j) {
        let b = p.beta_min_section(j).unwrap_or(f64::NAN);
        (j + lambda * b - s).abs()
    } else if j == dom.lo || j == dom.hi {
        // at an endpoint the normal cone points outward: s − J has the sign of J
        (-(s - j) * j.signum()).max(0.0)
    } else {
        f64::INFINITY
    };
    defect / (1.0 + s.abs())
}

/// Sample window for a well: the effective domain widened by `5 max λ` when bounded.
fn yosida_window(p: &Potential) -> (f64, f64) {
    let dom = p.beta_domain();
    let pad = 5.0 * YOSIDA_LAMBDAS[0];
    if dom.lo.is_finite() && dom.hi.is_finite() {
        (dom.lo - pad, dom.hi + pad)
    } else {
        (-3.0, 3.0)
    }
}

/// Moreau–Yosida facts on `points` samples per well and the mean-interior certificate at
/// `(m₀, δ₀) = (0, 1/2)`.
pub fn yosida_suite(name: &str, potential: &Potential, seed: u64, points: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new(format!("yosida_{name}"), INEQUALITY_TOL);
    let views: Vec<YosidaView> = YOSIDA_LAMBDAS
        .iter()
        .map(|&l| potential.yosida(l).expect("positive lambda"))
        .collect();
    let (lo, hi) = yosida_window(potential);
    let dom = potential.beta_domain();
    let mut samples: Vec<f64> = (0..points).map(|_| rng.gen_range(lo..hi)).collect();
    samples.extend([lo, hi, 0.0]);
    if dom.lo.is_finite() {
        samples.extend([dom.lo, dom.hi]);
    }
    for &s in &samples {
        let beta_hat = potential.beta_hat(s);
        let min_section = potential.beta_min_section(s);
        let mut envelopes = Vec::with_capacity(views.len());
        for view in &views {
            let lambda = view.lambda();
            let env = view.envelope(s);
            envelopes.push(env);
            rep.record((-env).max(0.0) / (1.0 + env.abs()), || format!("lambda={lambda}, s={s}: envelope {env} < 0"));
            if beta_hat.is_finite() {
                rep.record((env - beta_hat).max(0.0) / (1.0 + beta_hat.abs()), || {
                    format!("lambda={lambda}, s={s}: envelope {env} > {beta_hat}")
                });
            }
            let b = view.yosida(s);
            if let Some(b0) = min_section {
                rep.record((b.abs() - b0.abs()).max(0.0) / (1.0 + b0.abs()), || {
                    format!("lambda={lambda}, s={s}: |beta_lambda| = {} > |beta°| = {}", b.abs(), b0.abs())
                });
            }
            let t = rng.gen_range(lo..hi);
            let bound = (s - t).abs() / lambda;
            let db = (b - view.yosida(t)).abs();
            rep.record((db - bound).max(0.0) / (1.0 + bound), || {
                format!("lambda={lambda}, s={s}, t={t}: {db} > |s−t|/lambda = {bound}")
            });
        }
        for (i, w) in envelopes.windows(2).enumerate() {
            rep.record((w[0] - w[1]).max(0.0) / (1.0 + w[1].abs()), || {
                format!(
                    "s={s}: envelope {} at lambda={} exceeds {} at lambda={}",
                    w[0], YOSIDA_LAMBDAS[i], w[1], YOSIDA_LAMBDAS[i + 1]
                )
            });
        }
    }
    // past a bounded domain the resolvent sits within e^{−(s−hi)/λ} of the endpoint and
    // the residual is dominated by rounding of J; sample within 5λ of the domain there
    for view in &views {
        let lambda = view.lambda();
        let (lo, hi) = if dom.lo.is_finite() && dom.hi.is_finite() {
            (dom.lo - 5.0 * lambda, dom.hi + 5.0 * lambda)
        } else {
            (lo, hi)
        };
        let mut points_s: Vec<f64> = (0..points).map(|_| rng.gen_range(lo..hi)).collect();
        points_s.extend([lo, hi, 0.0]);
        for s in points_s {
            let res = resolvent_residual(view, s);
            rep.record(res, || format!("lambda={lambda}, s={s}: resolvent residual {res}"));
        }
    }
    let (m0, delta0) = (0.0, 0.5);
    let levels = [0.1, 0.01];
    match mean_interior_constant(potential, m0, delta0, &levels) {
        Ok(c0) => {
            rep.series("c0", vec![c0]);
            for &lambda in &levels {
                let view = potential.yosida(lambda).expect("positive lambda");
                for _ in 0..points {
                    let s = rng.gen_range(-10.0..10.0);
                    let b = view.yosida(s);
                    let lhs = b * (s - m0);
                    let rhs = delta0 * b.abs() - c0;
                    rep.record((rhs - lhs).max(0.0) / (1.0 + b.abs()), || {
                        format!("lambda={lambda}, s={s}: beta(s−m0) = {lhs} < delta0|beta| − C0 = {rhs}")
                    });
                }
            }
        }
        Err(e) => rep.record(f64::INFINITY, || format!("no mean-interior certificate: {e}")),
    }
    rep
}

/// A scheme on `(0, π)` with shared Neumann bases.
pub fn neumann_scheme(potential: Potential, modes: usize, config: SchemeConfig) -> Arc<Scheme> {
    let a = Arc::new(SpectralBasis::laplacian(&[PI], BoundaryCondition::Neumann, modes, 1).expect("valid basis"));
    Arc::new(Scheme::new(a.clone(), a, potential, config).expect("valid scheme"))
}

/// `0.1 + 0.5 cos x − 0.2 cos 2x`, with grid values in `[−0.6, 0.4]`.
pub fn smooth_datum(scheme: &Scheme) -> Field {
    Field::from_fn(scheme.b(), |x| 0.1 + 0.5 * x[0].cos() - 0.2 * (2.0 * x[0]).cos())
}

/// `0.1 + 0.3 cos x`: low modal content, so the sup-in-time norms are not dominated by an
/// initial transient faster than the coarsest step.
pub fn regular_datum(scheme: &Scheme) -> Field {
    Field::from_fn(scheme.b(), |x| 0.1 + 0.3 * x[0].cos())
}

/// `u(t) = amplitude · t · e₃`, mean free.
pub fn ramp_forcing(scheme: &Scheme, amplitude: f64) -> Vec<Field> {
    let e3 = Field::mode(scheme.b(), 2);
    let c = scheme.config();
    sample_forcing(|t| e3.scaled(amplitude * t), c.steps, c.h())
}

fn zero_forcing(scheme: &Scheme) -> Vec<Field> {
    let c = scheme.config();
    sample_forcing(|_| Field::zeros(scheme.b()), c.steps, c.h())
}

fn config(tau: f64, steps: usize, final_time: f64, lambda: f64) -> SchemeConfig {
    SchemeConfig {
        tau,
        steps,
        final_time,
        lambda,
        ..SchemeConfig::default()
    }
}

/// `max_n |mean(yⁿ + hμⁿ) − m₀|` on a forced regular-well run.
pub fn mass_invariant(tau: f64, modes: usize, steps: usize) -> Result<SuiteReport, CheckError> {
    let name = format!("mass_invariant_tau{tau}");
    let scheme = neumann_scheme(Potential::regular(), modes, config(tau, steps, 1.0, 0.05));
    let traj = scheme
        .run(&smooth_datum(&scheme), ramp_forcing(&scheme, 0.5))
        .map_err(|e| fail(&name)(e.to_string()))?;
    let mut rep = SuiteReport::new(name, MASS_TOL);
    let h = traj.h();
    for st in &traj.states {
        let drift = (st.y.mean() + h * st.mu.mean() - traj.m0).abs();
        rep.record(drift, || format!("n={}: drift {drift}", st.n));
    }
    Ok(rep)
}

/// The energy inequality at every step of an unforced run; the tolerance is `N·10⁻⁹`.
pub fn energy_dissipation(name: &str, potential: Potential, tau: f64) -> Result<SuiteReport, CheckError> {
    let name = format!("energy_{name}_tau{tau}");
    let steps = 64;
    let scheme = neumann_scheme(potential, 32, config(tau, steps, 0.5, 0.05));
    let traj = scheme
        .run(&smooth_datum(&scheme), zero_forcing(&scheme))
        .map_err(|e| fail(&name)(e.to_string()))?;
    let ledger = apriori_ledger(&traj).map_err(|e| fail(&name)(e.to_string()))?;
    let mut rep = SuiteReport::new(name, steps as f64 * 1e-9);
    for row in &ledger.rows {
        rep.record((-row.slack).max(0.0), || {
            format!("k={}: lhs={} rhs={} slack={}", row.k, row.lhs, row.rhs, row.slack)
        });
    }
    rep.series("min_slack", vec![ledger.min_slack]);
    Ok(rep)
}

/// The fast step against the dense reference on random tiny instances.
pub fn oracle_equivalence(seed: u64, instances: usize) -> Result<SuiteReport, CheckError> {
    let name = "oracle_step_equivalence";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wells = [Potential::regular(), Potential::double_obstacle(1.0).expect("valid parameter")];
    let mut rep = SuiteReport::new(name, ORACLE_TOL);
    for case in 0..instances {
        let potential = wells[case % 2].clone();
        let tau = if (case / 2) % 2 == 0 { 0.0 } else { 1.0 };
        let scheme = neumann_scheme(potential, 4, config(tau, 8, 0.5, 0.05));
        let rand_vec = |rng: &mut ChaCha8Rng, amp: f64| -> Vec<f64> { (0..4).map(|_| rng.gen_range(-amp..amp)).collect() };
        let y = Field::synthesize(scheme.b(), rand_vec(&mut rng, 0.2)).expect("size 4");
        let mu = Field::synthesize(scheme.a(), rand_vec(&mut rng, 0.2)).expect("size 4");
        let u = rand_vec(&mut rng, 0.5);
        let state = State {
            n: 0,
            y,
            mu,
            stats: InnerStats::default(),
        };
        let u_field = Field::synthesize(scheme.b(), u.clone()).expect("size 4");
        let fast = scheme.step(&state, &u_field).map_err(|e| fail(name)(e.to_string()))?;
        let slow = dense_step_solve(&scheme, &state, &u).map_err(|e| fail(name)(e.to_string()))?;
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let d = dist(fast.y.coefficients(), &slow.y) + dist(fast.mu.coefficients(), &slow.mu);
        rep.record(d, || format!("instance {case} (tau={tau}, {:?}): distance {d}", scheme.potential().info().kind));
    }
    Ok(rep)
}

fn strictly_decreasing(rep: &mut SuiteReport, label: &str, values: &[f64]) {
    for (i, w) in values.windows(2).enumerate() {
        let defect = if w[1] < w[0] { 0.0 } else { 1.0 + (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE) };
        rep.record(defect, || format!("{label}[{}] = {} is not below {label}[{i}] = {}", i + 1, w[1], w[0]));
    }
}

fn run_levels(
    name: &str,
    potential: &Potential,
    tau: f64,
    lambda: f64,
    levels: &[usize],
    forcing_amplitude: f64,
    y0: impl Fn(&Scheme) -> Field + Sync,
) -> Result<Vec<Trajectory>, CheckError> {
    levels
        .par_iter()
        .map(|&steps| {
            let scheme = neumann_scheme(potential.clone(), 32, config(tau, steps, 1.0, lambda));
            scheme
                .run(&y0(&scheme), ramp_forcing(&scheme, forcing_amplitude))
                .map_err(|e| fail(name)(e.to_string()))
        })
        .collect()
}

/// Self-Cauchy differences over halvings of `h` at `λ = 0.05`, and the obstacle overshoot
/// along decreasing `λ`.
pub fn self_convergence() -> Result<SuiteReport, CheckError> {
    let name = "self_convergence";
    let mut rep = SuiteReport::new(name, 0.0);
    let levels = [16, 32, 64, 128];
    let trajs = run_levels(name, &Potential::regular(), 1.0, 0.05, &levels, 0.5, smooth_datum)?;
    let diffs = trajs
        .windows(2)
        .map(|w| self_cauchy(&w[0], &w[1]))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| fail(name)(e.to_string()))?;
    strictly_decreasing(&mut rep, "E_h", &diffs);
    rep.series("self_cauchy", diffs);

    let obstacle = Potential::double_obstacle(1.0).expect("valid parameter");
    let overshoots = YOSIDA_LAMBDAS
        .par_iter()
        .map(|&lambda| {
            let scheme = neumann_scheme(obstacle.clone(), 32, config(0.0, 64, 1.0, lambda));
            let y0 = Field::from_fn(scheme.b(), |x| 0.9 * x[0].cos());
            let traj = scheme
                .run(&y0, zero_forcing(&scheme))
                .map_err(|e| fail(name)(e.to_string()))?;
            Ok(traj
                .states
                .iter()
                .flat_map(|s| s.y.values().iter().map(|v| v.abs() - 1.0))
                .fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>, CheckError>>()?;
    rep.record(if overshoots[0] > 0.0 { 0.0 } else { 1.0 }, || "no overshoot at the coarsest lambda".into());
    strictly_decreasing(&mut rep, "overshoot", &overshoots);
    rep.series("overshoot", overshoots);
    Ok(rep)
}

/// Stability ratio of the continuous-dependence bound over three step sizes, and the
/// uniqueness probe on identical inputs.
pub fn continuous_dependence_suite(threshold: f64) -> Result<SuiteReport, CheckError> {
    let name = "continuous_dependence";
    let mut rep = SuiteReport::new(name, threshold);
    let levels = [16, 32, 64];
    let eps = 1e-3;
    let rows = levels
        .par_iter()
        .map(|&steps| {
            let scheme = neumann_scheme(Potential::regular(), 32, config(1.0, steps, 1.0, 0.05));
            let y0 = smooth_datum(&scheme);
            let c = scheme.config();
            let e2 = Field::mode(scheme.b(), 1);
            let u2 = sample_forcing(|_| e2.scaled(eps), c.steps, c.h());
            let t1 = scheme.run(&y0, zero_forcing(&scheme)).map_err(|e| fail(name)(e.to_string()))?;
            let t2 = scheme.run(&y0, u2).map_err(|e| fail(name)(e.to_string()))?;
            let t1_again = scheme.run(&y0, zero_forcing(&scheme)).map_err(|e| fail(name)(e.to_string()))?;
            let cd = compare_trajectories(&t1, &t2).map_err(|e| fail(name)(e.to_string()))?;
            let same = compare_trajectories(&t1, &t1_again).map_err(|e| fail(name)(e.to_string()))?;
            Ok((cd.ratio.unwrap_or(f64::NAN), same.lhs))
        })
        .collect::<Result<Vec<(f64, f64)>, CheckError>>()?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = (max - min) / max;
    rep.record(spread, || format!("ratio spread {spread} over {ratios:?}"));
    for (level, (_, lhs)) in levels.iter().zip(&rows) {
        // the uniqueness probe must sit below 1e-8 whatever the spread threshold
        let defect = if *lhs <= 1e-8 { 0.0 } else { f64::INFINITY };
        rep.record(defect, || format!("N={level}: self-comparison lhs {lhs}"));
    }
    rep.series("ratio", ratios);
    rep.series("self_lhs", rows.iter().map(|r| r.1).collect());
    Ok(rep)
}

/// Bound for the nonviscous regularity start used by [`ledger_boundedness`].
pub const CERTIFIED_M0: f64 = 10.0;

/// Variation of every a priori and regularity aggregate across the h-sweep under a
/// certified regularity initialization.
pub fn ledger_boundedness(tau: f64, threshold: f64) -> Result<SuiteReport, CheckError> {
    let name = format!("ledger_boundedness_tau{tau}");
    let levels = [16, 32, 64, 128];
    let m0_bound = if tau > 0.0 { None } else { Some(CERTIFIED_M0) };
    let ledgers = levels
        .par_iter()
        .map(|&steps| {
            let scheme = neumann_scheme(Potential::regular(), 32, config(tau, steps, 1.0, 0.05));
            let traj = scheme
                .run_regular(&regular_datum(&scheme), ramp_forcing(&scheme, 0.5), m0_bound)
                .map_err(|e| fail(&name)(e.to_string()))?;
            let mut ledger = apriori_ledger(&traj).map_err(|e| fail(&name)(e.to_string()))?;
            regularity_ledger(&traj, &mut ledger).map_err(|e| fail(&name)(e.to_string()))?;
            Ok(ledger)
        })
        .collect::<Result<Vec<_>, CheckError>>()?;
    let mut rep = SuiteReport::new(name, threshold);
    for v in sweep_variation(&ledgers, threshold) {
        rep.record(v.metric, || format!("{} varies by {} over {:?}", v.name, v.metric, v.values));
        rep.series(v.name, v.values);
    }
    Ok(rep)
}

/// Every suite in a fixed order; the pure suites derive their seeds from `seed`.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>, CheckError> {
    let exps = [0.25, 0.5, 1.0];
    let s = move |k: u64| seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k);
    let pure: Vec<SuiteReport> = vec![
        interpolant_identities(s(1), 200),
        summation_by_parts(s(2), 10_000),
        elementary_identity_suite(s(3), 1000),
        young_inequality(s(4), 1000),
        gronwall_suite(s(5), 200),
        riesz_identity(s(6), 200),
        dual_norm_representation(s(7), 200),
        norm_equivalence(s(8), 1000, &exps),
        yosida_suite("regular", &Potential::regular(), s(9), 1000),
        yosida_suite("logarithmic", &Potential::logarithmic(1.5).expect("valid parameter"), s(10), 1000),
        yosida_suite("double_obstacle", &Potential::double_obstacle(1.0).expect("valid parameter"), s(11), 1000),
    ];
    type Job = Box<dyn Fn() -> Result<SuiteReport, CheckError> + Send + Sync>;
    let jobs: Vec<Job> = vec![
        Box::new(|| mass_invariant(0.0, 64, 200)),
        Box::new(|| mass_invariant(1.0, 64, 200)),
        Box::new(|| energy_dissipation("regular", Potential::regular(), 0.0)),
        Box::new(|| energy_dissipation("regular", Potential::regular(), 1.0)),
        Box::new(|| energy_dissipation("logarithmic", Potential::logarithmic(1.5).expect("valid parameter"), 0.0)),
        Box::new(|| energy_dissipation("logarithmic", Potential::logarithmic(1.5).expect("valid parameter"), 1.0)),
        Box::new(move || oracle_equivalence(s(12), 20)),
        Box::new(self_convergence),
        Box::new(|| continuous_dependence_suite(0.1)),
        Box::new(|| ledger_boundedness(1.0, 0.2)),
        Box::new(|| ledger_boundedness(0.0, 0.2)),
    ];
    let experiments = jobs.par_iter().map(|job| job()).collect::<Result<Vec<_>, _>>()?;
    Ok(pure.into_iter().chain(experiments).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_tracks_first_failure() {
        let mut rep = SuiteReport::new("t", 1e-3);
        rep.record(1e-4, || unreachable!());
        rep.record(0.5, || "first".into());
        rep.record(f64::NAN, || "second".into());
        assert_eq!((rep.cases, rep.failures), (3, 2));
        assert_eq!(rep.counterexample.as_deref(), Some("first"));
        assert!(rep.max_defect.is_infinite() && !rep.pass());
        assert!(!SuiteReport::new("empty", 1.0).pass());
    }

    #[test]
    fn pure_suites_pass_small() {
        for rep in [
            interpolant_identities(1, 20),
            summation_by_parts(2, 200),
            elementary_identity_suite(3, 100),
            young_inequality(4, 100),
            gronwall_suite(5, 20),
            riesz_identity(6, 20),
            dual_norm_representation(7, 20),
            norm_equivalence(8, 20, &[0.5]),
        ] {
            assert!(rep.pass(), "{}: {:?}", rep.name, rep.counterexample);
        }
    }

    #[test]
    fn suites_are_deterministic() {
        assert_eq!(interpolant_identities(9, 5), interpolant_identities(9, 5));
        assert_eq!(norm_equivalence(9, 8, &[1.0]), norm_equivalence(9, 8, &[1.0]));
    }
}
