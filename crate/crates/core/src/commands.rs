//! Experiment orchestration behind the command line: single runs, h- and λ-sweeps,
//! continuous dependence and the invariant check, with CSV and JSON output.
//!
//! Output is a pure function of the configuration and seed. Floats are written in their
//! shortest round-trip form and no timestamps or timings enter any file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::checks::{self, SuiteReport, MASS_TOL};
use crate::config::{num, ConfigError, RunConfig};
use crate::diagnostics::{
    apriori_ledger, compare_trajectories, regularity_ledger, self_cauchy, sweep_variation,
    DiagnosticsError, EstimateLedger, Variation,
};
use crate::spectra::Field;
use crate::stepper::{sample_forcing, RunError, Scheme, StepError, Trajectory};

pub const SCHEMA_VERSION: u32 = 1;

pub const DIAGNOSTICS_HEADER: &str =
    "n,t,residual,inner_iters,mass_invariant,energy,norm_ar_mu,norm_bs_y,mean_mu,beta_l1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Invariant,
    Config,
    Solver,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Invariant => 1,
            ErrorKind::Config | ErrorKind::Io => 2,
            ErrorKind::Solver => 3,
        }
    }
}

/// Machine-readable failure record, printed as one JSON line on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandError {
    pub schema_version: u32,
    pub error: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

impl CommandError {
    pub fn new(error: ErrorKind, message: impl Into<String>) -> Self {
        CommandError {
            schema_version: SCHEMA_VERSION,
            error,
            message: message.into(),
            line: None,
            step: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain record")
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError {
            line: e.line,
            ..CommandError::new(ErrorKind::Config, e.to_string())
        }
    }
}

impl From<RunError> for CommandError {
    fn from(e: RunError) -> Self {
        let kind = match e.source {
            StepError::InnerNonconvergence { .. } => ErrorKind::Solver,
            _ => ErrorKind::Config,
        };
        CommandError {
            step: Some(e.step),
            ..CommandError::new(kind, e.to_string())
        }
    }
}

impl From<DiagnosticsError> for CommandError {
    fn from(e: DiagnosticsError) -> Self {
        match e {
            DiagnosticsError::Run(run) => run.into(),
            other => CommandError::new(ErrorKind::Solver, other.to_string()),
        }
    }
}

impl From<checks::CheckError> for CommandError {
    fn from(e: checks::CheckError) -> Self {
        CommandError::new(ErrorKind::Solver, e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CommandError {
    CommandError::new(ErrorKind::Io, format!("{}: {e}", path.display()))
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub summary: PathBuf,
    /// First failing check, when `pass` is false.
    pub first_failure: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            ErrorKind::Invariant.exit_code()
        }
    }
}

/// Writes through a temporary sibling and renames, so readers never see partial files.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CommandError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| io_error(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CommandError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable summary");
    text.push('\n');
    write_atomic(path, &text)
}

/// One finished trajectory with its ledgers.
struct Leg {
    traj: Trajectory,
    ledger: EstimateLedger,
    regularity_note: Option<String>,
}

fn run_leg(cfg: &RunConfig, scheme: &Arc<Scheme>) -> Result<Leg, CommandError> {
    let y0 = cfg.initial_field(scheme).map_err(|m| CommandError::new(ErrorKind::Config, m))?;
    let forcing = cfg.forcing_samples(scheme);
    run_leg_with(scheme, &y0, forcing, cfg.m0_bound)
}

fn run_leg_with(
    scheme: &Arc<Scheme>,
    y0: &Field,
    forcing: Vec<Field>,
    m0_bound: Option<f64>,
) -> Result<Leg, CommandError> {
    let init = scheme.check_regularity_init(y0, &forcing, m0_bound);
    let mut traj = scheme.run(y0, forcing)?;
    let mut ledger = apriori_ledger(&traj)?;
    let regularity_note = match init {
        Ok(init) => {
            traj.regularity = Some(init);
            regularity_ledger(&traj, &mut ledger)?;
            None
        }
        Err(e) => Some(e.to_string()),
    };
    Ok(Leg {
        traj,
        ledger,
        regularity_note,
    })
}

fn build_scheme(cfg: &RunConfig) -> Result<Arc<Scheme>, CommandError> {
    cfg.build_scheme().map_err(|m| CommandError::new(ErrorKind::Config, m))
}

fn with_steps(cfg: &RunConfig, steps: usize) -> RunConfig {
    let mut c = cfg.clone();
    c.scheme.steps = steps;
    c
}

fn with_lambda(cfg: &RunConfig, lambda: f64) -> RunConfig {
    let mut c = cfg.clone();
    c.scheme.lambda = lambda;
    c
}

/// Per-step diagnostics CSV; the energy column is the free energy change from `y₀`.
pub fn diagnostics_csv(traj: &Trajectory) -> String {
    let scheme = &traj.scheme;
    let c = scheme.config();
    let (h, r, sigma) = (c.h(), c.r, c.sigma);
    let view = scheme.yosida();
    let p = scheme.potential();
    let energy = |y: &Field| 0.5 * y.power_norm(sigma).powi(2) + y.integrate_map(|s| view.envelope(s) + p.pi_hat(s));
    let e0 = energy(&traj.states[0].y);
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for st in &traj.states {
        let row = [
            st.n.to_string(),
            num(st.n as f64 * h),
            num(st.stats.residual),
            st.stats.iterations.to_string(),
            num(st.y.mean() + h * st.mu.mean() - traj.m0),
            num(energy(&st.y) - e0),
            num(st.mu.power_norm(r)),
            num(st.y.power_norm(sigma)),
            num(st.mu.mean()),
            num(st.y.integrate_map(|s| view.yosida(s).abs())),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Grid values of `y` and `μ` every `stride` steps (and at the final step).
pub fn snapshots_csv(traj: &Trajectory, stride: usize) -> String {
    let b = traj.scheme.b();
    let dim = b.dimension();
    let h = traj.h();
    let mut out = String::from(if dim == 1 { "n,t,x,y,mu\n" } else { "n,t,x1,x2,y,mu\n" });
    let last = traj.states.len() - 1;
    for st in traj.states.iter().filter(|s| s.n % stride == 0 || s.n == last) {
        let mu = st.mu.values();
        for (q, node) in b.nodes().iter().enumerate() {
            let _ = write!(out, "{},{},{}", st.n, num(st.n as f64 * h), num(node[0]));
            if dim == 2 {
                let _ = write!(out, ",{}", num(node[1]));
            }
            let _ = writeln!(out, ",{},{}", num(st.y.values()[q]), num(mu[q]));
        }
    }
    out
}

fn max_mass_drift(traj: &Trajectory) -> f64 {
    let h = traj.h();
    traj.states
        .iter()
        .map(|s| (s.y.mean() + h * s.mu.mean() - traj.m0).abs())
        .fold(0.0, f64::max)
}

fn mass_ok(traj: &Trajectory) -> bool {
    max_mass_drift(traj) <= MASS_TOL * (1.0 + traj.m0.abs())
}

#[derive(Serialize)]
struct Flags {
    energy_inequality: bool,
    mass_conservation: bool,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    schema_version: u32,
    command: &'static str,
    config: String,
    steps: usize,
    h: f64,
    max_mass_drift: f64,
    max_inner_residual: f64,
    fallback_steps: usize,
    regularity_note: Option<String>,
    ledger: &'a EstimateLedger,
    flags: Flags,
    pass: bool,
}

pub fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let scheme = build_scheme(cfg)?;
    let leg = run_leg(cfg, &scheme)?;
    write_atomic(&out.join("diagnostics.csv"), &diagnostics_csv(&leg.traj))?;
    if cfg.snapshot_stride > 0 {
        write_atomic(&out.join("snapshots.csv"), &snapshots_csv(&leg.traj, cfg.snapshot_stride))?;
    }
    let flags = Flags {
        energy_inequality: leg.ledger.energy_holds(),
        mass_conservation: mass_ok(&leg.traj),
    };
    let first_failure = if !flags.energy_inequality {
        Some(format!("energy inequality slack {} below {}", leg.ledger.min_slack, -leg.ledger.tol_accum))
    } else if !flags.mass_conservation {
        Some(format!("mass drift {}", max_mass_drift(&leg.traj)))
    } else {
        None
    };
    let pass = first_failure.is_none();
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        command: "run",
        config: cfg.emit(),
        steps: scheme.config().steps,
        h: scheme.config().h(),
        max_mass_drift: max_mass_drift(&leg.traj),
        max_inner_residual: leg.traj.states.iter().map(|s| s.stats.residual).fold(0.0, f64::max),
        fallback_steps: leg.traj.states.iter().filter(|s| s.stats.fallback).count(),
        regularity_note: leg.regularity_note.clone(),
        ledger: &leg.ledger,
        flags,
        pass,
    };
    let path = out.join("summary.json");
    write_json(&path, &summary)?;
    Ok(Outcome {
        pass,
        summary: path,
        first_failure,
    })
}

#[derive(Serialize)]
struct SweepLeg {
    steps: usize,
    h: f64,
    lambda: f64,
    energy_inequality: bool,
    mass_conservation: bool,
    min_slack: f64,
    k1_hat: f64,
    k3_hat: Option<f64>,
    overshoot: f64,
    regularity_note: Option<String>,
    csv: String,
}

fn sweep_leg(leg: &Leg, csv: String) -> SweepLeg {
    let c = leg.traj.scheme.config();
    SweepLeg {
        steps: c.steps,
        h: c.h(),
        lambda: c.lambda,
        energy_inequality: leg.ledger.energy_holds(),
        mass_conservation: mass_ok(&leg.traj),
        min_slack: leg.ledger.min_slack,
        k1_hat: leg.ledger.k1_hat,
        k3_hat: leg.ledger.k3_hat,
        overshoot: leg.ledger.overshoot,
        regularity_note: leg.regularity_note.clone(),
        csv,
    }
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

fn first_variation_failure(variation: &[Variation]) -> Option<String> {
    variation
        .iter()
        .find(|v| !v.pass)
        .map(|v| format!("{} varies by {} over {:?}", v.name, v.metric, v.values))
}

fn first_leg_failure(legs: &[SweepLeg]) -> Option<String> {
    legs.iter().find_map(|l| {
        if !l.energy_inequality {
            Some(format!("energy inequality fails at N = {}, lambda = {}", l.steps, l.lambda))
        } else if !l.mass_conservation {
            Some(format!("mass drift at N = {}, lambda = {}", l.steps, l.lambda))
        } else {
            None
        }
    })
}

#[derive(Serialize)]
struct SweepHSummary {
    schema_version: u32,
    command: &'static str,
    config: String,
    threshold: f64,
    legs: Vec<SweepLeg>,
    self_cauchy: Vec<f64>,
    self_cauchy_decreasing: bool,
    variation: Vec<Variation>,
    pass: bool,
}

/// Runs at `N, 2N, …, 2^K N` steps and compares consecutive levels.
pub fn cmd_sweep_h(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let base = cfg.scheme.steps;
    let levels: Vec<usize> = (0..=cfg.sweep.levels).map(|k| base << k).collect();
    let legs = levels
        .par_iter()
        .map(|&steps| {
            let c = with_steps(cfg, steps);
            run_leg(&c, &build_scheme(&c)?)
        })
        .collect::<Result<Vec<Leg>, CommandError>>()?;
    let mut rows = Vec::with_capacity(legs.len());
    for (k, leg) in legs.iter().enumerate() {
        let name = format!("sweep_h_leg{k}.csv");
        write_atomic(&out.join(&name), &diagnostics_csv(&leg.traj))?;
        rows.push(sweep_leg(leg, name));
    }
    let diffs = legs
        .windows(2)
        .map(|w| self_cauchy(&w[0].traj, &w[1].traj))
        .collect::<Result<Vec<f64>, _>>()?;
    let ledgers: Vec<EstimateLedger> = legs.iter().map(|l| l.ledger.clone()).collect();
    let variation = sweep_variation(&ledgers, cfg.sweep.threshold);
    let decreasing = strictly_decreasing(&diffs);
    let first_failure = first_leg_failure(&rows)
        .or_else(|| (!decreasing).then(|| format!("self-Cauchy differences not decreasing: {diffs:?}")))
        .or_else(|| first_variation_failure(&variation));
    let summary = SweepHSummary {
        schema_version: SCHEMA_VERSION,
        command: "sweep-h",
        config: cfg.emit(),
        threshold: cfg.sweep.threshold,
        legs: rows,
        self_cauchy: diffs,
        self_cauchy_decreasing: decreasing,
        variation,
        pass: first_failure.is_none(),
    };
    let path = out.join("sweep_h_summary.json");
    write_json(&path, &summary)?;
    Ok(Outcome {
        pass: summary.pass,
        summary: path,
        first_failure,
    })
}

#[derive(Serialize)]
struct SweepLambdaSummary {
    schema_version: u32,
    command: &'static str,
    config: String,
    threshold: f64,
    legs: Vec<SweepLeg>,
    overshoot: Vec<f64>,
    /// Checked only when the coarsest level overshoots the domain.
    overshoot_decreasing: Option<bool>,
    variation: Vec<Variation>,
    pass: bool,
}

/// Runs at each configured `λ` with the configured step.
pub fn cmd_sweep_lambda(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let legs = cfg
        .sweep
        .lambdas
        .par_iter()
        .map(|&lambda| {
            let c = with_lambda(cfg, lambda);
            run_leg(&c, &build_scheme(&c)?)
        })
        .collect::<Result<Vec<Leg>, CommandError>>()?;
    let mut rows = Vec::with_capacity(legs.len());
    for (k, leg) in legs.iter().enumerate() {
        let name = format!("sweep_lambda_leg{k}.csv");
        write_atomic(&out.join(&name), &diagnostics_csv(&leg.traj))?;
        rows.push(sweep_leg(leg, name));
    }
    let overshoot: Vec<f64> = legs.iter().map(|l| l.ledger.overshoot).collect();
    let overshoot_decreasing = (overshoot[0] > 0.0).then(|| strictly_decreasing(&overshoot));
    let ledgers: Vec<EstimateLedger> = legs.iter().map(|l| l.ledger.clone()).collect();
    let variation = sweep_variation(&ledgers, cfg.sweep.threshold);
    let first_failure = first_leg_failure(&rows)
        .or_else(|| (overshoot_decreasing == Some(false)).then(|| format!("overshoot not decreasing: {overshoot:?}")))
        .or_else(|| first_variation_failure(&variation));
    let summary = SweepLambdaSummary {
        schema_version: SCHEMA_VERSION,
        command: "sweep-lambda",
        config: cfg.emit(),
        threshold: cfg.sweep.threshold,
        legs: rows,
        overshoot,
        overshoot_decreasing,
        variation,
        pass: first_failure.is_none(),
    };
    let path = out.join("sweep_lambda_summary.json");
    write_json(&path, &summary)?;
    Ok(Outcome {
        pass: summary.pass,
        summary: path,
        first_failure,
    })
}

#[derive(Serialize)]
struct ContdepRow {
    steps: usize,
    h: f64,
    eps: f64,
    lhs: f64,
    rhs: f64,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct ContdepSummary {
    schema_version: u32,
    command: &'static str,
    config: String,
    threshold: f64,
    rows: Vec<ContdepRow>,
    /// Relative spread `(max − min)/max` of the ratio across step sizes, per `ε`.
    spread: Vec<f64>,
    /// Self-comparison of two runs with identical inputs, per step size.
    uniqueness_lhs: Vec<f64>,
    pass: bool,
}

/// Perturbs the forcing by `ε e_mode` for each `ε` and compares at `N, 2N, …, 2^K N`.
pub fn cmd_contdep(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let levels: Vec<usize> = (0..=cfg.sweep.levels).map(|k| cfg.scheme.steps << k).collect();
    let per_level = levels
        .par_iter()
        .map(|&steps| {
            let c = with_steps(cfg, steps);
            let scheme = build_scheme(&c)?;
            let y0 = c.initial_field(&scheme).map_err(|m| CommandError::new(ErrorKind::Config, m))?;
            let base = c.forcing_samples(&scheme);
            let t1 = scheme.run(&y0, base.clone())?;
            let again = scheme.run(&y0, base.clone())?;
            let probe = compare_trajectories(&t1, &again)?;
            let mode = Field::mode(scheme.b(), c.contdep.mode - 1);
            let h = scheme.config().h();
            let mut rows = Vec::new();
            for &eps in &c.contdep.eps {
                let perturbed: Vec<Field> = sample_forcing(|_| mode.scaled(eps), steps, h)
                    .iter()
                    .zip(&base)
                    .map(|(p, u)| u + p)
                    .collect();
                let t2 = scheme.run(&y0, perturbed)?;
                let cd = compare_trajectories(&t1, &t2)?;
                rows.push(ContdepRow {
                    steps,
                    h,
                    eps,
                    lhs: cd.lhs,
                    rhs: cd.rhs,
                    ratio: cd.ratio,
                });
            }
            let unique = probe.uniqueness_holds() && probe.lhs <= 1e-8;
            Ok((rows, probe.lhs, unique))
        })
        .collect::<Result<Vec<_>, CommandError>>()?;
    let mut csv = String::from("steps,h,eps,lhs,rhs,ratio\n");
    let mut rows = Vec::new();
    let mut uniqueness_lhs = Vec::new();
    let mut unique_all = true;
    for (level_rows, lhs, unique) in per_level {
        for r in &level_rows {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                r.steps,
                num(r.h),
                num(r.eps),
                num(r.lhs),
                num(r.rhs),
                r.ratio.map_or(String::new(), num)
            );
        }
        rows.extend(level_rows);
        uniqueness_lhs.push(lhs);
        unique_all &= unique;
    }
    write_atomic(&out.join("contdep.csv"), &csv)?;
    let spread: Vec<f64> = cfg
        .contdep
        .eps
        .iter()
        .map(|&eps| {
            let ratios: Vec<f64> = rows
                .iter()
                .filter(|r| r.eps == eps)
                .map(|r| r.ratio.unwrap_or(f64::NAN))
                .collect();
            let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            (max - min) / max
        })
        .collect();
    let first_failure = if !unique_all {
        Some(format!("uniqueness probe failed: {uniqueness_lhs:?}"))
    } else {
        spread
            .iter()
            .zip(&cfg.contdep.eps)
            .find(|(s, _)| !(**s <= cfg.contdep.threshold))
            .map(|(s, eps)| format!("ratio spread {s} at eps = {eps}"))
    };
    let summary = ContdepSummary {
        schema_version: SCHEMA_VERSION,
        command: "contdep",
        config: cfg.emit(),
        threshold: cfg.contdep.threshold,
        rows,
        spread,
        uniqueness_lhs,
        pass: first_failure.is_none(),
    };
    let path = out.join("contdep_summary.json");
    write_json(&path, &summary)?;
    Ok(Outcome {
        pass: summary.pass,
        summary: path,
        first_failure,
    })
}

#[derive(Serialize)]
struct CheckSummary {
    schema_version: u32,
    command: &'static str,
    seed: u64,
    suites: Vec<SuiteReport>,
    pass: bool,
}

/// Every invariant suite of every module; the scheme settings of `cfg` are not used.
pub fn cmd_check(cfg: &RunConfig, out: &Path) -> Result<Outcome, CommandError> {
    let suites = checks::run_all(cfg.seed)?;
    let first_failure = suites.iter().find(|s| !s.pass()).map(|s| {
        format!(
            "{}: {}",
            s.name,
            s.counterexample.clone().unwrap_or_else(|| "no cases ran".into())
        )
    });
    let summary = CheckSummary {
        schema_version: SCHEMA_VERSION,
        command: "check",
        seed: cfg.seed,
        pass: first_failure.is_none(),
        suites,
    };
    let path = out.join("check_summary.json");
    write_json(&path, &summary)?;
    Ok(Outcome {
        pass: summary.pass,
        summary: path,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small() -> RunConfig {
        parse_config("steps = 8\nfinal_time = 0.5\noperator_a.n_modes = 8\noperator_b.n_modes = 8\ny0 = bump:0.3:0.1\n")
            .unwrap()
    }

    #[test]
    fn zero_problem_has_zero_diagnostics() {
        let cfg = parse_config("steps = 4\noperator_a.n_modes = 4\noperator_b.n_modes = 4").unwrap();
        let scheme = build_scheme(&cfg).unwrap();
        let leg = run_leg(&cfg, &scheme).unwrap();
        let csv = diagnostics_csv(&leg.traj);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(DIAGNOSTICS_HEADER));
        for line in lines {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 10);
            assert!(fields[2..].iter().all(|f| *f == "0" || *f == "0.0" || *f == "-0.0"), "{line}");
        }
    }

    #[test]
    fn run_writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small();
        cfg.snapshot_stride = 4;
        let outcome = cmd_run(&cfg, dir.path()).unwrap();
        assert!(outcome.pass && outcome.exit_code() == 0);
        let snaps = fs::read_to_string(dir.path().join("snapshots.csv")).unwrap();
        // steps 0, 4, 8 on 16 grid nodes
        assert_eq!(snaps.lines().count(), 1 + 3 * 16);
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&outcome.summary).unwrap()).unwrap();
        assert_eq!(summary["schema_version"], 1);
        assert_eq!(summary["pass"], true);
    }

    #[test]
    fn sweep_h_reports_decreasing_differences() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small();
        cfg.sweep.levels = 3;
        let outcome = cmd_sweep_h(&cfg, dir.path()).unwrap();
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&outcome.summary).unwrap()).unwrap();
        assert_eq!(summary["self_cauchy"].as_array().unwrap().len(), 3);
        assert_eq!(summary["self_cauchy_decreasing"], true);
        assert!(dir.path().join("sweep_h_leg3.csv").exists());
    }

    #[test]
    fn contdep_writes_ratio_table() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small();
        cfg.sweep.levels = 1;
        let outcome = cmd_contdep(&cfg, dir.path()).unwrap();
        let table = fs::read_to_string(dir.path().join("contdep.csv")).unwrap();
        // two step sizes times two amplitudes
        assert_eq!(table.lines().count(), 5);
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&outcome.summary).unwrap()).unwrap();
        assert!(summary["uniqueness_lhs"].as_array().unwrap().iter().all(|v| v == 0.0));
    }

    #[test]
    fn solver_and_config_errors_map_to_exit_codes() {
        let stalled = RunError {
            step: 3,
            source: StepError::InnerNonconvergence {
                iterations: 50,
                residual: 1.0,
                best_y: vec![],
                best_mu: vec![],
            },
        };
        let e: CommandError = stalled.into();
        assert_eq!((e.error.exit_code(), e.step), (3, Some(3)));
        let e: CommandError = parse_config("tau = 2").unwrap_err().into();
        assert_eq!((e.error.exit_code(), e.line), (2, Some(1)));
        let json: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(json["error"], "config");
    }
}
