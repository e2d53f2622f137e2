//! File-backed run configuration.
//!
//! The format is line oriented: `key = value`, `#` starts a comment, nested settings use
//! dotted keys (`operator_a.bc = neumann`). Every key is optional and unknown keys are
//! rejected. Mode indices in profiles are one-based (`e₁` is the first eigenfunction).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::potentials::Potential;
use crate::spectra::{BoundaryCondition, Field, SpectralBasis};
use crate::stepper::{sample_forcing, Scheme, SchemeConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub struct ConfigError {
    /// One-based line of the offending entry, when it came from the file.
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "{key}: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub bc: BoundaryCondition,
    /// Power of the Laplacian (1 Laplacian, 2 bi-harmonic).
    pub power_offset: u32,
    pub lengths: Vec<f64>,
    /// Modes per axis.
    pub n_modes: usize,
}

impl Default for OperatorSpec {
    fn default() -> Self {
        OperatorSpec {
            bc: BoundaryCondition::Neumann,
            power_offset: 1,
            lengths: vec![std::f64::consts::PI],
            n_modes: 32,
        }
    }
}

impl OperatorSpec {
    pub fn build(&self) -> Result<Arc<SpectralBasis>, crate::spectra::SpectraError> {
        SpectralBasis::laplacian(&self.lengths, self.bc, self.n_modes, self.power_offset).map(Arc::new)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Regular,
    Logarithmic,
    DoubleObstacle,
}

impl FromStr for PotentialKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "regular" => Ok(PotentialKind::Regular),
            "logarithmic" => Ok(PotentialKind::Logarithmic),
            "double_obstacle" => Ok(PotentialKind::DoubleObstacle),
            other => Err(format!(
                "unknown potential '{other}' (expected regular, logarithmic or double_obstacle)"
            )),
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialKind::Regular => "regular",
            PotentialKind::Logarithmic => "logarithmic",
            PotentialKind::DoubleObstacle => "double_obstacle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    /// Logarithmic well parameter, `> 1`.
    pub c1: f64,
    /// Obstacle well parameter, `> 0`.
    pub c2: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec {
            kind: PotentialKind::Regular,
            c1: 1.5,
            c2: 1.0,
        }
    }
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential, crate::potentials::PotentialError> {
        match self.kind {
            PotentialKind::Regular => Ok(Potential::regular()),
            PotentialKind::Logarithmic => Potential::logarithmic(self.c1),
            PotentialKind::DoubleObstacle => Potential::double_obstacle(self.c2),
        }
    }
}

/// Initial datum `y₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialProfile {
    Zero,
    Constant { value: f64 },
    /// `mean + amplitude · Π cos(π xᵢ/Lᵢ)`.
    Bump { amplitude: f64, mean: f64 },
    /// Leading coefficients in the eigenbasis of `B`; the rest are zero.
    Coefficients { values: Vec<f64> },
}

impl InitialProfile {
    pub fn field(&self, basis: &Arc<SpectralBasis>) -> Result<Field, String> {
        match self {
            InitialProfile::Zero => Ok(Field::zeros(basis)),
            InitialProfile::Constant { value } => Ok(Field::from_fn(basis, |_| *value)),
            InitialProfile::Bump { amplitude, mean } => {
                let lengths = basis.lengths().to_vec();
                Ok(Field::from_fn(basis, |x| {
                    let shape: f64 = lengths
                        .iter()
                        .enumerate()
                        .map(|(i, l)| (std::f64::consts::PI * x[i] / l).cos())
                        .product();
                    mean + amplitude * shape
                }))
            }
            InitialProfile::Coefficients { values } => {
                if values.len() > basis.len() {
                    return Err(format!(
                        "{} coefficients given but B has only {} modes",
                        values.len(),
                        basis.len()
                    ));
                }
                let mut c = values.clone();
                c.resize(basis.len(), 0.0);
                Field::synthesize(basis, c).map_err(|e| e.to_string())
            }
        }
    }
}

impl FromStr for InitialProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        match parts.as_slice() {
            ["zero"] => Ok(InitialProfile::Zero),
            ["constant", m] => Ok(InitialProfile::Constant { value: parse_f64(m)? }),
            ["bump", a] => Ok(InitialProfile::Bump {
                amplitude: parse_f64(a)?,
                mean: 0.0,
            }),
            ["bump", a, m] => Ok(InitialProfile::Bump {
                amplitude: parse_f64(a)?,
                mean: parse_f64(m)?,
            }),
            ["coefficients", list] => Ok(InitialProfile::Coefficients {
                values: parse_list(list)?,
            }),
            _ => Err(format!(
                "bad initial profile '{s}' (expected zero, constant:m, bump:amp[:mean] or coefficients:c1,c2,...)"
            )),
        }
    }
}

impl fmt::Display for InitialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialProfile::Zero => f.write_str("zero"),
            InitialProfile::Constant { value } => write!(f, "constant:{}", num(*value)),
            InitialProfile::Bump { amplitude, mean } => {
                write!(f, "bump:{}:{}", num(*amplitude), num(*mean))
            }
            InitialProfile::Coefficients { values } => {
                write!(f, "coefficients:{}", join(values))
            }
        }
    }
}

/// Forcing `u(t)`; `mode` is one-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingProfile {
    Zero,
    /// `u(t) = amplitude · e_mode`.
    ConstantMode { mode: usize, amplitude: f64 },
    /// `u(t) = amplitude · (t/T) · e_mode`.
    RampMode { mode: usize, amplitude: f64 },
}

impl ForcingProfile {
    fn mode(&self) -> Option<usize> {
        match self {
            ForcingProfile::Zero => None,
            ForcingProfile::ConstantMode { mode, .. } | ForcingProfile::RampMode { mode, .. } => {
                Some(*mode)
            }
        }
    }

    pub fn at(&self, basis: &Arc<SpectralBasis>, t: f64, final_time: f64) -> Field {
        match self {
            ForcingProfile::Zero => Field::zeros(basis),
            ForcingProfile::ConstantMode { mode, amplitude } => {
                Field::mode(basis, mode - 1).scaled(*amplitude)
            }
            ForcingProfile::RampMode { mode, amplitude } => {
                Field::mode(basis, mode - 1).scaled(amplitude * t / final_time)
            }
        }
    }
}

impl FromStr for ForcingProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let mode = |m: &str| -> Result<usize, String> {
            match m.parse::<usize>() {
                Ok(j) if j >= 1 => Ok(j),
                _ => Err(format!("mode index '{m}' must be a positive integer")),
            }
        };
        match parts.as_slice() {
            ["zero"] => Ok(ForcingProfile::Zero),
            ["constant-mode", j, a] => Ok(ForcingProfile::ConstantMode {
                mode: mode(j)?,
                amplitude: parse_f64(a)?,
            }),
            ["ramp-mode", j, a] => Ok(ForcingProfile::RampMode {
                mode: mode(j)?,
                amplitude: parse_f64(a)?,
            }),
            _ => Err(format!(
                "bad forcing '{s}' (expected zero, constant-mode:j:amp or ramp-mode:j:amp)"
            )),
        }
    }
}

impl fmt::Display for ForcingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingProfile::Zero => f.write_str("zero"),
            ForcingProfile::ConstantMode { mode, amplitude } => {
                write!(f, "constant-mode:{mode}:{}", num(*amplitude))
            }
            ForcingProfile::RampMode { mode, amplitude } => {
                write!(f, "ramp-mode:{mode}:{}", num(*amplitude))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    /// Number of refinements in an h-sweep (`levels + 1` runs).
    pub levels: usize,
    pub lambdas: Vec<f64>,
    /// Allowed relative variation of ledger aggregates.
    pub threshold: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            levels: 3,
            lambdas: vec![0.1, 0.05, 0.025],
            threshold: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContdepSpec {
    /// Perturbation amplitudes of the second forcing.
    pub eps: Vec<f64>,
    /// One-based mode carrying the perturbation.
    pub mode: usize,
    /// Allowed relative spread of the ratio.
    pub threshold: f64,
}

impl Default for ContdepSpec {
    fn default() -> Self {
        ContdepSpec {
            eps: vec![1e-3, 1e-4],
            mode: 2,
            threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scheme: SchemeConfig,
    pub operator_a: OperatorSpec,
    pub operator_b: OperatorSpec,
    pub potential: PotentialSpec,
    pub y0: InitialProfile,
    pub forcing: ForcingProfile,
    /// Bound on the initial chemical potential for nonviscous regularity runs.
    pub m0_bound: Option<f64>,
    pub output_dir: String,
    pub seed: u64,
    /// Every how many steps to write a field snapshot; 0 disables snapshots.
    pub snapshot_stride: usize,
    pub sweep: SweepSpec,
    pub contdep: ContdepSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheme: SchemeConfig::default(),
            operator_a: OperatorSpec::default(),
            operator_b: OperatorSpec::default(),
            potential: PotentialSpec::default(),
            y0: InitialProfile::Zero,
            forcing: ForcingProfile::Zero,
            m0_bound: None,
            output_dir: "out".into(),
            seed: 0,
            snapshot_stride: 0,
            sweep: SweepSpec::default(),
            contdep: ContdepSpec::default(),
        }
    }
}

/// Every accepted key, in canonical order.
pub const KEYS: &[&str] = &[
    "tau",
    "r",
    "sigma",
    "final_time",
    "steps",
    "lambda",
    "inner_tol_abs",
    "inner_tol_rel",
    "newton_max_iter",
    "fallback_max_iter",
    "m0_guard",
    "m0_bound",
    "operator_a.bc",
    "operator_a.power_offset",
    "operator_a.lengths",
    "operator_a.n_modes",
    "operator_b.bc",
    "operator_b.power_offset",
    "operator_b.lengths",
    "operator_b.n_modes",
    "potential.kind",
    "potential.c1",
    "potential.c2",
    "y0",
    "forcing",
    "output_dir",
    "seed",
    "snapshot_stride",
    "sweep.levels",
    "sweep.lambdas",
    "sweep.threshold",
    "contdep.eps",
    "contdep.mode",
    "contdep.threshold",
];

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_f64).collect()
}

fn parse_int<T: FromStr>(s: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a nonnegative integer"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("'{s}' is not true or false")),
    }
}

/// Shortest representation that parses back to the same value.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let s = &mut self.scheme;
        
        match key {
            "tau" => s.tau = parse_f64(value)?,
            "r" => s.r = parse_f64(value)?,
            "sigma" => s.sigma = parse_f64(value)?,
            "final_time" => s.final_time = parse_f64(value)?,
            "steps" => s.steps = parse_int(value)?,
            "lambda" => s.lambda = parse_f64(value)?,
            "inner_tol_abs" => s.inner_tol_abs = parse_f64(value)?,
            "inner_tol_rel" => s.inner_tol_rel = parse_f64(value)?,
            "newton_max_iter" => s.newton_max_iter = parse_int(value)?,
            "fallback_max_iter" => s.fallback_max_iter = parse_int(value)?,
            "m0_guard" => s.m0_guard = parse_bool(value)?,
            "m0_bound" => {
                self.m0_bound = if value == "none" {
                    None
                } else {
                    Some(parse_f64(value)?)
                }
            }
            "potential.kind" => self.potential.kind = value.parse()?,
            "potential.c1" => self.potential.c1 = parse_f64(value)?,
            "potential.c2" => self.potential.c2 = parse_f64(value)?,
            "y0" => self.y0 = value.parse()?,
            "forcing" => self.forcing = value.parse()?,
            "output_dir" => self.output_dir = value.to_string(),
            "seed" => self.seed = parse_int(value)?,
            "snapshot_stride" => self.snapshot_stride = parse_int(value)?,
            "sweep.levels" => self.sweep.levels = parse_int(value)?,
            "sweep.lambdas" => self.sweep.lambdas = parse_list(value)?,
            "sweep.threshold" => self.sweep.threshold = parse_f64(value)?,
            "contdep.eps" => self.contdep.eps = parse_list(value)?,
            "contdep.mode" => self.contdep.mode = parse_int(value)?,
            "contdep.threshold" => self.contdep.threshold = parse_f64(value)?,
            _ => {
                let Some((which, field)) = key
                    .split_once('.')
                    .filter(|(w, _)| *w == "operator_a" || *w == "operator_b")
                else {
                    return Err("unknown key".into());
                };
                let spec = if which == "operator_a" {
                    &mut self.operator_a
                } else {
                    &mut self.operator_b
                };
                match field {
                    "bc" => spec.bc = value.parse()?,
                    "power_offset" => spec.power_offset = parse_int(value)?,
                    "lengths" => spec.lengths = parse_list(value)?,
                    "n_modes" => spec.n_modes = parse_int(value)?,
                    _ => return Err("unknown key".into()),
                }
            }
        }
        Ok(())
    }

    /// Cross-field checks; returns the offending key.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        self.scheme.validate().map_err(|e| {
            let msg = e.to_string();
            let key = if msg.contains("tau") {
                "tau"
            } else if msg.contains("sigma") && self.scheme.r > 0.0 {
                "sigma"
            } else if msg.contains("final time") {
                "final_time"
            } else if msg.contains("time step") {
                "steps"
            } else if msg.contains("lambda") {
                "lambda"
            } else if msg.contains("tolerance") {
                "inner_tol_abs"
            } else if msg.contains("newton") {
                "newton_max_iter"
            } else {
                "r"
            };
            (key, msg)
        })?;
        for (name, spec) in [("operator_a", &self.operator_a), ("operator_b", &self.operator_b)] {
            if let Err(e) = spec.build() {
                let field = match e {
                    crate::spectra::SpectraError::ZeroPower => "power_offset",
                    crate::spectra::SpectraError::TooFewModes(_) => "n_modes",
                    _ => "lengths",
                };
                let key = KEYS
                    .iter()
                    .find(|k| **k == format!("{name}.{field}"))
                    .copied()
                    .unwrap_or("operator_a.lengths");
                return Err((key, e.to_string()));
            }
        }
        if self.operator_a.lengths != self.operator_b.lengths
            || self.operator_a.n_modes != self.operator_b.n_modes
        {
            return Err((
                "operator_b.lengths",
                "A and B must share lengths and n_modes".into(),
            ));
        }
        if let Err(e) = self.potential.build() {
            let key = match self.potential.kind {
                PotentialKind::Logarithmic => "potential.c1",
                _ => "potential.c2",
            };
            return Err((key, e.to_string()));
        }
        if let Some(b) = self.m0_bound {
            if !(b > 0.0) {
                return Err(("m0_bound", format!("must be positive, got {b}")));
            }
        }
        let b_len = self.operator_b.build().map(|b| b.len()).unwrap_or(0);
        if let InitialProfile::Coefficients { values } = &self.y0 {
            if values.len() > b_len {
                return Err(("y0", format!("at most {b_len} coefficients allowed")));
            }
        }
        if let Some(j) = self.forcing.mode() {
            if j > b_len {
                return Err(("forcing", format!("mode {j} exceeds the {b_len} modes of B")));
            }
        }
        if self.contdep.mode == 0 || self.contdep.mode > b_len {
            return Err(("contdep.mode", format!("must lie in 1..={b_len}")));
        }
        if self.contdep.eps.is_empty() || self.contdep.eps.contains(&0.0) {
            return Err(("contdep.eps", "amplitudes must be nonzero".into()));
        }
        if self.sweep.lambdas.is_empty() || self.sweep.lambdas.iter().any(|l| !(*l > 0.0)) {
            return Err(("sweep.lambdas", "levels must be positive".into()));
        }
        if self.sweep.levels < 1 {
            return Err(("sweep.levels", "at least one refinement is required".into()));
        }
        for (key, t) in [("sweep.threshold", self.sweep.threshold), ("contdep.threshold", self.contdep.threshold)] {
            if !(t > 0.0) {
                return Err((key, format!("must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Canonical text: every key in [`KEYS`] order; reparses to an equal config.
    pub fn emit(&self) -> String {
        let s = &self.scheme;
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("tau", num(s.tau));
        put("r", num(s.r));
        put("sigma", num(s.sigma));
        put("final_time", num(s.final_time));
        put("steps", s.steps.to_string());
        put("lambda", num(s.lambda));
        put("inner_tol_abs", num(s.inner_tol_abs));
        put("inner_tol_rel", num(s.inner_tol_rel));
        put("newton_max_iter", s.newton_max_iter.to_string());
        put("fallback_max_iter", s.fallback_max_iter.to_string());
        put("m0_guard", s.m0_guard.to_string());
        put("m0_bound", self.m0_bound.map_or("none".into(), num));
        for (name, spec) in [("operator_a", &self.operator_a), ("operator_b", &self.operator_b)] {
            put(&format!("{name}.bc"), spec.bc.to_string());
            put(&format!("{name}.power_offset"), spec.power_offset.to_string());
            put(&format!("{name}.lengths"), join(&spec.lengths));
            put(&format!("{name}.n_modes"), spec.n_modes.to_string());
        }
        put("potential.kind", self.potential.kind.to_string());
        put("potential.c1", num(self.potential.c1));
        put("potential.c2", num(self.potential.c2));
        put("y0", self.y0.to_string());
        put("forcing", self.forcing.to_string());
        put("output_dir", self.output_dir.clone());
        put("seed", self.seed.to_string());
        put("snapshot_stride", self.snapshot_stride.to_string());
        put("sweep.levels", self.sweep.levels.to_string());
        put("sweep.lambdas", join(&self.sweep.lambdas));
        put("sweep.threshold", num(self.sweep.threshold));
        put("contdep.eps", join(&self.contdep.eps));
        put("contdep.mode", self.contdep.mode.to_string());
        put("contdep.threshold", num(self.contdep.threshold));
        out
    }

    pub fn build_scheme(&self) -> Result<Arc<Scheme>, String> {
        let a = self.operator_a.build().map_err(|e| e.to_string())?;
        let b = self.operator_b.build().map_err(|e| e.to_string())?;
        let potential = self.potential.build().map_err(|e| e.to_string())?;
        Scheme::new(a, b, potential, self.scheme.clone())
            .map(Arc::new)
            .map_err(|e| e.to_string())
    }

    pub fn initial_field(&self, scheme: &Scheme) -> Result<Field, String> {
        self.y0.field(scheme.b())
    }

    pub fn forcing_samples(&self, scheme: &Scheme) -> Vec<Field> {
        let c = scheme.config();
        sample_forcing(
            |t| self.forcing.at(scheme.b(), t, c.final_time),
            c.steps,
            c.h(),
        )
    }
}

/// Parses a configuration file; later validation errors cite the line that set the key.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |key: Option<&str>, message: String| ConfigError {
            line: Some(line_no),
            key: key.map(str::to_string),
            message,
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(None, format!("expected 'key = value', found '{line}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(Some(key), "missing value".into()));
        }
        if let Some(prev) = seen.insert(key.to_string(), line_no) {
            return Err(err(Some(key), format!("duplicate key (first set on line {prev})")));
        }
        cfg.set(key, value).map_err(|m| err(Some(key), m))?;
    }
    cfg.validate().map_err(|(key, message)| ConfigError {
        line: seen.get(key).copied(),
        key: Some(key.to_string()),
        message,
    })?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("# nothing but a comment\n\n").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.scheme.inner_tol_abs, 1e-10);
        assert_eq!(cfg.sweep.lambdas, vec![0.1, 0.05, 0.025]);
    }

    #[test]
    fn tau_out_of_range_cites_line() {
        let err = parse_config("steps = 10\ntau = 2\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert_eq!(err.key.as_deref(), Some("tau"));
        assert!(err.message.contains("[0, 1]"));
        assert!(err.to_string().starts_with("line 2: tau:"));
    }

    #[test]
    fn syntax_errors() {
        assert_eq!(parse_config("tau 0.5").unwrap_err().line, Some(1));
        let e = parse_config("\nbogus = 1").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (Some(2), "unknown key"));
        assert!(parse_config("tau = 0.5\ntau = 0.3").unwrap_err().message.contains("duplicate"));
        assert!(parse_config("steps = -3").is_err());
        assert!(parse_config("y0 = wave:3").is_err());
        assert!(parse_config("forcing = ramp-mode:0:1").is_err());
        assert!(parse_config("operator_a.power_offset = 0").is_err());
        assert!(parse_config("operator_b.n_modes = 16").is_err());
        assert!(parse_config("potential.kind = logarithmic\npotential.c1 = 0.5").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "tau = 0.25\nlambda = 0.1\noperator_a.bc = dirichlet\noperator_a.lengths = 2.0,1.5\n\
                    operator_b.lengths = 2.0,1.5\noperator_a.n_modes = 6\noperator_b.n_modes = 6\n\
                    potential.kind = double_obstacle\npotential.c2 = 0.75\ny0 = bump:0.3:0.1\n\
                    forcing = ramp-mode:3:-0.2\nm0_bound = 12.5\nseed = 42\nsweep.lambdas = 0.2,0.1\n";
        let cfg = parse_config(text).unwrap();
        let emitted = cfg.emit();
        assert_eq!(parse_config(&emitted).unwrap(), cfg);
        assert_eq!(parse_config(&emitted).unwrap().emit(), emitted);
        let coeffs = parse_config("y0 = coefficients:0.1,1e-7,-3").unwrap();
        assert_eq!(parse_config(&coeffs.emit()).unwrap(), coeffs);
    }

    #[test]
    fn profiles_build_fields() {
        let cfg = parse_config("y0 = bump:0.5:0.2\nforcing = ramp-mode:2:1.0\noperator_a.n_modes = 8\noperator_b.n_modes = 8")
            .unwrap();
        let scheme = cfg.build_scheme().unwrap();
        let y0 = cfg.initial_field(&scheme).unwrap();
        assert!((y0.mean() - 0.2).abs() < 1e-12);
        let u = cfg.forcing_samples(&scheme);
        assert_eq!(u.len(), cfg.scheme.steps + 1);
        assert!((u.last().unwrap().coefficients()[1] - 1.0).abs() < 1e-15);
        assert_eq!(u[0].norm(), 0.0);
    }
}
