//! Double-well potentials `f = β̂ + π̂` and their Moreau–Yosida regularizations.
//!
//! `β̂` is convex, lower semicontinuous and vanishes at 0; `π = π̂'` is Lipschitz. For a
//! level `λ > 0`, [`YosidaView`] exposes the resolvent `J_λ = (I + λβ)^{-1}`, the Yosida
//! approximation `β_λ = (I − J_λ)/λ` and its primitive `β̂_λ`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("logarithmic potential needs c1 > 1, got {0}")]
    LogarithmicParameter(f64),
    #[error("double obstacle potential needs c2 > 0, got {0}")]
    ObstacleParameter(f64),
    #[error("Yosida level must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("resolvent solver did not converge at s = {0}")]
    ResolventNonconvergence(f64),
    #[error("no coercivity certificate at lambda = {lambda}: tail ratio {tail_ratio}")]
    CoercivityFailed { lambda: f64, tail_ratio: f64 },
    #[error("{m0} is not interior to D(beta) with margin {delta0}")]
    NotInterior { m0: f64, delta0: f64 },
}

/// Effective domain of `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };

    pub fn contains(&self, s: f64) -> bool {
        let above = if self.lo_closed { s >= self.lo } else { s > self.lo };
        let below = if self.hi_closed { s <= self.hi } else { s < self.hi };
        above && below
    }

    pub fn interior_contains(&self, s: f64) -> bool {
        s > self.lo && s < self.hi
    }

    /// Distance from `s` to the boundary (infinite for the real line).
    pub fn boundary_distance(&self, s: f64) -> f64 {
        (s - self.lo).min(self.hi - s)
    }
}

/// User-supplied smooth convex part with full domain.
pub struct CustomWell {
    pub name: String,
    pub beta_hat: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub beta: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub beta_prime: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub pi_hat: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub pi: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub pi_prime: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub lipschitz_pi: f64,
}

impl fmt::Debug for CustomWell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWell")
            .field("name", &self.name)
            .field("lipschitz_pi", &self.lipschitz_pi)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Well {
    /// `(s² − 1)²/4 = s⁴/4 + (1/4 − s²/2)`.
    Regular,
    /// `(1+s)ln(1+s) + (1−s)ln(1−s) − c₁s²`.
    Logarithmic { c1: f64 },
    /// Indicator of `[−1, 1]` plus `−c₂s²`.
    DoubleObstacle { c2: f64 },
    Custom(Arc<CustomWell>),
}

#[derive(Debug, Clone)]
pub struct Potential {
    well: Well,
}

/// Descriptive metadata recorded alongside outputs.
#[derive(Debug, Clone, Serialize)]
pub struct PotentialInfo {
    pub kind: String,
    pub parameter: Option<f64>,
    pub convex_part: &'static str,
    pub smooth_part: &'static str,
    pub lipschitz_pi: f64,
}

// log-well resolvent stays inside (−1 + GUARD, 1 − GUARD)
const LOG_GUARD: f64 = 1e-15;
const RESOLVENT_MAX_ITER: usize = 100;

impl Potential {
    pub fn regular() -> Self {
        Potential { well: Well::Regular }
    }

    pub fn logarithmic(c1: f64) -> Result<Self, PotentialError> {
        if !(c1 > 1.0) {
            return Err(PotentialError::LogarithmicParameter(c1));
        }
        Ok(Potential {
            well: Well::Logarithmic { c1 },
        })
    }

    pub fn double_obstacle(c2: f64) -> Result<Self, PotentialError> {
        if !(c2 > 0.0) {
            return Err(PotentialError::ObstacleParameter(c2));
        }
        Ok(Potential {
            well: Well::DoubleObstacle { c2 },
        })
    }

    pub fn custom(well: CustomWell) -> Self {
        Potential {
            well: Well::Custom(Arc::new(well)),
        }
    }

    pub fn well(&self) -> &Well {
        &self.well
    }

    pub fn info(&self) -> PotentialInfo {
        let (kind, parameter, convex_part, smooth_part) = match &self.well {
            Well::Regular => ("regular".to_string(), None, "s^4/4", "1/4 - s^2/2"),
            Well::Logarithmic { c1 } => (
                "logarithmic".to_string(),
                Some(*c1),
                "(1+s)ln(1+s)+(1-s)ln(1-s)",
                "-c1 s^2",
            ),
            Well::DoubleObstacle { c2 } => (
                "double_obstacle".to_string(),
                Some(*c2),
                "indicator of [-1,1]",
                "-c2 s^2",
            ),
            Well::Custom(w) => (w.name.clone(), None, "custom", "custom"),
        };
        PotentialInfo {
            kind,
            parameter,
            convex_part,
            smooth_part,
            lipschitz_pi: self.lipschitz_pi(),
        }
    }

    /// `D(β)`.
    pub fn beta_domain(&self) -> Interval {
        match self.well {
            Well::Regular | Well::Custom(_) => Interval::REAL_LINE,
            Well::Logarithmic { .. } => Interval {
                lo: -1.0,
                hi: 1.0,
                lo_closed: false,
                hi_closed: false,
            },
            Well::DoubleObstacle { .. } => Interval {
                lo: -1.0,
                hi: 1.0,
                lo_closed: true,
                hi_closed: true,
            },
        }
    }

    /// `β̂(s)`, `+∞` outside its effective domain.
    pub fn beta_hat(&self, s: f64) -> f64 {
        match &self.well {
            Well::Regular => 0.25 * s.powi(4),
            Well::Logarithmic { .. } => {
                if s.abs() > 1.0 {
                    f64::INFINITY
                } else {
                    xlogx(1.0 + s) + xlogx(1.0 - s)
                }
            }
            Well::DoubleObstacle { .. } => {
                if s.abs() <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Well::Custom(w) => (w.beta_hat)(s),
        }
    }

    /// `β̂(s)` with values within rounding (`1e-12·(1+|s|)`) of a finite endpoint of the
    /// effective domain pulled back onto it.
    pub fn beta_hat_rounded(&self, s: f64) -> f64 {
        let v = self.beta_hat(s);
        if v.is_finite() {
            return v;
        }
        let dom = self.beta_domain();
        let pulled = s.clamp(dom.lo, dom.hi);
        if (s - pulled).abs() <= 1e-12 * (1.0 + s.abs()) {
            self.beta_hat(pulled)
        } else {
            v
        }
    }

    /// Minimal section `β°(s)`; `None` outside `D(β)`.
    pub fn beta_min_section(&self, s: f64) -> Option<f64> {
        if !self.beta_domain().contains(s) {
            return None;
        }
        Some(match &self.well {
            Well::Regular => s.powi(3),
            Well::Logarithmic { .. } => log_beta(s),
            Well::DoubleObstacle { .. } => 0.0,
            Well::Custom(w) => (w.beta)(s),
        })
    }

    /// Derivative of the single-valued part of `β` (used by the resolvent solvers).
    fn beta_prime(&self, s: f64) -> f64 {
        match &self.well {
            Well::Regular => 3.0 * s * s,
            Well::Logarithmic { .. } => 2.0 / ((1.0 - s) * (1.0 + s)),
            Well::DoubleObstacle { .. } => 0.0,
            Well::Custom(w) => (w.beta_prime)(s),
        }
    }

    pub fn pi_hat(&self, s: f64) -> f64 {
        match &self.well {
            Well::Regular => 0.25 - 0.5 * s * s,
            Well::Logarithmic { c1 } => -c1 * s * s,
            Well::DoubleObstacle { c2 } => -c2 * s * s,
            Well::Custom(w) => (w.pi_hat)(s),
        }
    }

    pub fn pi(&self, s: f64) -> f64 {
        match &self.well {
            Well::Regular => -s,
            Well::Logarithmic { c1 } => -2.0 * c1 * s,
            Well::DoubleObstacle { c2 } => -2.0 * c2 * s,
            Well::Custom(w) => (w.pi)(s),
        }
    }

    pub fn pi_prime(&self, s: f64) -> f64 {
        match &self.well {
            Well::Regular => -1.0,
            Well::Logarithmic { c1 } => -2.0 * c1,
            Well::DoubleObstacle { c2 } => -2.0 * c2,
            Well::Custom(w) => (w.pi_prime)(s),
        }
    }

    /// `L_π`.
    pub fn lipschitz_pi(&self) -> f64 {
        match &self.well {
            Well::Regular => 1.0,
            Well::Logarithmic { c1 } => 2.0 * c1,
            Well::DoubleObstacle { c2 } => 2.0 * c2,
            Well::Custom(w) => w.lipschitz_pi,
        }
    }

    /// `L'_π = L_π + 1`.
    pub fn lipschitz_pi_prime(&self) -> f64 {
        self.lipschitz_pi() + 1.0
    }

    /// The full potential `β̂ + π̂`.
    pub fn energy_density(&self, s: f64) -> f64 {
        self.beta_hat(s) + self.pi_hat(s)
    }

    /// Largest Yosida level for which the canonical wells are certified coercive.
    pub fn lambda_threshold(&self) -> f64 {
        1.0 / (4.0 * self.lipschitz_pi())
    }

    pub fn yosida(&self, lambda: f64) -> Result<YosidaView, PotentialError> {
        if !(lambda > 0.0) {
            return Err(PotentialError::NonPositiveLambda(lambda));
        }
        if lambda > self.lambda_threshold() {
            log::warn!(
                "lambda = {lambda} exceeds 1/(4 L_pi) = {}; coercivity is not guaranteed",
                self.lambda_threshold()
            );
        }
        Ok(YosidaView {
            potential: self.clone(),
            lambda,
        })
    }
}

/// Outcome of one resolvent evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventValue {
    pub value: f64,
    /// The log-well solver stopped at its guard `±(1 − 1e−15)`.
    pub guard_hit: bool,
}

/// `β` regularized at a fixed level `λ`.
#[derive(Debug, Clone)]
pub struct YosidaView {
    potential: Potential,
    lambda: f64,
}

/// Constants with `β̂_λ(s) + π̂(s) ≥ α s² − C` on the certification grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityCertificate {
    pub alpha: f64,
    pub c: f64,
    pub tail_ratio: f64,
}

impl YosidaView {
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `J_λ(s)`, the unique `J` with `J + λβ(J) ∋ s`.
    pub fn resolvent(&self, s: f64) -> f64 {
        self.resolvent_detailed(s)
            .expect("resolvent converges for monotone wells")
            .value
    }

    pub fn resolvent_detailed(&self, s: f64) -> Result<ResolventValue, PotentialError> {
        let lambda = self.lambda;
        let p = &self.potential;
        match &p.well {
            Well::DoubleObstacle { .. } => Ok(ResolventValue {
                value: s.clamp(-1.0, 1.0),
                guard_hit: false,
            }),
            Well::Regular => Ok(ResolventValue {
                value: regular_resolvent(lambda, s),
                guard_hit: false,
            }),
            Well::Logarithmic { .. } => {
                let edge = 1.0 - LOG_GUARD;
                let g_edge = edge + lambda * log_beta(edge);
                if s >= g_edge {
                    return Ok(ResolventValue {
                        value: edge,
                        guard_hit: true,
                    });
                }
                if s <= -g_edge {
                    return Ok(ResolventValue {
                        value: -edge,
                        guard_hit: true,
                    });
                }
                let guess = (s / (1.0 + 2.0 * lambda)).clamp(-edge, edge);
                bracketed_newton(s, guess, (-edge, edge), |j| {
                    (j + lambda * log_beta(j), 1.0 + lambda * p.beta_prime(j))
                })
                    .map(|value| ResolventValue {
                        value,
                        guard_hit: false,
                    })
            }
            Well::Custom(w) => {
                let w = Arc::clone(w);
                bracketed_newton(s, s, (f64::NEG_INFINITY, f64::INFINITY), move |j| {
                    (j + lambda * (w.beta)(j), 1.0 + lambda * (w.beta_prime)(j))
                })
                .map(|value| ResolventValue {
                    value,
                    guard_hit: false,
                })
            }
        }
    }

    /// `β_λ(s) = (s − J_λ(s))/λ`.
    pub fn yosida(&self, s: f64) -> f64 {
        (s - self.resolvent(s)) / self.lambda
    }

    /// A generalized derivative of `β_λ` (slopes 0 and `1/λ` for the obstacle graph).
    pub fn yosida_slope(&self, s: f64) -> f64 {
        let lambda = self.lambda;
        match &self.potential.well {
            Well::DoubleObstacle { .. } => {
                if s.abs() > 1.0 {
                    1.0 / lambda
                } else {
                    0.0
                }
            }
            Well::Logarithmic { .. } => {
                let j = self.resolvent(s);
                2.0 / ((1.0 - j) * (1.0 + j) + 2.0 * lambda)
            }
            _ => {
                let d = self.potential.beta_prime(self.resolvent(s));
                d / (1.0 + lambda * d)
            }
        }
    }

    /// `β̂_λ(s) = (λ/2) β_λ(s)² + β̂(J_λ(s))`.
    pub fn envelope(&self, s: f64) -> f64 {
        let j = self.resolvent(s);
        let b = (s - j) / self.lambda;
        0.5 * self.lambda * b * b + self.potential.beta_hat(j)
    }

    /// Certifies coercivity of `β̂_λ + π̂` on a log-spaced grid over `[−10³, 10³]`.
    ///
    /// `α` is half the smallest ratio `(β̂_λ + π̂)(s)/s²` over `|s| ≥ 10²`; `C` is the
    /// smallest constant making the inequality hold at every grid point.
    pub fn coercivity_certificate(&self) -> Result<CoercivityCertificate, PotentialError> {
        let grid = certification_grid();
        let g = |s: f64| self.envelope(s) + self.potential.pi_hat(s);
        let tail_ratio = grid
            .iter()
            .filter(|s| s.abs() >= 100.0)
            .map(|&s| g(s) / (s * s))
            .fold(f64::INFINITY, f64::min);
        if !(tail_ratio > 0.0) {
            return Err(PotentialError::CoercivityFailed {
                lambda: self.lambda,
                tail_ratio,
            });
        }
        let alpha = 0.5 * tail_ratio;
        let c = grid
            .iter()
            .map(|&s| alpha * s * s - g(s))
            .fold(0.0, f64::max);
        Ok(CoercivityCertificate {
            alpha,
            c,
            tail_ratio,
        })
    }
}

/// Symmetric grid: 0 and ±10^k for 400 log-spaced exponents in [−3, 3].
pub fn certification_grid() -> Vec<f64> {
    let n = 400;
    let mut grid = vec![0.0];
    for i in 0..n {
        let s = 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64);
        grid.push(s);
        grid.push(-s);
    }
    grid
}

/// Half the distance from `m0` to the boundary of `D(β)` (1 for an unbounded domain).
pub fn default_delta0(potential: &Potential, m0: f64) -> Result<f64, PotentialError> {
    let dom = potential.beta_domain();
    if !dom.interior_contains(m0) {
        return Err(PotentialError::NotInterior { m0, delta0: 0.0 });
    }
    let d = dom.boundary_distance(m0);
    Ok(if d.is_finite() { 0.5 * d } else { 1.0 })
}

/// A `C₀ ≥ 0` with `β_λ(s)(s − m₀) ≥ δ₀|β_λ(s)| − C₀` for every real `s` and every listed
/// level, up to the rounding of `β_λ` at cell endpoints.
///
/// With `β_λ(0) = 0` and `β_λ` nondecreasing the defect `|β_λ|(δ₀ − sgn(β_λ)(s − m₀))` is
/// positive only between `0` and `m₀ ± δ₀`. On a cell not straddling 0 it is bounded by
/// the product of the endpoint maxima of the monotone factor `|β_λ|` and the linear factor.
pub fn mean_interior_constant(
    potential: &Potential,
    m0: f64,
    delta0: f64,
    lambdas: &[f64],
) -> Result<f64, PotentialError> {
    let dom = potential.beta_domain();
    if !(delta0 > 0.0 && dom.contains(m0 - delta0) && dom.contains(m0 + delta0)) {
        return Err(PotentialError::NotInterior { m0, delta0 });
    }
    let lo = (m0 - delta0).min(0.0);
    let hi = (m0 + delta0).max(0.0);
    let cells = 20_000;
    let mut nodes: Vec<f64> = (0..=cells)
        .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
        .chain([0.0, m0])
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut c0: f64 = 0.0;
    for &lambda in lambdas {
        let view = potential.yosida(lambda)?;
        let sign = |a: f64, b: f64| if a + b < 0.0 { -1.0 } else { 1.0 };
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let s = sign(a, b);
            let size = view.yosida(a).abs().max(view.yosida(b).abs());
            let factor = (delta0 - s * (a - m0)).max(delta0 - s * (b - m0));
            c0 = c0.max(size * factor);
        }
    }
    Ok(c0)
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn log_beta(s: f64) -> f64 {
    s.ln_1p() - (-s).ln_1p()
}

/// Root of `J + λJ³ = s` by Cardano's formula, polished by Newton.
fn regular_resolvent(lambda: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    // J³ + pJ + q = 0 with p = 1/λ, q = −s/λ
    let p = 1.0 / lambda;
    let half_q = 0.5 * s.abs() / lambda;
    let disc = (half_q * half_q + p * p * p / 27.0).sqrt();
    let t = (half_q + disc).cbrt();
    let mut j = s.signum() * (t - p / (3.0 * t));
    for _ in 0..4 {
        let g = j + lambda * j * j * j - s;
        let dg = 1.0 + 3.0 * lambda * j * j;
        let step = g / dg;
        j -= step;
        if step.abs() <= f64::EPSILON * j.abs() {
            break;
        }
    }
    j
}

/// Newton safeguarded by bisection for the increasing map `g`, with the root bracketed
/// between 0 and `s` (valid because `0 ∈ β(0)`) and clipped to `limits`.
fn bracketed_newton(
    s: f64,
    guess: f64,
    limits: (f64, f64),
    g: impl Fn(f64) -> (f64, f64),
) -> Result<f64, PotentialError> {
    let (lo, hi) = if s < 0.0 { (s, 0.0) } else { (0.0, s) };
    let (mut lo, mut hi) = (lo.max(limits.0), hi.min(limits.1));
    let mut j = guess.clamp(lo, hi);
    for _ in 0..RESOLVENT_MAX_ITER {
        let (val, slope) = g(j);
        let res = val - s;
        if res == 0.0 {
            return Ok(j);
        }
        if res > 0.0 {
            hi = j;
        } else {
            lo = j;
        }
        let mut next = j - res / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let tiny_step = (next - j).abs() <= 2.0 * f64::EPSILON * j.abs().max(1e-300);
        if tiny_step || hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()) {
            return Ok(next);
        }
        j = next;
    }
    Err(PotentialError::ResolventNonconvergence(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wells() -> Vec<Potential> {
        vec![
            Potential::regular(),
            Potential::logarithmic(2.0).unwrap(),
            Potential::double_obstacle(1.0).unwrap(),
        ]
    }

    #[test]
    fn canonical_examples() {
        let reg = Potential::regular();
        assert_eq!(reg.beta_min_section(2.0), Some(8.0));
        let log = Potential::logarithmic(2.0).unwrap();
        assert_eq!(log.beta_min_section(0.0), Some(0.0));
        assert_eq!(log.pi(0.5), -2.0);
        assert!((log.beta_hat(1.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!(log.beta_hat(1.5).is_infinite());
        let obs = Potential::double_obstacle(1.0).unwrap();
        assert_eq!(obs.beta_domain().lo, -1.0);
        assert!(obs.beta_domain().hi_closed);
        assert_eq!(obs.beta_min_section(1.0), Some(0.0));
        assert_eq!(obs.beta_min_section(1.5), None);
        // the splitting reproduces the classical quartic well
        for s in [-1.7, -0.3, 0.0, 0.9, 2.2] {
            let f = 0.25 * (s * s - 1.0f64).powi(2);
            assert!((reg.energy_density(s) - f).abs() < 1e-13);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            Potential::logarithmic(1.0),
            Err(PotentialError::LogarithmicParameter(_))
        ));
        assert!(matches!(
            Potential::double_obstacle(0.0),
            Err(PotentialError::ObstacleParameter(_))
        ));
        assert!(Potential::regular().yosida(0.0).is_err());
    }

    #[test]
    fn resolvent_examples() {
        let reg = Potential::regular().yosida(1.0).unwrap();
        assert!((reg.resolvent(2.0) - 1.0).abs() < 1e-14);
        assert!((reg.yosida(2.0) - 1.0).abs() < 1e-14);
        let obs = Potential::double_obstacle(1.0).unwrap().yosida(0.5).unwrap();
        assert_eq!(obs.resolvent(2.0), 1.0);
        assert_eq!(obs.yosida(2.0), 2.0);
        assert_eq!(obs.yosida(0.3), 0.0);
        assert_eq!(obs.envelope(2.0), 1.0);
    }

    #[test]
    fn log_resolvent_against_bisection() {
        let view = Potential::logarithmic(2.0).unwrap().yosida(0.1).unwrap();
        // bisection oracle on J + 0.1 ln((1+J)/(1−J)) = 0.9
        let (mut lo, mut hi): (f64, f64) = (-1.0 + 1e-15, 1.0 - 1e-15);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let g = mid + 0.1 * ((1.0 + mid) / (1.0 - mid)).ln() - 0.9;
            if g > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((view.resolvent(0.9) - 0.5 * (lo + hi)).abs() < 1e-13);
    }

    #[test]
    fn log_guard_reported() {
        let view = Potential::logarithmic(2.0).unwrap().yosida(0.01).unwrap();
        let r = view.resolvent_detailed(5.0).unwrap();
        assert!(r.guard_hit);
        assert!((view.yosida(5.0) - 400.0).abs() < 1e-9);
    }

    #[test]
    fn envelope_zero_and_quadrature() {
        for p in wells() {
            let v = p.yosida(0.2).unwrap();
            assert_eq!(v.envelope(0.0), 0.0);
        }
        // composite Simpson of ∫₀^{1.5} β_λ
        let v = Potential::regular().yosida(0.2).unwrap();
        let n = 2000;
        let h = 1.5 / n as f64;
        let mut acc = v.yosida(0.0) + v.yosida(1.5);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * v.yosida(i as f64 * h);
        }
        let quad = acc * h / 3.0;
        assert!((quad - v.envelope(1.5)).abs() < 1e-8);
    }

    #[test]
    fn firm_nonexpansive_and_lipschitz() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for p in wells() {
            let lambda = 0.05;
            let v = p.yosida(lambda).unwrap();
            for _ in 0..10_000 {
                let a: f64 = rng.gen_range(-3.0..3.0);
                let b: f64 = rng.gen_range(-3.0..3.0);
                let dj = (v.resolvent(a) - v.resolvent(b)).abs();
                assert!(dj <= (a - b).abs() * (1.0 + 1e-12) + 1e-15);
                let db = (v.yosida(a) - v.yosida(b)).abs();
                assert!(db <= (a - b).abs() / lambda * (1.0 + 1e-9) + 1e-12);
            }
        }
    }

    #[test]
    fn derivative_consistency() {
        let eps = 1e-5;
        for p in wells() {
            let v = p.yosida(0.1).unwrap();
            for i in 0..200 {
                let s = -2.5 + 5.0 * i as f64 / 199.0;
                // skip the obstacle kinks at ±1
                if matches!(p.well(), Well::DoubleObstacle { .. }) && ((s.abs() - 1.0).abs() < 2.0 * eps) {
                    continue;
                }
                let fd = (v.envelope(s + eps) - v.envelope(s - eps)) / (2.0 * eps);
                let b = v.yosida(s);
                assert!((fd - b).abs() <= 1e-4 * (1.0 + b.abs()), "{:?} s={s}", p.well());
                let slope_fd = (v.yosida(s + eps) - v.yosida(s - eps)) / (2.0 * eps);
                if !matches!(p.well(), Well::DoubleObstacle { .. }) {
                    assert!((slope_fd - v.yosida_slope(s)).abs() <= 1e-4 * (1.0 + slope_fd.abs()));
                }
            }
        }
    }

    #[test]
    fn coercivity_certificates() {
        let c = Potential::regular().yosida(0.1).unwrap().coercivity_certificate().unwrap();
        assert!(c.alpha > 0.0);
        let obs = Potential::double_obstacle(1.0).unwrap().yosida(0.01).unwrap();
        let cert = obs.coercivity_certificate().unwrap();
        for s in certification_grid() {
            let g = obs.envelope(s) + obs.potential().pi_hat(s);
            assert!(g >= cert.alpha * s * s - cert.c - 1e-9 * (1.0 + s * s));
        }
        assert!(obs.potential().pi_hat(0.0) >= -cert.c);
        // far beyond the threshold the quadratic part loses to −c₂ s²
        let bad = Potential::double_obstacle(1.0).unwrap().yosida(2.0).unwrap();
        assert!(matches!(
            bad.coercivity_certificate(),
            Err(PotentialError::CoercivityFailed { .. })
        ));
    }

    #[test]
    fn mean_interior_constant_obstacle() {
        let obs = Potential::double_obstacle(1.0).unwrap();
        let c0 = mean_interior_constant(&obs, 0.0, 0.5, &[0.1, 0.01]).unwrap();
        assert!(c0.is_finite() && c0 >= 0.0);
        assert!(mean_interior_constant(&obs, 0.8, 0.5, &[0.1]).is_err());
        assert_eq!(default_delta0(&obs, 0.0).unwrap(), 0.5);
        assert_eq!(default_delta0(&Potential::regular(), 3.0).unwrap(), 1.0);
        assert!(default_delta0(&obs, 1.0).is_err());
    }

    #[test]
    fn custom_well_matches_regular() {
        let custom = Potential::custom(CustomWell {
            name: "quartic".into(),
            beta_hat: Box::new(|s| 0.25 * s.powi(4)),
            beta: Box::new(|s| s.powi(3)),
            beta_prime: Box::new(|s| 3.0 * s * s),
            pi_hat: Box::new(|s| 0.25 - 0.5 * s * s),
            pi: Box::new(|s| -s),
            pi_prime: Box::new(|_| -1.0),
            lipschitz_pi: 1.0,
        });
        let a = custom.yosida(0.1).unwrap();
        let b = Potential::regular().yosida(0.1).unwrap();
        for s in [-4.0, -0.7, 0.0, 0.2, 3.3] {
            assert!((a.resolvent(s) - b.resolvent(s)).abs() < 1e-13);
            assert!((a.yosida_slope(s) - b.yosida_slope(s)).abs() < 1e-10);
        }
    }
}
