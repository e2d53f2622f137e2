//! Discrete calculus tools used by the stability estimates.

use serde::Serialize;

use super::DiagnosticsError;

/// `M exp(Σ_{n<k} bₙ)` for `k = 0..=b.len()`.
pub fn discrete_gronwall(m: f64, b: &[f64]) -> Result<Vec<f64>, DiagnosticsError> {
    if !(m >= 0.0) {
        return Err(DiagnosticsError::Negative("M"));
    }
    if b.iter().any(|v| !(*v >= 0.0)) {
        return Err(DiagnosticsError::Negative("b"));
    }
    let mut out = Vec::with_capacity(b.len() + 1);
    let mut partial = 0.0;
    out.push(m);
    for v in b {
        partial += v;
        out.push(m * partial.exp());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GronwallCheck {
    /// `aₖ ≤ M + Σ_{n<k} bₙaₙ` for every `k`.
    pub hypothesis: bool,
    /// `aₖ ≤ M exp(Σ_{n<k} bₙ)` for every `k`.
    pub conclusion: bool,
    /// Smallest `M exp(Σ bₙ) − aₖ` over `k`.
    pub min_margin: f64,
}

/// Tests a sequence `a₀..a_N` against both sides of the Gronwall implication; `b` holds
/// `b₀..b_{N−1}`.
pub fn gronwall_check(m: f64, a: &[f64], b: &[f64]) -> Result<GronwallCheck, DiagnosticsError> {
    if a.len() != b.len() + 1 {
        return Err(DiagnosticsError::LengthMismatch {
            expected: b.len() + 1,
            found: a.len(),
        });
    }
    if a.iter().any(|v| !(*v >= 0.0)) {
        return Err(DiagnosticsError::Negative("a"));
    }
    let bounds = discrete_gronwall(m, b)?;
    let mut hypothesis = true;
    let mut running = m;
    for k in 0..a.len() {
        let slack = 1e-14 * running.abs().max(1.0);
        hypothesis &= a[k] <= running + slack;
        if k < b.len() {
            running += b[k] * a[k];
        }
    }
    let min_margin = bounds
        .iter()
        .zip(a)
        .map(|(bound, ak)| bound - ak)
        .fold(f64::INFINITY, f64::min);
    let conclusion = bounds
        .iter()
        .zip(a)
        .all(|(bound, ak)| *ak <= bound * (1.0 + 1e-14));
    Ok(GronwallCheck {
        hypothesis,
        conclusion,
        min_margin,
    })
}

/// Both sides of the summation by parts formula
/// `Σ_{n=0}^{k−1} a_{n+1}(b_{n+1} − bₙ) = a_k b_k − a₁b₀ − Σ_{n=1}^{k−1}(a_{n+1} − aₙ)bₙ`.
///
/// `a` holds `a₁..a_k`, `b` holds `b₀..b_k`.
pub fn summation_by_parts_check(a: &[f64], b: &[f64]) -> Result<(f64, f64), DiagnosticsError> {
    let k = a.len();
    if k == 0 || b.len() != k + 1 {
        return Err(DiagnosticsError::LengthMismatch {
            expected: k + 1,
            found: b.len(),
        });
    }
    // a[i] is a_{i+1}
    let lhs = (0..k).map(|n| a[n] * (b[n + 1] - b[n])).sum();
    let trailing: f64 = (1..k).map(|n| (a[n] - a[n - 1]) * b[n]).sum();
    let rhs = a[k - 1] * b[k] - a[0] * b[0] - trailing;
    Ok((lhs, rhs))
}

/// Scale for comparing the two sides of [`summation_by_parts_check`].
pub fn summation_by_parts_scale(a: &[f64], b: &[f64]) -> f64 {
    let ma = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mb = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (a.len().max(1) as f64) * ma * mb
}

/// `(a(a − b), a²/2 + (a − b)²/2 − b²/2)`.
pub fn elementary_identity(a: f64, b: f64) -> (f64, f64) {
    (a * (a - b), 0.5 * a * a + 0.5 * (a - b) * (a - b) - 0.5 * b * b)
}

/// `δa² + b²/(4δ) − ab`, nonnegative for `δ > 0`.
pub fn young_gap(a: f64, b: f64, delta: f64) -> f64 {
    delta * a * a + b * b / (4.0 * delta) - a * b
}
