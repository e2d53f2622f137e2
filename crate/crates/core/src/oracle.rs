//! Slow reference implementations used to certify the fast paths.
//!
//! Nothing here reuses the spectral transforms, the resolvent solvers or the step solver:
//! eigenfunctions are resampled from their closed forms, operators are dense matrices
//! on grid values, and the step is solved by Newton with a finite-difference Jacobian.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::potentials::{Potential, Well};
use crate::spectra::{BoundaryCondition, DualElement, SpectralBasis};
use crate::stepper::{Scheme, State};

const DENSE_CAP: usize = 64;
const STEP_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle limited to {limit} modes, got {found}")]
    SizeCap { limit: usize, found: usize },
    #[error("could not bracket the resolvent at {0}")]
    Bracket(f64),
    #[error("dense Newton stopped after {iterations} iterations with residual {residual:e}")]
    Nonconvergence { iterations: usize, residual: f64 },
    #[error("input length {found} does not match {expected}")]
    Length { expected: usize, found: usize },
}

/// Eigenfunctions and eigenvalues resampled from the closed forms, in the basis's mode
/// order, with the midpoint nodes and weights rebuilt independently.
struct Samples {
    // n_nodes × M
    e: DMatrix<f64>,
    lambda: Vec<f64>,
    weights: Vec<f64>,
}

fn axis_value(bc: BoundaryCondition, k: usize, l: f64, x: f64) -> (f64, f64) {
    match bc {
        BoundaryCondition::Dirichlet => {
            let w = (k + 1) as f64 * PI / l;
            ((2.0 / l).sqrt() * (w * x).sin(), w * w)
        }
        BoundaryCondition::Neumann if k == 0 => (1.0 / l.sqrt(), 0.0),
        BoundaryCondition::Neumann => {
            let w = k as f64 * PI / l;
            ((2.0 / l).sqrt() * (w * x).cos(), w * w)
        }
    }
}

fn samples(basis: &SpectralBasis) -> Samples {
    let lengths = basis.lengths();
    let bc = basis.boundary_condition();
    let cells = 2 * basis.modes_per_axis();
    let axis = |l: f64| -> Vec<f64> { (0..cells).map(|q| (2 * q + 1) as f64 * l / (2 * cells) as f64).collect() };
    let mut nodes = Vec::new();
    if lengths.len() == 1 {
        nodes.extend(axis(lengths[0]).into_iter().map(|x| [x, 0.0]));
    } else {
        for x in axis(lengths[0]) {
            for y in axis(lengths[1]) {
                nodes.push([x, y]);
            }
        }
    }
    let cell_volume: f64 = lengths.iter().map(|l| l / cells as f64).product();
    let m = basis.len();
    let mut e = DMatrix::zeros(nodes.len(), m);
    let mut lambda = vec![0.0; m];
    for (j, idx) in basis.multi_index().iter().enumerate() {
        let mut lam = 0.0;
        for (q, node) in nodes.iter().enumerate() {
            let mut v = 1.0;
            lam = 0.0;
            for (axis_i, &l) in lengths.iter().enumerate() {
                let (val, ev) = axis_value(bc, idx[axis_i], l, node[axis_i]);
                v *= val;
                lam += ev;
            }
            e[(q, j)] = v;
        }
        lambda[j] = lam.powi(basis.power() as i32);
    }
    Samples {
        e,
        lambda,
        weights: vec![cell_volume; nodes.len()],
    }
}

fn frac_power(lam: f64, rho: f64) -> f64 {
    if lam == 0.0 {
        0.0
    } else {
        lam.powf(rho)
    }
}

/// `A^ρ` as a dense matrix acting on grid values: `E diag(λ^ρ) Eᵀ W`.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
    // E diag(λ^ρ) Eᵀ, the symmetric kernel
    kernel: DMatrix<f64>,
}

impl DenseOperator {
    pub fn new(basis: &SpectralBasis, rho: f64) -> Result<Self, OracleError> {
        if basis.len() > DENSE_CAP {
            return Err(OracleError::SizeCap {
                limit: DENSE_CAP,
                found: basis.len(),
            });
        }
        let s = samples(basis);
        let mut scaled = s.e.clone();
        for (j, lam) in s.lambda.iter().enumerate() {
            scaled.column_mut(j).scale_mut(frac_power(*lam, rho));
        }
        let kernel = &scaled * s.e.transpose();
        let matrix = &kernel * DMatrix::from_diagonal(&DVector::from_vec(s.weights));
        Ok(DenseOperator { matrix, kernel })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest `|K_{pq} − K_{qp}|` of the kernel.
    pub fn asymmetry(&self) -> f64 {
        (&self.kernel - self.kernel.transpose()).amax()
    }

    /// Smallest eigenvalue of the kernel.
    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (&self.kernel + self.kernel.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }
}

/// `A^ρ v` for grid values `v`.
pub fn dense_power_apply(op: &DenseOperator, v: &[f64]) -> Result<Vec<f64>, OracleError> {
    if v.len() != op.size() {
        return Err(OracleError::Length {
            expected: op.size(),
            found: v.len(),
        });
    }
    Ok((&op.matrix * DVector::from_column_slice(v)).as_slice().to_vec())
}

/// `sup_w ⟨f, w⟩ / ‖w‖_{A,r}` attained at the stationary point `w* = D⁻¹f` of the
/// diagonal metric, with `‖w*‖_{A,r}` measured through dense operators on the grid.
pub fn dual_norm_by_maximization(
    basis: &Arc<SpectralBasis>,
    r: f64,
    f: &DualElement,
) -> Result<f64, OracleError> {
    if f.pairings().len() != basis.len() {
        return Err(OracleError::Length {
            expected: basis.len(),
            found: f.pairings().len(),
        });
    }
    if f.pairings().iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let s = samples(basis);
    let null = s.lambda[0] == 0.0;
    let metric: Vec<f64> = s
        .lambda
        .iter()
        .enumerate()
        .map(|(j, &lam)| if null && j == 0 { 1.0 } else { frac_power(lam, 2.0 * r) })
        .collect();
    let w: Vec<f64> = f.pairings().iter().zip(&metric).map(|(v, d)| v / d).collect();
    let w_grid = &s.e * DVector::from_column_slice(&w);
    let op = DenseOperator::new(basis, r)?;
    let arw = dense_power_apply(&op, w_grid.as_slice())?;
    let mut norm_sq: f64 = arw.iter().zip(&s.weights).map(|(v, q)| q * v * v).sum();
    if null {
        let c1: f64 = w_grid
            .iter()
            .zip(s.e.column(0).iter())
            .zip(&s.weights)
            .map(|((v, e), q)| v * e * q)
            .sum();
        norm_sq += c1 * c1;
    }
    let pairing: f64 = f.pairings().iter().zip(&w).map(|(a, b)| a * b).sum();
    Ok(pairing / norm_sq.sqrt())
}

/// `J_λ(s)` by bisection on `J ↦ J + λβ(J) − s` until the bracket cannot shrink.
pub fn resolvent_bisection(potential: &Potential, lambda: f64, s: f64) -> Result<f64, OracleError> {
    if let Well::DoubleObstacle { .. } = potential.well() {
        return Ok(s.clamp(-1.0, 1.0));
    }
    let dom = potential.beta_domain();
    let g = |j: f64| -> Option<f64> { potential.beta_min_section(j).map(|b| j + lambda * b - s) };
    let (mut lo, mut hi) = if dom.lo.is_finite() && dom.hi.is_finite() {
        (next_up(dom.lo), next_down(dom.hi))
    } else {
        let mut width = s.abs() + 1.0;
        loop {
            let (a, b) = (s - width, s + width);
            match (g(a), g(b)) {
                (Some(ga), Some(gb)) if ga <= 0.0 && gb >= 0.0 => break (a, b),
                _ if width > 1e300 => return Err(OracleError::Bracket(s)),
                _ => width *= 2.0,
            }
        }
    };
    match (g(lo), g(hi)) {
        (Some(a), Some(b)) if a <= 0.0 && b >= 0.0 => {}
        // the root lies closer to an endpoint of D(β) than one ulp
        (Some(a), _) if a > 0.0 && dom.lo.is_finite() => return Ok(lo),
        (_, Some(b)) if b < 0.0 && dom.hi.is_finite() => return Ok(hi),
        _ => return Err(OracleError::Bracket(s)),
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid).ok_or(OracleError::Bracket(s))? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(if x >= 0.0 { x.to_bits() + 1 } else { x.to_bits() - 1 })
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// One step of the scheme from a dense reference solve.
#[derive(Debug, Clone)]
pub struct OracleStep {
    /// Coefficients in the eigenbasis of `B`.
    pub y: Vec<f64>,
    /// Coefficients in the eigenbasis of `A`.
    pub mu: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves the coupled step system by dense Newton with a central-difference Jacobian.
pub fn dense_step_solve(scheme: &Scheme, state: &State, u: &[f64]) -> Result<OracleStep, OracleError> {
    let (a, b) = (scheme.a(), scheme.b());
    let config = scheme.config();
    for len in [a.len(), b.len()] {
        if len > STEP_CAP {
            return Err(OracleError::SizeCap {
                limit: STEP_CAP,
                found: len,
            });
        }
    }
    if config.steps > STEP_CAP {
        return Err(OracleError::SizeCap {
            limit: STEP_CAP,
            found: config.steps,
        });
    }
    if u.len() != b.len() {
        return Err(OracleError::Length {
            expected: b.len(),
            found: u.len(),
        });
    }
    let sa = samples(a);
    let sb = samples(b);
    let a2r = DenseOperator::new(a, 2.0 * config.r)?;
    let b2s = DenseOperator::new(b, 2.0 * config.sigma)?;
    let potential = scheme.potential();
    let lambda = config.lambda;
    let h = config.h();
    let lp = potential.lipschitz_pi_prime();
    let tau = config.tau;
    let (ma, mb) = (a.len(), b.len());
    let y_old = sb.e.clone() * DVector::from_column_slice(state.y.coefficients());
    let mu_old = sa.e.clone() * DVector::from_column_slice(state.mu.coefficients());
    let u_grid = sb.e.clone() * DVector::from_column_slice(u);
    let project = |s: &Samples, v: &DVector<f64>| -> DVector<f64> {
        let weighted = v.component_mul(&DVector::from_column_slice(&s.weights));
        s.e.tr_mul(&weighted)
    };

    let residual = |z: &DVector<f64>| -> Result<DVector<f64>, OracleError> {
        let y = &sb.e * z.rows(0, mb);
        let mu = &sa.e * z.rows(mb, ma);
        let a_mu = DVector::from_vec(dense_power_apply(&a2r, mu.as_slice())?);
        let first = (&y - &y_old) / h + &mu + a_mu - &mu_old;
        let b_y = DVector::from_vec(dense_power_apply(&b2s, y.as_slice())?);
        let mut nonlinear = DVector::zeros(y.len());
        for (q, &s) in y.iter().enumerate() {
            let j = resolvent_bisection(potential, lambda, s)?;
            nonlinear[q] = (s - j) / lambda + potential.pi(s);
        }
        let second = (&y - &y_old) * (tau / h) + (&y - &y_old) * lp + b_y + nonlinear - &mu - &u_grid;
        let r1 = project(&sa, &first);
        let r2 = project(&sb, &second);
        Ok(DVector::from_iterator(mb + ma, r2.iter().chain(r1.iter()).copied()))
    };
    let res_norm = |r: &DVector<f64>| r.rows(0, mb).norm().max(r.rows(mb, ma).norm());

    let mut z = DVector::from_iterator(
        mb + ma,
        state.y.coefficients().iter().chain(state.mu.coefficients()).copied(),
    );
    let mut r = residual(&z)?;
    let mut iterations = 0;
    while res_norm(&r) > 1e-12 {
        if iterations >= 200 {
            return Err(OracleError::Nonconvergence {
                iterations,
                residual: res_norm(&r),
            });
        }
        let n = mb + ma;
        let mut jac = DMatrix::zeros(n, n);
        for k in 0..n {
            let step = 1e-6 * (1.0 + z[k].abs());
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[k] += step;
            zm[k] -= step;
            let col = (residual(&zp)? - residual(&zm)?) / (2.0 * step);
            jac.set_column(k, &col);
        }
        let dir = jac.lu().solve(&(-&r)).ok_or(OracleError::Nonconvergence {
            iterations,
            residual: res_norm(&r),
        })?;
        let mut t = 1.0;
        loop {
            let trial = &z + &dir * t;
            let rt = residual(&trial)?;
            if rt.norm() < r.norm() || t < 1e-6 {
                z = trial;
                r = rt;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
    }
    Ok(OracleStep {
        y: z.rows(0, mb).iter().copied().collect(),
        mu: z.rows(mb, ma).iter().copied().collect(),
        residual: res_norm(&r),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectra::{Field, SpectralBasis};
    use crate::stepper::SchemeConfig;

    fn basis(bc: BoundaryCondition, m: usize) -> Arc<SpectralBasis> {
        Arc::new(SpectralBasis::laplacian(&[PI], bc, m, 1).unwrap())
    }

    #[test]
    fn dense_operator_on_eigenfunctions() {
        let b = basis(BoundaryCondition::Dirichlet, 6);
        let op = DenseOperator::new(&b, 1.0).unwrap();
        assert!(op.asymmetry() < 1e-12);
        assert!(op.min_eigenvalue() > -1e-10);
        let e3 = Field::mode(&b, 2);
        let out = dense_power_apply(&op, e3.values()).unwrap();
        for (o, v) in out.iter().zip(e3.values()) {
            assert!((o - 9.0 * v).abs() < 1e-11);
        }
    }

    #[test]
    fn dense_operator_matches_fast_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = Arc::new(SpectralBasis::laplacian(&[2.0, 1.0], BoundaryCondition::Neumann, 5, 1).unwrap());
        for rho in [0.3, 1.7] {
            let op = DenseOperator::new(&b, rho).unwrap();
            for _ in 0..100 {
                let c: Vec<f64> = (0..b.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let v = Field::synthesize(&b, c).unwrap();
                let fast = v.apply_power(rho).unwrap();
                let dense = dense_power_apply(&op, v.values()).unwrap();
                let dev = fast
                    .values()
                    .iter()
                    .zip(&dense)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                assert!(dev <= 1e-11 * (1.0 + fast.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()))));
            }
        }
    }

    #[test]
    fn dense_cap() {
        let b = basis(BoundaryCondition::Neumann, 65);
        assert!(matches!(DenseOperator::new(&b, 1.0), Err(OracleError::SizeCap { .. })));
    }

    #[test]
    fn dual_norm_maximization() {
        let b = basis(BoundaryCondition::Dirichlet, 6);
        let e3 = Field::mode(&b, 2).to_dual();
        let n = dual_norm_by_maximization(&b, 0.5, &e3).unwrap();
        assert!((n - 1.0 / 3.0).abs() < 1e-12);
        let zero = DualElement::new(&b, vec![0.0; 6]).unwrap();
        assert_eq!(dual_norm_by_maximization(&b, 0.5, &zero).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let nb = basis(BoundaryCondition::Neumann, 8);
        for _ in 0..100 {
            let f = DualElement::new(&nb, (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let r = rng.gen_range(0.2..1.5);
            let oracle = dual_norm_by_maximization(&nb, r, &f).unwrap();
            assert!((oracle - f.norm_dual(r)).abs() <= 1e-12 * f.norm_dual(r));
        }
    }

    #[test]
    fn bisection_resolvents() {
        let reg = Potential::regular();
        // J + 0.5 J³ = 1.5 at J = 1
        assert!((resolvent_bisection(&reg, 0.5, 1.5).unwrap() - 1.0).abs() < 1e-15);
        let obs = Potential::double_obstacle(1.0).unwrap();
        assert_eq!(resolvent_bisection(&obs, 0.1, 3.0).unwrap(), 1.0);
        let log = Potential::logarithmic(1.5).unwrap();
        for s in [-5.0, -0.3, 0.0, 0.7, 12.0] {
            let j = resolvent_bisection(&log, 0.1, s).unwrap();
            let fast = log.yosida(0.1).unwrap().resolvent(s);
            assert!((j - fast).abs() < 1e-12, "s = {s}");
        }
    }

    fn tiny_scheme(potential: Potential, tau: f64) -> Scheme {
        let a = basis(BoundaryCondition::Neumann, 4);
        let config = SchemeConfig {
            tau,
            steps: 4,
            final_time: 0.4,
            ..SchemeConfig::default()
        };
        Scheme::new(a.clone(), a, potential, config).unwrap()
    }

    #[test]
    fn zero_state_is_fixed() {
        let s = tiny_scheme(Potential::regular(), 0.0);
        let st = s.initial_state(&Field::zeros(s.b())).unwrap();
        let out = dense_step_solve(&s, &st, &[0.0; 4]).unwrap();
        assert!(out.y.iter().chain(&out.mu).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn matches_fast_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for potential in [Potential::regular(), Potential::double_obstacle(1.0).unwrap()] {
            for tau in [0.0, 1.0] {
                let s = tiny_scheme(potential.clone(), tau);
                let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.2..0.2)).collect();
                let y0 = Field::synthesize(s.b(), c).unwrap();
                let st = s.initial_state(&y0).unwrap();
                let u: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect();
                let fast = s.step(&st, &Field::synthesize(s.b(), u.clone()).unwrap()).unwrap();
                let slow = dense_step_solve(&s, &st, &u).unwrap();
                let dy: f64 = fast.y.coefficients().iter().zip(&slow.y).map(|(a, b)| (a - b).powi(2)).sum();
                let dm: f64 = fast.mu.coefficients().iter().zip(&slow.mu).map(|(a, b)| (a - b).powi(2)).sum();
                assert!(dy.sqrt() < 1e-8 && dm.sqrt() < 1e-8);
            }
        }
    }
}
