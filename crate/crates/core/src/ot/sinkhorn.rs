//! Entropic OT by Sinkhorn matrix scaling.
//!
//! [`sinkhorn`] is the textbook iteration on `K = exp(-lambda M)`.
//! [`sinkhorn_log`] keeps large scalings in log-domain potentials `u, v`
//! and rebuilds `K_ij = exp(lambda (-M_ij + u_i + v_j))` whenever a scaling
//! exceeds `absorb_threshold`; it starts from [`log_initialize`], which
//! translates the exponent range of `M` to be symmetric about zero.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::check_marginal;
use crate::error::{Error, Result};
use crate::math::{exp, ln};
use crate::matrix::Matrix;
use crate::network::{marginal_error, Coupling, MARGINAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornConfig {
    /// Inverse regularization strength (`lambda > 0`).
    pub lambda: f64,
    pub max_iters: usize,
    /// Stopping threshold on the L-infinity marginal error.
    pub tolerance: f64,
    /// Scaling magnitude that triggers log-domain absorption.
    pub absorb_threshold: f64,
}

impl SinkhornConfig {
    pub const DEFAULT_MAX_ITERS: usize = 10_000;
    pub const DEFAULT_TOLERANCE: f64 = 1e-9;
    pub const DEFAULT_ABSORB_THRESHOLD: f64 = 1e30;

    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            max_iters: Self::DEFAULT_MAX_ITERS,
            tolerance: Self::DEFAULT_TOLERANCE,
            absorb_threshold: Self::DEFAULT_ABSORB_THRESHOLD,
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_absorb_threshold(mut self, threshold: f64) -> Self {
        self.absorb_threshold = threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig("lambda must be positive and finite"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive"));
        }
        if self.absorb_threshold.is_nan() || self.absorb_threshold <= 1.0 {
            return Err(Error::InvalidConfig("absorb threshold must exceed 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornDiagnostics {
    pub iterations: usize,
    /// Final L-infinity deviation of the plan marginals.
    pub marginal_error: f64,
    /// Number of log-domain absorptions performed.
    pub absorptions: usize,
    /// Smallest kernel entry over every kernel built during the solve.
    pub min_kernel_entry: f64,
    pub converged: bool,
}

impl SinkhornDiagnostics {
    /// Every kernel built stayed at or above the smallest normal `f64`.
    pub fn kernel_normal(&self) -> bool {
        self.min_kernel_entry >= f64::MIN_POSITIVE
    }
}

/// A Sinkhorn plan with its solver diagnostics. When carried by
/// [`Error::MaxItersExceeded`] the coupling is the last iterate and its
/// marginals are not guaranteed.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornSolution {
    pub coupling: Coupling,
    pub diagnostics: SinkhornDiagnostics,
}

/// Kernel and log-domain potentials of the stabilized solver.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelState {
    pub kernel: Matrix,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Translation factor; `u` and `v` start at this value.
    pub gamma: f64,
    pub lambda: f64,
}

impl KernelState {
    /// Untranslated start: `u = v = 0`, `K = exp(-lambda M)`.
    pub fn plain(cost: &Matrix, lambda: f64) -> Self {
        let (m, n) = cost.shape();
        Self {
            kernel: cost.map(|c| exp(-lambda * c)),
            u: vec![0.0; m],
            v: vec![0.0; n],
            gamma: 0.0,
            lambda,
        }
    }

    pub fn min_entry(&self) -> f64 {
        self.kernel.iter().fold(f64::INFINITY, |m, &k| m.min(k))
    }
}

/// Translation factor for [`log_initialize`]: `(alpha + beta) / 4`, which
/// centres the exponents `lambda(-M + 2 gamma)` on
/// `[-lambda(beta - alpha)/2, lambda(beta - alpha)/2]`.
pub fn decide_param(alpha: f64, beta: f64) -> f64 {
    (alpha + beta) / 4.0
}

/// Largest exponent magnitude whose `exp` is a finite, normal `f64`.
fn exponent_limit() -> f64 {
    (-ln(f64::MIN_POSITIVE)).min(ln(f64::MAX))
}

/// Builds a kernel `K_ij = exp(lambda (-M_ij + 2 gamma))` whose entries
/// all lie in the normal floating-point range, absorbing the translation
/// into the potentials (`u = v = gamma`).
pub fn log_initialize(cost: &Matrix, lambda: f64) -> Result<KernelState> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig("lambda must be positive and finite"));
    }
    if let Some((row, col, _)) = cost.indexed().find(|(_, _, c)| !c.is_finite()) {
        return Err(Error::NonFinite { row, col });
    }
    let (alpha, beta) = cost.min_max().ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
    let half_range = lambda * (beta - alpha) / 2.0;
    let limit = exponent_limit();
    if half_range > limit {
        return Err(Error::RangeTooWide { half_range, limit });
    }
    let gamma = decide_param(alpha, beta);
    let (m, n) = cost.shape();
    Ok(KernelState {
        kernel: cost.map(|c| exp(lambda * (-c + 2.0 * gamma))),
        u: vec![gamma; m],
        v: vec![gamma; n],
        gamma,
        lambda,
    })
}

fn check_problem(cost: &Matrix, cfg: &SinkhornConfig, mu: &[f64], nu: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let (m, n) = cost.shape();
    if mu.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: mu.len() });
    }
    if nu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: nu.len() });
    }
    if let Some((row, col, _)) = cost.indexed().find(|(_, _, c)| !c.is_finite()) {
        return Err(Error::NonFinite { row, col });
    }
    Ok((check_marginal(mu)?, check_marginal(nu)?))
}

/// `K^T a`
fn kt_times(kernel: &Matrix, a: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (i, &ai) in a.iter().enumerate() {
        for (o, k) in out.iter_mut().zip(kernel.row(i)) {
            *o += k * ai;
        }
    }
}

/// `K b`
fn k_times(kernel: &Matrix, b: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = kernel.row(i).iter().zip(b).map(|(k, bj)| k * bj).sum();
    }
}

fn scale(target: &[f64], denom: &[f64], out: &mut [f64]) -> Result<()> {
    for ((o, t), d) in out.iter_mut().zip(target).zip(denom) {
        let s = t / d;
        if !s.is_finite() {
            return Err(Error::NumericalBreakdown);
        }
        *o = s;
    }
    Ok(())
}

fn assemble(kernel: &Matrix, a: &[f64], b: &[f64]) -> Matrix {
    Matrix::from_fn(kernel.rows(), kernel.cols(), |i, j| a[i] * kernel[(i, j)] * b[j])
}

struct Scaling {
    a: Vec<f64>,
    b: Vec<f64>,
    kta: Vec<f64>,
    kb: Vec<f64>,
}

impl Scaling {
    fn new(m: usize, n: usize) -> Self {
        Self { a: vec![1.0; m], b: vec![1.0; n], kta: vec![0.0; n], kb: vec![0.0; m] }
    }

    /// One `b <- nu ./ K^T a`, `a <- mu ./ K b` sweep; returns the L-infinity
    /// marginal error of `diag(a) K diag(b)` afterwards.
    fn sweep(&mut self, kernel: &Matrix, mu: &[f64], nu: &[f64]) -> Result<f64> {
        kt_times(kernel, &self.a, &mut self.kta);
        scale(nu, &self.kta, &mut self.b)?;
        k_times(kernel, &self.b, &mut self.kb);
        scale(mu, &self.kb, &mut self.a)?;
        let row_err = self
            .a
            .iter()
            .zip(&self.kb)
            .zip(mu)
            .fold(0.0_f64, |e, ((a, kb), m)| e.max((a * kb - m).abs()));
        kt_times(kernel, &self.a, &mut self.kta);
        let col_err = self
            .b
            .iter()
            .zip(&self.kta)
            .zip(nu)
            .fold(0.0_f64, |e, ((b, kta), n)| e.max((b * kta - n).abs()));
        Ok(row_err.max(col_err))
    }
}

fn finish(
    plan: Matrix,
    mu: Vec<f64>,
    nu: Vec<f64>,
    mut diagnostics: SinkhornDiagnostics,
    cfg: &SinkhornConfig,
) -> Result<SinkhornSolution> {
    diagnostics.marginal_error = marginal_error(&plan, &mu, &nu);
    if diagnostics.converged {
        let tol = cfg.tolerance.max(MARGINAL_TOL);
        let coupling = Coupling::with_tolerance(plan, mu, nu, tol)?;
        Ok(SinkhornSolution { coupling, diagnostics })
    } else {
        let coupling = Coupling::from_parts_unchecked(plan, mu, nu);
        Err(Error::MaxItersExceeded(Box::new(SinkhornSolution { coupling, diagnostics })))
    }
}

/// Plain Sinkhorn scaling of `K = exp(-lambda M)`. Fails with
/// [`Error::KernelUnderflow`] as soon as any kernel entry is zero or
/// subnormal.
pub fn sinkhorn(cost: &Matrix, cfg: &SinkhornConfig, mu: &[f64], nu: &[f64]) -> Result<SinkhornSolution> {
    let (mu, nu) = check_problem(cost, cfg, mu, nu)?;
    let kernel = cost.map(|c| exp(-cfg.lambda * c));
    let mut min_kernel_entry = f64::INFINITY;
    for (row, col, k) in kernel.indexed() {
        if k.is_nan() || k < f64::MIN_POSITIVE {
            return Err(Error::KernelUnderflow { row, col });
        }
        if !k.is_finite() {
            return Err(Error::NumericalBreakdown);
        }
        min_kernel_entry = min_kernel_entry.min(k);
    }
    let (m, n) = cost.shape();
    let mut s = Scaling::new(m, n);
    let mut diag = SinkhornDiagnostics {
        iterations: 0,
        marginal_error: f64::INFINITY,
        absorptions: 0,
        min_kernel_entry,
        converged: false,
    };
    while diag.iterations < cfg.max_iters {
        diag.iterations += 1;
        diag.marginal_error = s.sweep(&kernel, &mu, &nu)?;
        if diag.marginal_error <= cfg.tolerance {
            diag.converged = true;
            break;
        }
    }
    finish(assemble(&kernel, &s.a, &s.b), mu, nu, diag, cfg)
}

/// Log-stabilized Sinkhorn started from [`log_initialize`].
pub fn sinkhorn_log(cost: &Matrix, cfg: &SinkhornConfig, mu: &[f64], nu: &[f64]) -> Result<SinkhornSolution> {
    cfg.validate()?;
    let state = log_initialize(cost, cfg.lambda)?;
    sinkhorn_log_from(state, cost, cfg, mu, nu)
}

/// Log-stabilized Sinkhorn from an explicit kernel state (for example
/// [`KernelState::plain`]).
pub fn sinkhorn_log_from(
    state: KernelState,
    cost: &Matrix,
    cfg: &SinkhornConfig,
    mu: &[f64],
    nu: &[f64],
) -> Result<SinkhornSolution> {
    let (mu, nu) = check_problem(cost, cfg, mu, nu)?;
    if state.kernel.shape() != cost.shape() || state.u.len() != cost.rows() || state.v.len() != cost.cols() {
        return Err(Error::DimensionMismatch { expected: cost.rows() * cost.cols(), found: state.kernel.rows() * state.kernel.cols() });
    }
    let lambda = cfg.lambda;
    let KernelState { mut kernel, mut u, mut v, .. } = state;
    let (m, n) = cost.shape();
    let mut s = Scaling::new(m, n);
    let mut diag = SinkhornDiagnostics {
        iterations: 0,
        marginal_error: f64::INFINITY,
        absorptions: 0,
        min_kernel_entry: kernel.iter().fold(f64::INFINITY, |acc, &k| acc.min(k)),
        converged: false,
    };
    while diag.iterations < cfg.max_iters {
        diag.iterations += 1;
        diag.marginal_error = s.sweep(&kernel, &mu, &nu)?;
        let largest = s.a.iter().chain(&s.b).fold(0.0_f64, |acc, &x| acc.max(x));
        if largest > cfg.absorb_threshold {
            for (ui, ai) in u.iter_mut().zip(&s.a) {
                *ui += ln(*ai) / lambda;
            }
            for (vj, bj) in v.iter_mut().zip(&s.b) {
                *vj += ln(*bj) / lambda;
            }
            kernel = Matrix::from_fn(m, n, |i, j| exp(lambda * (-cost[(i, j)] + u[i] + v[j])));
            let min_k = kernel.iter().fold(f64::INFINITY, |acc, &k| acc.min(k));
            diag.min_kernel_entry = diag.min_kernel_entry.min(min_k);
            s.a.iter_mut().for_each(|x| *x = 1.0);
            s.b.iter_mut().for_each(|x| *x = 1.0);
            diag.absorptions += 1;
        }
        if diag.marginal_error <= cfg.tolerance {
            diag.converged = true;
            break;
        }
    }
    finish(assemble(&kernel, &s.a, &s.b), mu, nu, diag, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn decide_param_formula() {
        assert_eq!(decide_param(3.0, 3.0), 1.5);
        assert_eq!(decide_param(0.0, 1000.0), 250.0);
        assert_eq!(decide_param(-100.0, 100.0), 0.0);
    }

    #[test]
    fn log_initialize_constant_cost_gives_ones() {
        let st = log_initialize(&Matrix::filled(3, 2, 7.0), 4.0).unwrap();
        assert_eq!(st.gamma, 3.5);
        assert!(st.kernel.iter().all(|&k| k == 1.0));
    }

    #[test]
    fn log_initialize_range_limit() {
        let cost = Matrix::from_rows(&[[0.0, 1000.0], [500.0, 250.0]]).unwrap();
        let st = log_initialize(&cost, 0.5).unwrap();
        assert!(st.min_entry() >= f64::MIN_POSITIVE);
        assert_abs_diff_eq!(st.min_entry(), exp(-250.0), epsilon = 0.0);

        let wide = Matrix::from_rows(&[[0.0, 4000.0]]).unwrap();
        match log_initialize(&wide, 0.5) {
            Err(Error::RangeTooWide { half_range, .. }) => assert_eq!(half_range, 1000.0),
            other => panic!("expected RangeTooWide, got {other:?}"),
        }
    }

    #[test]
    fn zero_cost_gives_product() {
        let cost = Matrix::zeros(2, 3);
        let mu = [0.3, 0.7];
        let nu = [0.2, 0.5, 0.3];
        for solve in [sinkhorn, sinkhorn_log] {
            let s = solve(&cost, &SinkhornConfig::new(3.0), &mu, &nu).unwrap();
            assert_eq!(s.diagnostics.absorptions, 0);
            for i in 0..2 {
                for j in 0..3 {
                    assert_abs_diff_eq!(s.coupling.plan()[(i, j)], mu[i] * nu[j], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_row_is_forced() {
        let cost = Matrix::from_rows(&[[1.0, 5.0, 2.0]]).unwrap();
        let nu = [0.25, 0.25, 0.5];
        let s = sinkhorn(&cost, &SinkhornConfig::new(1.0), &[1.0], &nu).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(s.coupling.plan()[(0, j)], nu[j], epsilon = 1e-12);
        }
    }

    #[test]
    fn two_by_two_fixed_point() {
        // symmetric problem: plan = [[x, 1/2 - x], [1/2 - x, x]] with
        // x / (1/2 - x) = exp(lambda), i.e. x = e^l / (2 (1 + e^l))
        let cost = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let s = sinkhorn(&cost, &SinkhornConfig::new(10.0), &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let p = s.coupling.plan();
        let e = exp(10.0);
        let x = e / (2.0 * (1.0 + e));
        assert_abs_diff_eq!(p[(0, 0)], x, epsilon = 1e-12);
        assert_abs_diff_eq!(p[(0, 1)], p[(1, 0)], epsilon = 1e-12);
        assert!(p[(0, 0)] > p[(0, 1)]);
        assert!(s.diagnostics.marginal_error <= 1e-9);
    }

    #[test]
    fn plain_kernel_underflow() {
        let cost = Matrix::from_rows(&[[0.0, 1000.0], [1000.0, 0.0]]).unwrap();
        let err = sinkhorn(&cost, &SinkhornConfig::new(200.0), &[0.5, 0.5], &[0.5, 0.5]).unwrap_err();
        assert_eq!(err, Error::KernelUnderflow { row: 0, col: 1 });
    }

    #[test]
    fn max_iters_carries_last_iterate() {
        let cost = Matrix::from_rows(&[[0.0, 1.0, 3.0], [2.0, 0.0, 1.0]]).unwrap();
        let cfg = SinkhornConfig::new(5.0).with_max_iters(1).with_tolerance(1e-14);
        match sinkhorn(&cost, &cfg, &[0.5, 0.5], &[0.2, 0.3, 0.5]) {
            Err(Error::MaxItersExceeded(last)) => {
                assert!(!last.diagnostics.converged);
                assert_eq!(last.diagnostics.iterations, 1);
                assert_eq!(last.coupling.plan().shape(), (2, 3));
            }
            other => panic!("expected MaxItersExceeded, got {other:?}"),
        }
    }

    #[test]
    fn absorption_is_a_reparametrization() {
        let cost = Matrix::from_rows(&[[0.0, 2.0, 5.0], [3.0, 0.5, 1.0], [4.0, 1.0, 0.0]]).unwrap();
        let mu = [0.2, 0.5, 0.3];
        let nu = [0.4, 0.4, 0.2];
        let cfg = SinkhornConfig::new(8.0);
        let plain = sinkhorn(&cost, &cfg, &mu, &nu).unwrap();
        // tiny threshold forces absorption every sweep
        let absorbing = cfg.with_absorb_threshold(1.5);
        let logged = sinkhorn_log_from(KernelState::plain(&cost, 8.0), &cost, &absorbing, &mu, &nu).unwrap();
        assert!(logged.diagnostics.absorptions > 0);
        let diff = plain.coupling.plan().l1_distance(logged.coupling.plan());
        assert!(diff <= 1e-8, "plans differ by {diff}");
    }

    #[test]
    fn config_validation() {
        assert!(SinkhornConfig::new(0.0).validate().is_err());
        assert!(SinkhornConfig::new(1.0).with_absorb_threshold(1.0).validate().is_err());
        assert!(SinkhornConfig::new(1.0).with_tolerance(0.0).validate().is_err());
        assert!(SinkhornConfig::new(1.0).validate().is_ok());
    }
}
