//! Upper bounds on `d_{N,2}` from entropic GW, a grid-search oracle for tiny
//! instances, and the cosine-rule rescalings.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::invariants::size_p;
use crate::matrix::Matrix;
use crate::network::{cross_term, diagonal_coupling, distortion, product_coupling, squared_norm, Coupling, MeasureNetwork, Order};
use crate::ot::{sinkhorn_log, SinkhornConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GwInit {
    #[default]
    Product,
    /// Requires networks of equal size.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwConfig {
    pub sinkhorn: SinkhornConfig,
    pub outer_iters: usize,
    /// Stop when the L1 change of the plan between outer iterations is
    /// at most this.
    pub plan_tolerance: f64,
    pub init: GwInit,
}

impl GwConfig {
    pub const DEFAULT_OUTER_ITERS: usize = 200;
    pub const DEFAULT_PLAN_TOLERANCE: f64 = 1e-8;

    pub fn new(lambda: f64) -> Self {
        Self {
            sinkhorn: SinkhornConfig::new(lambda),
            outer_iters: Self::DEFAULT_OUTER_ITERS,
            plan_tolerance: Self::DEFAULT_PLAN_TOLERANCE,
            init: GwInit::Product,
        }
    }

    pub fn with_init(mut self, init: GwInit) -> Self {
        self.init = init;
        self
    }

    pub fn with_outer_iters(mut self, outer_iters: usize) -> Self {
        self.outer_iters = outer_iters;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GwResult {
    pub coupling: Coupling,
    /// `½ dis_2` of the returned coupling, an upper bound on `d_{N,2}`.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// `dis_2(P)` using the plan's own marginals, so it stays meaningful for
/// Sinkhorn iterates whose marginals are only approximately `mu_X, mu_Y`.
fn plan_distortion2(x: &MeasureNetwork, y: &MeasureNetwork, plan: &Matrix) -> f64 {
    let quad = |w: &Matrix, m: &[f64]| -> f64 {
        w.indexed().map(|(i, k, v)| v * v * m[i] * m[k]).sum()
    };
    let sx = quad(x.weights(), &plan.row_sums());
    let sy = quad(y.weights(), &plan.col_sums());
    crate::math::sqrt((sx + sy - 2.0 * cross_term(x, y, plan)).max(0.0))
}

/// `M(i,j) = sum_{k,l} |omega_X(i,k) - omega_Y(j,l)|^2 P(k,l)`.
fn linearized_cost(x: &MeasureNetwork, y: &MeasureNetwork, plan: &Matrix) -> Matrix {
    let (r, c) = (plan.row_sums(), plan.col_sums());
    let fx: Vec<f64> = (0..x.len()).map(|i| x.weights().row(i).iter().zip(&r).map(|(w, m)| w * w * m).sum()).collect();
    let fy: Vec<f64> = (0..y.len()).map(|j| y.weights().row(j).iter().zip(&c).map(|(w, m)| w * w * m).sum()).collect();
    let xpy = x
        .weights()
        .matmul(plan)
        .and_then(|xp| xp.matmul(&y.weights().transpose()))
        .expect("shapes follow the plan");
    Matrix::from_fn(x.len(), y.len(), |i, j| (fx[i] + fy[j] - 2.0 * xpy[(i, j)]).max(0.0))
}

/// Entropic GW for `p = 2`: repeatedly linearize the quadratic objective at
/// the current plan and re-solve with log-stabilized Sinkhorn.
///
/// Hitting `outer_iters` is not an error; the result is returned with
/// `converged = false` and its value is still a valid upper bound. Inner
/// Sinkhorn failures are propagated.
pub fn entropic_gw(x: &MeasureNetwork, y: &MeasureNetwork, cfg: &GwConfig) -> Result<GwResult> {
    cfg.sinkhorn.validate()?;
    let mut coupling = match cfg.init {
        GwInit::Product => product_coupling(x.measure(), y.measure())?,
        GwInit::Diagonal => {
            if x.len() != y.len() {
                return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
            }
            if x.measure() != y.measure() {
                return Err(Error::MeasureMismatch);
            }
            diagonal_coupling(x.measure())?
        }
    };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.outer_iters {
        iterations += 1;
        let cost = linearized_cost(x, y, coupling.plan());
        let next = sinkhorn_log(&cost, &cfg.sinkhorn, x.measure(), y.measure())?.coupling;
        let change = next.plan().l1_distance(coupling.plan());
        coupling = next;
        if change <= cfg.plan_tolerance {
            converged = true;
            break;
        }
    }
    let value = 0.5 * plan_distortion2(x, y, coupling.plan());
    Ok(GwResult { coupling, value, iterations, converged })
}

/// Grid search over the transportation polytope for tiny instances
/// (`m n <= 9`), returning the best `½ dis_p` found.
///
/// The top-left `(m-1) x (n-1)` block is free, entry `(i, j)` ranging over
/// `t / grid_k * min(mu_i, nu_j)` for `t = 0..=grid_k`; the last row and
/// column are then forced by the marginals and infeasible points dropped.
/// The best ten grid points are polished by a shrinking coordinate search.
pub fn gw_bruteforce(x: &MeasureNetwork, y: &MeasureNetwork, p: Order, grid_k: usize) -> Result<f64> {
    let (m, n) = (x.len(), y.len());
    if m * n > 9 {
        return Err(Error::InstanceTooLarge(m * n));
    }
    if grid_k == 0 {
        return Err(Error::InvalidResolution(0));
    }
    let (mu, nu) = (x.measure(), y.measure());
    let free: Vec<(usize, usize)> = (0..m.saturating_sub(1)).flat_map(|i| (0..n - 1).map(move |j| (i, j))).collect();
    let caps: Vec<f64> = free.iter().map(|&(i, j)| mu[i].min(nu[j])).collect();

    let complete = |vals: &[f64]| -> Option<Matrix> {
        let mut plan = Matrix::zeros(m, n);
        for (&(i, j), &v) in free.iter().zip(vals) {
            plan[(i, j)] = v;
        }
        for i in 0..m - 1 {
            let rest: f64 = plan.row(i)[..n - 1].iter().sum();
            plan[(i, n - 1)] = mu[i] - rest;
        }
        for j in 0..n {
            let rest: f64 = (0..m - 1).map(|i| plan[(i, j)]).sum();
            plan[(m - 1, j)] = nu[j] - rest;
        }
        if plan.iter().any(|&v| v < -1e-14) {
            return None;
        }
        Some(plan.map(|v| v.max(0.0)))
    };
    let score = |plan: Matrix| -> f64 {
        let c = Coupling::from_parts_unchecked(plan, mu.to_vec(), nu.to_vec());
        0.5 * distortion(x, y, &c, p).unwrap_or(f64::INFINITY)
    };
    let eval = |vals: &[f64]| complete(vals).map(score);

    const KEEP: usize = 10;
    let mut best: Vec<(f64, Vec<f64>)> = Vec::with_capacity(KEEP + 1);
    let mut ticks = vec![0usize; free.len()];
    loop {
        let vals: Vec<f64> = ticks.iter().zip(&caps).map(|(&t, c)| c * t as f64 / grid_k as f64).collect();
        if let Some(v) = eval(&vals) {
            if best.len() < KEEP || v < best[best.len() - 1].0 {
                let at = best.partition_point(|b| b.0 <= v);
                best.insert(at, (v, vals));
                best.truncate(KEEP);
            }
        }
        // odometer over the grid
        let mut k = 0;
        while k < ticks.len() {
            ticks[k] += 1;
            if ticks[k] <= grid_k {
                break;
            }
            ticks[k] = 0;
            k += 1;
        }
        if k == ticks.len() {
            break;
        }
    }

    let mut overall = f64::INFINITY;
    for (start, vals) in best {
        let mut cur = vals;
        let mut cur_val = start;
        let mut step = caps.iter().fold(0.0_f64, |a, &c| a.max(c)) / grid_k as f64;
        while step > 1e-12 && !free.is_empty() {
            let mut improved = false;
            for k in 0..free.len() {
                for dir in [1.0, -1.0] {
                    let mut cand = cur.clone();
                    cand[k] = (cand[k] + dir * step).clamp(0.0, caps[k]);
                    if let Some(v) = eval(&cand) {
                        if v < cur_val {
                            cur = cand;
                            cur_val = v;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        overall = overall.min(cur_val);
    }
    Ok(overall)
}

/// Rescales `x` to unit `size_2` by `omega / (2 s)` with `s = ½ size_2(X)`;
/// returns the rescaled network and `s`.
pub fn cosine_rescale(x: &MeasureNetwork) -> Result<(MeasureNetwork, f64)> {
    let s = 0.5 * size_p(x, Order::TWO);
    if s == 0.0 {
        return Err(Error::ZeroSize);
    }
    let scaled = x.with_weights(x.weights().map(|w| w / (2.0 * s)))?;
    Ok((scaled, s))
}

/// `M* = (lambda_xy / lambda_star) M`, so that `exp(-lambda_star M*)`
/// reproduces `exp(-lambda_xy M)`.
pub fn lambda_rescale(cost: &Matrix, lambda_xy: f64, lambda_star: f64) -> Result<Matrix> {
    if !(lambda_xy > 0.0 && lambda_star > 0.0) {
        return Err(Error::InvalidConfig("lambda must be positive"));
    }
    let ratio = lambda_xy / lambda_star;
    Ok(cost.map(|c| ratio * c))
}

/// `s^2 + t^2 - ½ sum omega_X(i,k) omega_Y(j,l) mu(i,j) mu(k,l)` with
/// `s, t` the half-sizes; equals `¼ dis_2(mu)^2`.
pub fn cosine_rule_inner(x: &MeasureNetwork, y: &MeasureNetwork, mu: &Coupling) -> Result<f64> {
    mu.check_marginals(x, y)?;
    let s2 = 0.25 * squared_norm(x);
    let t2 = 0.25 * squared_norm(y);
    Ok(s2 + t2 - 0.5 * cross_term(x, y, mu.plan()))
}
