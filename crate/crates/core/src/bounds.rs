//! Lower bounds on `2 d_{N,p}(X, Y)`, from cheapest to sharpest: the size
//! bound, the eccentricity bound, the weight-distribution bound and the
//! local-distribution (TLB) bound. All are computed through closed-form
//! 1D transport except the last stage of the TLB, an exact OT solve.

use alloc::vec::Vec;

use crate::error::Result;
use crate::invariants::{ecc_pushforward, local_distribution, size_p, weight_pushforward};
use crate::math::{abs_pow, root};
use crate::matrix::Matrix;
use crate::network::{Coupling, DiscreteDistribution, MeasureNetwork, Order};
use crate::ot::{exact_ot, wasserstein_1d};

pub use crate::invariants::Direction;

/// `|size_p(X) - size_p(Y)|`.
pub fn szlb(x: &MeasureNetwork, y: &MeasureNetwork, p: Order) -> f64 {
    (size_p(x, p) - size_p(y, p)).abs()
}

/// `W_p` between the eccentricity pushforwards.
pub fn rflb(x: &MeasureNetwork, y: &MeasureNetwork, p: Order, direction: Direction) -> f64 {
    wasserstein_1d(&ecc_pushforward(x, p, direction), &ecc_pushforward(y, p, direction), p)
}

/// `W_p` between the weight pushforwards `(omega_X)_* mu_X^{⊗2}`.
pub fn rslb(x: &MeasureNetwork, y: &MeasureNetwork, p: Order) -> f64 {
    wasserstein_1d(&weight_pushforward(x), &weight_pushforward(y), p)
}

/// `C(i, j) = W_p(omega_X(i, .)_* mu_X, omega_Y(j, .)_* mu_Y)` (columns for
/// `In`).
#[derive(Debug, Clone, PartialEq)]
pub struct TlbCostMatrix {
    pub cost: Matrix,
    pub direction: Direction,
    pub order: Order,
}

/// All local distributions of `x` in one direction.
pub fn local_distributions(x: &MeasureNetwork, direction: Direction) -> Vec<DiscreteDistribution> {
    (0..x.len()).map(|i| local_distribution(x, i, direction).expect("index in range")).collect()
}

/// Builds the TLB cost matrix from precomputed local distributions.
pub fn tlb_cost_from(
    left: &[DiscreteDistribution],
    right: &[DiscreteDistribution],
    p: Order,
    direction: Direction,
) -> Result<TlbCostMatrix> {
    p.finite()?;
    let cost = Matrix::from_fn(left.len(), right.len(), |i, j| wasserstein_1d(&left[i], &right[j], p));
    Ok(TlbCostMatrix { cost, direction, order: p })
}

pub fn tlb_cost(x: &MeasureNetwork, y: &MeasureNetwork, p: Order, direction: Direction) -> Result<TlbCostMatrix> {
    tlb_cost_from(&local_distributions(x, direction), &local_distributions(y, direction), p, direction)
}

/// `min_mu ||C||_{L^p(mu)}` over couplings of `mu_X` and `mu_Y`, given the
/// TLB cost matrix. Returns the bound and an optimal coupling.
pub fn rtlb_from_cost(
    c: &TlbCostMatrix,
    x: &MeasureNetwork,
    y: &MeasureNetwork,
) -> Result<(f64, Coupling)> {
    let pv = c.order.finite()?;
    let powered = c.cost.map(|v| abs_pow(v, pv));
    let sol = exact_ot(&powered, x.measure(), y.measure())?;
    Ok((root(sol.objective, pv), sol.coupling))
}

pub fn rtlb(x: &MeasureNetwork, y: &MeasureNetwork, p: Order, direction: Direction) -> Result<(f64, Coupling)> {
    rtlb_from_cost(&tlb_cost(x, y, p, direction)?, x, y)
}

/// Every bound of the hierarchy for one pair at one order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub szlb: f64,
    pub rflb_out: f64,
    pub rflb_in: f64,
    pub rslb: f64,
    pub rtlb_out: f64,
    pub rtlb_in: f64,
    pub rtlb_max: f64,
    pub order: Order,
    /// Optimal plan of whichever TLB direction attains `rtlb_max`.
    pub coupling: Option<Coupling>,
}

impl BoundReport {
    pub fn rflb_max(&self) -> f64 {
        self.rflb_out.max(self.rflb_in)
    }

    /// `szlb <= rflb_d <= rtlb_d` for both directions, within `tol`.
    pub fn is_ordered(&self, tol: f64) -> bool {
        self.szlb <= self.rflb_out + tol
            && self.szlb <= self.rflb_in + tol
            && self.rflb_out <= self.rtlb_out + tol
            && self.rflb_in <= self.rtlb_in + tol
    }
}

/// Computes all seven bounds; `rtlb_max = max(rtlb_out, rtlb_in)`.
pub fn rtlb_max(x: &MeasureNetwork, y: &MeasureNetwork, p: Order) -> Result<BoundReport> {
    let (rtlb_out, plan_out) = rtlb(x, y, p, Direction::Out)?;
    let (rtlb_in, plan_in) = rtlb(x, y, p, Direction::In)?;
    let coupling = if rtlb_out >= rtlb_in { plan_out } else { plan_in };
    Ok(BoundReport {
        szlb: szlb(x, y, p),
        rflb_out: rflb(x, y, p, Direction::Out),
        rflb_in: rflb(x, y, p, Direction::In),
        rslb: rslb(x, y, p),
        rtlb_out,
        rtlb_in,
        rtlb_max: rtlb_out.max(rtlb_in),
        order: p,
        coupling: Some(coupling),
    })
}
