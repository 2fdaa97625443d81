//! Optimal transport solvers: exact discrete OT, closed-form OT on the
//! real line, and Sinkhorn scaling (plain and log-stabilized).

mod exact;
mod one_d;
mod sinkhorn;

pub use exact::{exact_ot, ExactSolution};
pub use one_d::{wasserstein_1d, wasserstein_1d_p1};
pub use sinkhorn::{
    decide_param, log_initialize, sinkhorn, sinkhorn_log, sinkhorn_log_from, KernelState,
    SinkhornConfig, SinkhornDiagnostics, SinkhornSolution,
};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::network::NORMALIZATION_TOL;

/// Nonnegative, finite, summing to one within [`NORMALIZATION_TOL`].
/// Zero entries are allowed here; couplings between networks get their
/// full-support check from [`crate::MeasureNetwork`].
pub(crate) fn check_marginal(v: &[f64]) -> Result<Vec<f64>> {
    for (index, &value) in v.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { row: 0, col: index });
        }
        if value < 0.0 {
            return Err(Error::NonPositiveMass { index, value });
        }
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::MeasureNotNormalized { sum });
    }
    Ok(v.iter().map(|x| x / sum).collect())
}
