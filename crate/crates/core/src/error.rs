use alloc::boxed::Box;
use alloc::string::String;

use crate::ot::SinkhornSolution;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("weight matrix is {rows}x{cols}, expected a square matrix")]
    NonSquareWeights { rows: usize, cols: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("node {index} has mass {value}; measures must have full support")]
    NonPositiveMass { index: usize, value: f64 },
    #[error("measure sums to {sum}, not 1")]
    MeasureNotNormalized { sum: f64 },
    #[error("plan entry ({row}, {col}) is negative: {value}")]
    NegativePlanEntry { row: usize, col: usize, value: f64 },
    #[error("coupling marginals deviate by {max_error:e}")]
    MarginalMismatch { max_error: f64 },
    #[error("order p = {0} is not in [1, inf]")]
    InvalidOrder(f64),
    #[error("operation is only defined for finite p")]
    InfiniteOrderUnsupported,
    #[error("operation requires p = 2, got {0}")]
    OrderNotTwo(f64),
    #[error("distribution has no atoms")]
    EmptyDistribution,
    #[error("transport problem is infeasible")]
    Infeasible,
    #[error("network simplex exceeded {0} pivots")]
    PivotLimit(usize),
    #[error("kernel entry ({row}, {col}) underflows; use the log-domain solver")]
    KernelUnderflow { row: usize, col: usize },
    #[error("sinkhorn did not converge in {} iterations (marginal error {:e})", .0.diagnostics.iterations, .0.diagnostics.marginal_error)]
    MaxItersExceeded(Box<SinkhornSolution>),
    #[error("scaling vectors left the floating-point range")]
    NumericalBreakdown,
    #[error("kernel exponent half-range {half_range} exceeds {limit}; no translation keeps the kernel representable")]
    RangeTooWide { half_range: f64, limit: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("threshold t = {0} outside [0, pi]")]
    DomainError(f64),
    #[error("interleaving distance is defined for sublevel curves only")]
    KindMismatch,
    #[error("curves are sampled over different domains")]
    DomainMismatch,
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("sphere dimension {0} is not supported")]
    UnsupportedDimension(usize),
    #[error("resolution {0} is too small")]
    InvalidResolution(usize),
    #[error("instance with {0} plan entries is too large for brute force")]
    InstanceTooLarge(usize),
    #[error("network has zero size; rescaling is undefined")]
    ZeroSize,
    #[error("network weights are all zero")]
    ZeroNetwork,
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("invalid SBM spec: {0}")]
    InvalidSpec(&'static str),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("at least two networks are required")]
    TooFewNetworks,
    #[error("diagonal initialization needs equal node measures")]
    MeasureMismatch,
}
