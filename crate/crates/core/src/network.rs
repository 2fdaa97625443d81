//! Measure networks, couplings, and the p-distortion functional.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{abs_pow, root};
use crate::matrix::Matrix;

/// Tolerance on `|sum(measure) - 1|` below which a measure is renormalized
/// instead of rejected.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Row/column sum tolerance for coupling validation.
pub const MARGINAL_TOL: f64 = 1e-9;

/// An exponent `p` in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub const ONE: Order = Order(1.0);
    pub const TWO: Order = Order(2.0);
    pub const INFINITY: Order = Order(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidOrder(p));
        }
        Ok(Order(p))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// The exponent, or `InfiniteOrderUnsupported` for `p = inf`.
    pub fn finite(self) -> Result<f64> {
        if self.is_finite() {
            Ok(self.0)
        } else {
            Err(Error::InfiniteOrderUnsupported)
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "{}", self.0)
        } else {
            f.write_str("inf")
        }
    }
}

/// Checks a probability vector: finite, strictly positive entries summing to
/// one within [`NORMALIZATION_TOL`]. Returns the renormalized vector.
pub(crate) fn validate_probability(measure: &[f64]) -> Result<Vec<f64>> {
    for (index, &value) in measure.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { row: 0, col: index });
        }
        if value <= 0.0 {
            return Err(Error::NonPositiveMass { index, value });
        }
    }
    let sum: f64 = measure.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::MeasureNotNormalized { sum });
    }
    // leave vectors that already sum to one up to rounding untouched
    if (sum - 1.0).abs() <= measure.len() as f64 * f64::EPSILON {
        return Ok(measure.to_vec());
    }
    Ok(measure.iter().map(|m| m / sum).collect())
}

/// A finite network `(X, omega_X, mu_X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureNetwork {
    weights: Matrix,
    measure: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl MeasureNetwork {
    pub fn new(weights: Matrix, measure: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if !weights.is_square() {
            return Err(Error::NonSquareWeights { rows: weights.rows(), cols: weights.cols() });
        }
        let n = weights.rows();
        if measure.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: measure.len() });
        }
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if let Some((row, col, _)) = weights.indexed().find(|(_, _, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: l.len() });
            }
        }
        let measure = validate_probability(&measure)?;
        Ok(Self { weights, measure, labels })
    }

    /// Network with the uniform measure `1/n`.
    pub fn uniform(weights: Matrix) -> Result<Self> {
        let n = weights.rows();
        Self::new(weights, alloc::vec![1.0 / n as f64; n], None)
    }

    /// The one-node network `N_1(a)`.
    pub fn one_point(a: f64) -> Result<Self> {
        Self::new(Matrix::filled(1, 1, a), alloc::vec![1.0], None)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], measure: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?, measure.to_vec(), None)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    #[inline]
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    #[inline]
    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    #[inline]
    pub fn weight(&self, i: usize, k: usize) -> f64 {
        self.weights[(i, k)]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Same nodes and measure, new weights.
    pub fn with_weights(&self, weights: Matrix) -> Result<Self> {
        Self::new(weights, self.measure.clone(), self.labels.clone())
    }

    /// Network with every weight matrix transposed (incoming and outgoing
    /// roles swapped).
    pub fn transposed(&self) -> Self {
        Self {
            weights: self.weights.transpose(),
            measure: self.measure.clone(),
            labels: self.labels.clone(),
        }
    }
}

/// A transport plan with prescribed marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    plan: Matrix,
    row_marginal: Vec<f64>,
    col_marginal: Vec<f64>,
}

impl Coupling {
    /// Validates row/column sums against the marginals within [`MARGINAL_TOL`].
    pub fn new(plan: Matrix, row_marginal: Vec<f64>, col_marginal: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(plan, row_marginal, col_marginal, MARGINAL_TOL)
    }

    pub fn with_tolerance(
        plan: Matrix,
        row_marginal: Vec<f64>,
        col_marginal: Vec<f64>,
        tol: f64,
    ) -> Result<Self> {
        if plan.rows() != row_marginal.len() {
            return Err(Error::DimensionMismatch { expected: row_marginal.len(), found: plan.rows() });
        }
        if plan.cols() != col_marginal.len() {
            return Err(Error::DimensionMismatch { expected: col_marginal.len(), found: plan.cols() });
        }
        for (row, col, value) in plan.indexed() {
            if !value.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            if value < 0.0 {
                return Err(Error::NegativePlanEntry { row, col, value });
            }
        }
        let err = marginal_error(&plan, &row_marginal, &col_marginal);
        if err > tol {
            return Err(Error::MarginalMismatch { max_error: err });
        }
        Ok(Self { plan, row_marginal, col_marginal })
    }

    /// Skips the marginal check; used for solver iterates that have not
    /// converged.
    pub(crate) fn from_parts_unchecked(plan: Matrix, row_marginal: Vec<f64>, col_marginal: Vec<f64>) -> Self {
        Self { plan, row_marginal, col_marginal }
    }

    #[inline]
    pub fn plan(&self) -> &Matrix {
        &self.plan
    }

    pub fn into_plan(self) -> Matrix {
        self.plan
    }

    pub fn row_marginal(&self) -> &[f64] {
        &self.row_marginal
    }

    pub fn col_marginal(&self) -> &[f64] {
        &self.col_marginal
    }

    pub fn transpose(&self) -> Coupling {
        Coupling {
            plan: self.plan.transpose(),
            row_marginal: self.col_marginal.clone(),
            col_marginal: self.row_marginal.clone(),
        }
    }

    /// Nonzero entries as `(row, col, mass)`.
    pub fn support(&self) -> Vec<(usize, usize, f64)> {
        self.plan.indexed().filter(|&(_, _, w)| w > 0.0).collect()
    }

    /// Errors unless the marginals match the two node measures.
    pub fn check_marginals(&self, x: &MeasureNetwork, y: &MeasureNetwork) -> Result<()> {
        if self.plan.rows() != x.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: self.plan.rows() });
        }
        if self.plan.cols() != y.len() {
            return Err(Error::DimensionMismatch { expected: y.len(), found: self.plan.cols() });
        }
        let err = max_abs_diff(&self.row_marginal, x.measure())
            .max(max_abs_diff(&self.col_marginal, y.measure()));
        if err > MARGINAL_TOL {
            return Err(Error::MarginalMismatch { max_error: err });
        }
        Ok(())
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

/// L-infinity deviation of the plan's row and column sums from the targets.
pub fn marginal_error(plan: &Matrix, rows: &[f64], cols: &[f64]) -> f64 {
    max_abs_diff(&plan.row_sums(), rows).max(max_abs_diff(&plan.col_sums(), cols))
}

/// The product measure `mu ⊗ nu`, always a coupling.
pub fn product_coupling(mu: &[f64], nu: &[f64]) -> Result<Coupling> {
    let mu = validate_probability(mu)?;
    let nu = validate_probability(nu)?;
    let plan = Matrix::from_fn(mu.len(), nu.len(), |i, j| mu[i] * nu[j]);
    Coupling::new(plan, mu, nu)
}

/// The coupling `diag(mu)` of a measure with itself.
pub fn diagonal_coupling(mu: &[f64]) -> Result<Coupling> {
    let mu = validate_probability(mu)?;
    Coupling::new(Matrix::diagonal(&mu), mu.clone(), mu)
}

/// A finite probability measure on the real line, atoms sorted ascending
/// and pairwise distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<f64>,
    masses: Vec<f64>,
}

impl DiscreteDistribution {
    /// Sorts the atoms, merges equal locations and renormalizes.
    pub fn new(atoms: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if atoms.len() != masses.len() {
            return Err(Error::DimensionMismatch { expected: atoms.len(), found: masses.len() });
        }
        if atoms.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        if let Some(col) = atoms.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        validate_probability(&masses)?;
        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(masses).collect();
        Ok(Self::from_pairs(&mut pairs))
    }

    /// Point mass at `x`.
    pub fn dirac(x: f64) -> Self {
        Self { atoms: alloc::vec![x], masses: alloc::vec![1.0] }
    }

    /// Builds from already validated `(atom, mass)` pairs.
    pub(crate) fn from_pairs(pairs: &mut [(f64, f64)]) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut masses: Vec<f64> = Vec::with_capacity(pairs.len());
        for &(a, m) in pairs.iter() {
            match atoms.last() {
                Some(&last) if last == a => *masses.last_mut().unwrap() += m,
                _ => {
                    atoms.push(a);
                    masses.push(m);
                }
            }
        }
        let total: f64 = masses.iter().sum();
        for m in &mut masses {
            *m /= total;
        }
        Self { atoms, masses }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// The p-distortion `dis_p(mu)` of a coupling between `x` and `y`:
/// the `L^p(mu ⊗ mu)` norm of `omega_X(i,k) - omega_Y(j,l)`. For `p = inf`
/// the maximum is taken over the support of `mu ⊗ mu`.
pub fn distortion(x: &MeasureNetwork, y: &MeasureNetwork, mu: &Coupling, p: Order) -> Result<f64> {
    mu.check_marginals(x, y)?;
    let support = mu.support();
    let wx = x.weights();
    let wy = y.weights();
    if !p.is_finite() {
        let mut worst = 0.0_f64;
        for &(i, j, _) in &support {
            for &(k, l, _) in &support {
                worst = worst.max((wx[(i, k)] - wy[(j, l)]).abs());
            }
        }
        return Ok(worst);
    }
    let pv = p.value();
    let mut total = 0.0;
    for &(i, j, a) in &support {
        let rx = wx.row(i);
        let ry = wy.row(j);
        let mut inner = 0.0;
        for &(k, l, b) in &support {
            inner += abs_pow(rx[k] - ry[l], pv) * b;
        }
        total += a * inner;
    }
    Ok(root(total, pv))
}

/// `dis_2(mu)` via the expansion
/// `|omega_X|^2 + |omega_Y|^2 - 2 <omega_X mu omega_Y^T, mu>`, in
/// `O(m^2 n + m n^2)` instead of the quadruple sum.
pub fn distortion2_quadratic(x: &MeasureNetwork, y: &MeasureNetwork, mu: &Coupling) -> Result<f64> {
    mu.check_marginals(x, y)?;
    let sx = squared_norm(x);
    let sy = squared_norm(y);
    let cross = cross_term(x, y, mu.plan());
    Ok(sqrt_clamped(sx + sy - 2.0 * cross))
}

fn sqrt_clamped(v: f64) -> f64 {
    crate::math::sqrt(v.max(0.0))
}

/// `size_2(X)^2 = sum omega(i,k)^2 mu(i) mu(k)`.
pub(crate) fn squared_norm(x: &MeasureNetwork) -> f64 {
    let m = x.measure();
    let w = x.weights();
    (0..x.len())
        .map(|i| m[i] * w.row(i).iter().zip(m).map(|(v, mk)| v * v * mk).sum::<f64>())
        .sum()
}

/// `sum_{i,j,k,l} omega_X(i,k) omega_Y(j,l) P(i,j) P(k,l)`.
pub(crate) fn cross_term(x: &MeasureNetwork, y: &MeasureNetwork, plan: &Matrix) -> f64 {
    // (omega_X P omega_Y^T)_{ij} paired with P_{ij}
    let xp = x.weights().matmul(plan).expect("plan rows match X");
    let xpy = xp.matmul(&y.weights().transpose()).expect("plan cols match Y");
    xpy.dot(plan)
}

/// `d_{N,p}(X, N_1(a)) = ½ ||omega_X - a||_{L^p(mu_X ⊗ mu_X)}`.
pub fn dnp_to_point(x: &MeasureNetwork, a: f64, p: Order) -> f64 {
    let w = x.weights();
    if !p.is_finite() {
        return 0.5 * w.iter().fold(0.0_f64, |m, v| m.max((v - a).abs()));
    }
    let pv = p.value();
    let m = x.measure();
    let mut total = 0.0;
    for i in 0..x.len() {
        total += m[i] * w.row(i).iter().zip(m).map(|(v, mk)| abs_pow(v - a, pv) * mk).sum::<f64>();
    }
    0.5 * root(total, pv)
}

/// Result of evaluating the Gromov-Prokhorov condition for one coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpEvaluation {
    /// `mu ⊗ mu({|omega_X - omega_Y| >= eps})`.
    pub mass: f64,
    /// `mass <= alpha * eps`.
    pub feasible: bool,
}

/// Evaluates the Gromov-Prokhorov feasibility of `(eps, mu)`. No
/// infimization over couplings is performed.
pub fn gp_objective(
    x: &MeasureNetwork,
    y: &MeasureNetwork,
    mu: &Coupling,
    eps: f64,
    alpha: f64,
) -> Result<GpEvaluation> {
    mu.check_marginals(x, y)?;
    if eps.is_nan() || eps < 0.0 || alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidConfig("eps and alpha must be nonnegative"));
    }
    let support = mu.support();
    let (wx, wy) = (x.weights(), y.weights());
    let mut mass = 0.0;
    for &(i, j, a) in &support {
        for &(k, l, b) in &support {
            if (wx[(i, k)] - wy[(j, l)]).abs() >= eps {
                mass += a * b;
            }
        }
    }
    Ok(GpEvaluation { mass, feasible: mass <= alpha * eps })
}
