//! Network invariants: sizes, eccentricities, pushforward distributions,
//! sublevel/superlevel size functions and their interleaving distance,
//! plus closed forms and discretizations for round spheres.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{abs_pow, acos, cos, powf, root, round, sin, sqrt};
use crate::matrix::Matrix;
use crate::network::{DiscreteDistribution, MeasureNetwork, Order};

/// Which slice of the weight function at a node: its row (`Out`) or its
/// column (`In`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Out,
    In,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Out, Direction::In];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Out => "out",
            Direction::In => "in",
        }
    }
}

fn slice(x: &MeasureNetwork, i: usize, dir: Direction) -> Vec<f64> {
    match dir {
        Direction::Out => x.weights().row(i).to_vec(),
        Direction::In => x.weights().column(i),
    }
}

/// `L^p(mu)` norm of `values`; `p = inf` gives the max absolute value.
fn lp_norm(values: &[f64], mu: &[f64], p: Order) -> f64 {
    if !p.is_finite() {
        return values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    }
    let pv = p.value();
    root(values.iter().zip(mu).map(|(v, m)| abs_pow(*v, pv) * m).sum(), pv)
}

/// Sum of `|omega(i,k)|^p mu(i) mu(k)` over entries accepted by `keep`.
fn masked_power_sum(x: &MeasureNetwork, pv: f64, keep: impl Fn(f64) -> bool) -> f64 {
    let m = x.measure();
    let w = x.weights();
    (0..x.len())
        .map(|i| {
            m[i] * w
                .row(i)
                .iter()
                .zip(m)
                .filter(|(v, _)| keep(**v))
                .map(|(v, mk)| abs_pow(*v, pv) * mk)
                .sum::<f64>()
        })
        .sum()
}

/// `size_p(X) = ||omega_X||_{L^p(mu_X ⊗ mu_X)}`.
pub fn size_p(x: &MeasureNetwork, p: Order) -> f64 {
    if !p.is_finite() {
        return x.weights().max_abs();
    }
    let pv = p.value();
    root(masked_power_sum(x, pv, |_| true), pv)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EccentricityVector {
    pub values: Vec<f64>,
    pub direction: Direction,
    pub order: Order,
}

/// `ecc(i) = ||omega_X(i, .)||_{L^p(mu_X)}` for `Out`, the column norm
/// for `In`.
pub fn eccentricity(x: &MeasureNetwork, p: Order, direction: Direction) -> EccentricityVector {
    let values = (0..x.len()).map(|i| lp_norm(&slice(x, i, direction), x.measure(), p)).collect();
    EccentricityVector { values, direction, order: p }
}

/// `omega_X(i, .)_* mu_X` (or the column analogue for `In`).
pub fn local_distribution(x: &MeasureNetwork, i: usize, direction: Direction) -> Result<DiscreteDistribution> {
    if i >= x.len() {
        return Err(Error::IndexOutOfRange { index: i, len: x.len() });
    }
    let mut pairs: Vec<(f64, f64)> = slice(x, i, direction).into_iter().zip(x.measure().iter().copied()).collect();
    Ok(DiscreteDistribution::from_pairs(&mut pairs))
}

/// Pushforward of `mu_X` under the eccentricity function.
pub fn ecc_pushforward(x: &MeasureNetwork, p: Order, direction: Direction) -> DiscreteDistribution {
    let ecc = eccentricity(x, p, direction);
    let mut pairs: Vec<(f64, f64)> = ecc.values.into_iter().zip(x.measure().iter().copied()).collect();
    DiscreteDistribution::from_pairs(&mut pairs)
}

/// Pushforward of `mu_X ⊗ mu_X` under `omega_X`.
pub fn weight_pushforward(x: &MeasureNetwork) -> DiscreteDistribution {
    let m = x.measure();
    let mut pairs: Vec<(f64, f64)> = x.weights().indexed().map(|(i, k, w)| (w, m[i] * m[k])).collect();
    DiscreteDistribution::from_pairs(&mut pairs)
}

/// `||omega_X 1{omega_X <= t}||_{L^p}`; finite `p` only.
pub fn sub_size(x: &MeasureNetwork, p: Order, t: f64) -> Result<f64> {
    let pv = p.finite()?;
    Ok(root(masked_power_sum(x, pv, |v| v <= t), pv))
}

/// `||omega_X 1{omega_X >= t}||_{L^p}`; finite `p` only.
pub fn sup_size(x: &MeasureNetwork, p: Order, t: f64) -> Result<f64> {
    let pv = p.finite()?;
    Ok(root(masked_power_sum(x, pv, |v| v >= t), pv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LevelKind {
    Sublevel,
    Superlevel,
}

/// A size function sampled on an ascending grid of thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub order: Order,
    pub kind: LevelKind,
}

impl SizeCurve {
    pub const DEFAULT_POINTS: usize = 512;

    /// Validates lengths, finiteness and an ascending grid.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, order: Order, kind: LevelKind) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        if grid.is_empty() {
            return Err(Error::InvalidResolution(0));
        }
        if let Some(col) = grid.iter().chain(&values).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        if grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpec("size curve grid must be ascending"));
        }
        Ok(Self { grid, values, order, kind })
    }

    /// Samples `f` on `points` equally spaced thresholds in `[lo, hi]`.
    pub fn from_fn(
        lo: f64,
        hi: f64,
        points: usize,
        order: Order,
        kind: LevelKind,
        mut f: impl FnMut(f64) -> f64,
    ) -> Result<Self> {
        let grid = linspace(lo, hi, points)?;
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values, order, kind)
    }

    /// The size function of `x` on an explicit grid.
    pub fn of_network_on(x: &MeasureNetwork, p: Order, kind: LevelKind, grid: Vec<f64>) -> Result<Self> {
        let pv = p.finite()?;
        // sort weights once and answer each threshold from a prefix sum
        let m = x.measure();
        let mut terms: Vec<(f64, f64)> =
            x.weights().indexed().map(|(i, k, w)| (w, abs_pow(w, pv) * m[i] * m[k])).collect();
        terms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prefix = Vec::with_capacity(terms.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &(_, c) in &terms {
            acc += c;
            prefix.push(acc);
        }
        let total = acc;
        let values = grid
            .iter()
            .map(|&t| {
                let s = match kind {
                    LevelKind::Sublevel => prefix[terms.partition_point(|e| e.0 <= t)],
                    LevelKind::Superlevel => total - prefix[terms.partition_point(|e| e.0 < t)],
                };
                root(s, pv)
            })
            .collect();
        Self::new(grid, values, p, kind)
    }

    /// The size function of `x` on [`Self::DEFAULT_POINTS`] thresholds
    /// spanning `[min(0, min omega), max(0, max omega)]`.
    pub fn of_network(x: &MeasureNetwork, p: Order, kind: LevelKind) -> Result<Self> {
        let (lo, hi) = x.weights().min_max().unwrap_or((0.0, 0.0));
        let (lo, hi) = (lo.min(0.0), hi.max(0.0));
        let hi = if hi > lo { hi } else { lo + 1.0 };
        Self::of_network_on(x, p, kind, linspace(lo, hi, Self::DEFAULT_POINTS)?)
    }

    /// Closed-form sublevel size of the round `n`-sphere on
    /// [`Self::DEFAULT_POINTS`] thresholds in `[0, pi]`.
    pub fn sphere(n: usize, p: Order) -> Result<Self> {
        let grid = linspace(0.0, PI, Self::DEFAULT_POINTS)?;
        let values = grid.iter().map(|&t| sphere_subsize_closed_form(n, p, t)).collect::<Result<_>>()?;
        Self::new(grid, values, p, LevelKind::Sublevel)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn eval(&self, t: f64) -> f64 {
        let g = &self.grid;
        let last = g.len() - 1;
        if t <= g[0] {
            return self.values[0];
        }
        if t >= g[last] {
            return self.values[last];
        }
        let j = g.partition_point(|&s| s <= t);
        let (t0, t1) = (g[j - 1], g[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        if t1 == t0 {
            return v1;
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }
}

/// `points` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidResolution(points));
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut out: Vec<f64> = (0..points).map(|k| lo + step * k as f64).collect();
    out[points - 1] = hi;
    Ok(out)
}

/// Surface area of the unit `n`-sphere in `R^{n+1}`.
fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        4 => 8.0 * PI * PI / 3.0,
        _ => 2.0 * PI * sphere_area(n - 2) / (n - 1) as f64,
    }
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, fa, m, fm, lm, flm, left, eps / 2.0, depth - 1)
        + adaptive(f, m, fm, b, fb, rm, frm, right, eps / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature with absolute tolerance `eps`.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    adaptive(&f, a, fa, b, fb, m, fm, whole, eps, 48)
}

/// `subSize_{p,t}(S^n)` for the round unit sphere with geodesic distance
/// and normalized volume.
pub fn sphere_subsize_closed_form(n: usize, p: Order, t: f64) -> Result<f64> {
    let pv = p.finite()?;
    if n == 0 {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(0.0..=PI).contains(&t) {
        return Err(Error::DomainError(t));
    }
    let power = if n == 1 {
        powf(t, pv + 1.0) / ((pv + 1.0) * PI)
    } else {
        let ratio = sphere_area(n - 1) / sphere_area(n);
        let k = (n - 1) as f64;
        ratio * integrate(|phi| powf(phi, pv) * powf(sin(phi), k), 0.0, t, 1e-12)
    };
    Ok(root(power, pv))
}

pub const INTERLEAVING_TOLERANCE: f64 = 1e-4;

/// `f <= g^eps` on the whole domain, where
/// `g^eps(t) = g(min(t + eps, T)) + eps`. Both sides are piecewise linear
/// between the breakpoints of `f` and the breakpoints of `g` shifted by
/// `-eps`, so checking those points is exact for the interpolants.
fn dominated(f: &SizeCurve, g: &SizeCurve, eps: f64) -> bool {
    let (lo, hi) = f.domain();
    let shifted = |t: f64| g.eval((t + eps).min(hi)) + eps;
    let ok = |t: f64| f.eval(t) <= shifted(t) + 1e-12;
    f.grid.iter().all(|&t| ok(t))
        && g.grid.iter().map(|&s| s - eps).filter(|&t| t >= lo && t <= hi).all(ok)
}

/// Interleaving distance between two sublevel curves on a common domain,
/// computed by bisection to absolute tolerance `tol`. The returned value
/// is the feasible (upper) end of the final bracket.
pub fn interleaving_distance_with_tolerance(f: &SizeCurve, g: &SizeCurve, tol: f64) -> Result<f64> {
    if f.kind != LevelKind::Sublevel || g.kind != LevelKind::Sublevel {
        return Err(Error::KindMismatch);
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidConfig("tolerance must be positive"));
    }
    let (fa, fb) = f.domain();
    let (ga, gb) = g.domain();
    let scale = 1.0_f64.max(fb.abs()).max(gb.abs());
    if (fa - ga).abs() > 1e-12 * scale || (fb - gb).abs() > 1e-12 * scale {
        return Err(Error::DomainMismatch);
    }
    let feasible = |eps: f64| dominated(f, g, eps) && dominated(g, f, eps);
    if feasible(0.0) {
        return Ok(0.0);
    }
    let gap = |a: &SizeCurve, b: &SizeCurve| a.grid.iter().fold(0.0_f64, |m, &t| m.max((a.eval(t) - b.eval(t)).abs()));
    let mut hi = gap(f, g).max(gap(g, f));
    while !feasible(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// [`interleaving_distance_with_tolerance`] at [`INTERLEAVING_TOLERANCE`].
pub fn interleaving_distance(f: &SizeCurve, g: &SizeCurve) -> Result<f64> {
    interleaving_distance_with_tolerance(f, g, INTERLEAVING_TOLERANCE)
}

/// Finite model of the unit `n`-sphere with geodesic distances.
///
/// `n = 1`: `resolution` equally spaced points, uniform measure.
/// `n = 2`: equal-height latitude bands, each holding a number of points
/// proportional to its area, every point weighted by its share of the
/// band area.
pub fn sphere_discretize(n: usize, resolution: usize) -> Result<MeasureNetwork> {
    match n {
        1 => circle(resolution),
        2 => sphere2(resolution),
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

fn circle(resolution: usize) -> Result<MeasureNetwork> {
    if resolution < 4 {
        return Err(Error::InvalidResolution(resolution));
    }
    let step = 2.0 * PI / resolution as f64;
    let weights = Matrix::from_fn(resolution, resolution, |i, j| {
        let d = i.abs_diff(j);
        d.min(resolution - d) as f64 * step
    });
    MeasureNetwork::uniform(weights)
}

fn sphere2(resolution: usize) -> Result<MeasureNetwork> {
    if resolution < 8 {
        return Err(Error::InvalidResolution(resolution));
    }
    let bands = (round(sqrt(resolution as f64 * PI / 4.0)) as usize).max(2);
    let mut points: Vec<[f64; 3]> = Vec::new();
    let mut measure: Vec<f64> = Vec::new();
    for b in 0..bands {
        let (t0, t1) = (PI * b as f64 / bands as f64, PI * (b + 1) as f64 / bands as f64);
        let area = (cos(t0) - cos(t1)) / 2.0;
        let count = (round(area * resolution as f64) as usize).max(1);
        let theta = 0.5 * (t0 + t1);
        for k in 0..count {
            // stagger alternate bands
            let phi = 2.0 * PI * (k as f64 + 0.5 * (b % 2) as f64) / count as f64;
            points.push([sin(theta) * cos(phi), sin(theta) * sin(phi), cos(theta)]);
            measure.push(area / count as f64);
        }
    }
    let total: f64 = measure.iter().sum();
    measure.iter_mut().for_each(|m| *m /= total);
    let len = points.len();
    let weights = Matrix::from_fn(len, len, |i, j| {
        if i == j {
            return 0.0;
        }
        let (a, b) = (points[i], points[j]);
        acos((a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0))
    });
    MeasureNetwork::new(weights, measure, None)
}
