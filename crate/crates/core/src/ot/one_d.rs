//! Optimal transport on the real line.

use alloc::vec::Vec;

use crate::math::{abs_pow, root};
use crate::network::{DiscreteDistribution, Order};

fn cumulative(masses: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = masses
        .iter()
        .map(|m| {
            acc += m;
            acc
        })
        .collect();
    // the final breakpoint must land exactly on 1 for the sweep to terminate
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

/// `W_p(a, b) = (∫_0^1 |F^{-1}(t) - G^{-1}(t)|^p dt)^{1/p}`, evaluated
/// exactly by sweeping the merged quantile breakpoints. Both quantile
/// functions are piecewise constant, taking the value of atom `i` on
/// `(F_{i-1}, F_i]`. For `p = inf` the sup over positive-length pieces is
/// returned.
pub fn wasserstein_1d(a: &DiscreteDistribution, b: &DiscreteDistribution, p: Order) -> f64 {
    let (xa, xb) = (a.atoms(), b.atoms());
    let (ca, cb) = (cumulative(a.masses()), cumulative(b.masses()));
    let finite = p.is_finite();
    let pv = p.value();
    let (mut i, mut j) = (0, 0);
    let mut t = 0.0;
    let mut acc = 0.0_f64;
    loop {
        let next = ca[i].min(cb[j]);
        let width = next - t;
        if width > 0.0 {
            let d = xa[i] - xb[j];
            if finite {
                acc += abs_pow(d, pv) * width;
            } else {
                acc = acc.max(d.abs());
            }
        }
        t = next;
        if t >= 1.0 {
            break;
        }
        if ca[i] <= next {
            i += 1;
        }
        if cb[j] <= next {
            j += 1;
        }
    }
    if finite {
        root(acc, pv)
    } else {
        acc
    }
}

/// `W_1(a, b) = ∫ |F(x) - G(x)| dx` over the merged atom grid.
pub fn wasserstein_1d_p1(a: &DiscreteDistribution, b: &DiscreteDistribution) -> f64 {
    let (xa, ma) = (a.atoms(), a.masses());
    let (xb, mb) = (b.atoms(), b.masses());
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0_f64, 0.0_f64);
    let mut prev: Option<f64> = None;
    let mut acc = 0.0;
    while i < xa.len() || j < xb.len() {
        let za = xa.get(i).copied().unwrap_or(f64::INFINITY);
        let zb = xb.get(j).copied().unwrap_or(f64::INFINITY);
        let z = za.min(zb);
        if let Some(pz) = prev {
            acc += (fa - fb).abs() * (z - pz);
        }
        if za == z {
            fa += ma[i];
            i += 1;
        }
        if zb == z {
            fb += mb[j];
            j += 1;
        }
        prev = Some(z);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(atoms: &[f64], masses: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(atoms.to_vec(), masses.to_vec()).unwrap()
    }

    #[test]
    fn identical_distributions() {
        let a = dist(&[0.0, 1.5, 4.0], &[0.2, 0.5, 0.3]);
        assert_eq!(wasserstein_1d(&a, &a, Order::TWO), 0.0);
        assert_eq!(wasserstein_1d_p1(&a, &a), 0.0);
        let five = DiscreteDistribution::dirac(5.0);
        assert_eq!(wasserstein_1d_p1(&five, &five), 0.0);
    }

    #[test]
    fn dirac_shift() {
        let (a, b) = (DiscreteDistribution::dirac(0.0), DiscreteDistribution::dirac(3.0));
        for p in [Order::ONE, Order::TWO, Order::new(3.7).unwrap(), Order::INFINITY] {
            assert_abs_diff_eq!(wasserstein_1d(&a, &b, p), 3.0, epsilon = 1e-12);
        }
        assert_eq!(wasserstein_1d_p1(&a, &b), 3.0);
    }

    #[test]
    fn two_point_masses() {
        // F - G = 1/4 on [0, 1)
        let a = dist(&[0.0, 1.0], &[0.5, 0.5]);
        let b = dist(&[0.0, 1.0], &[0.25, 0.75]);
        assert_abs_diff_eq!(wasserstein_1d(&a, &b, Order::ONE), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(wasserstein_1d_p1(&a, &b), 0.25, epsilon = 1e-15);
        // quantile difference 1 on a set of measure 1/4
        assert_abs_diff_eq!(wasserstein_1d(&a, &b, Order::TWO), 0.5, epsilon = 1e-15);
        assert_eq!(wasserstein_1d(&a, &b, Order::INFINITY), 1.0);
    }

    #[test]
    fn spread_against_center() {
        let a = dist(&[0.0, 2.0], &[0.5, 0.5]);
        let b = DiscreteDistribution::dirac(1.0);
        assert_abs_diff_eq!(wasserstein_1d_p1(&a, &b), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(wasserstein_1d(&a, &b, Order::ONE), 1.0, epsilon = 1e-15);
    }
}
