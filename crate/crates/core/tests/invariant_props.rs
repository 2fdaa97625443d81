mod common;

use std::f64::consts::PI;

use common::{arb_network, random_coupling, random_network, rng};
use gwnet_core::invariants::{
    interleaving_distance, size_p, sphere_discretize, sphere_subsize_closed_form, sub_size, sup_size, LevelKind,
    SizeCurve, INTERLEAVING_TOLERANCE,
};
use gwnet_core::network::distortion;
use gwnet_core::Order;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_sizes_are_monotone(x in arb_network(6), ts in prop::collection::vec(-12.0..12.0f64, 2..10)) {
        let mut ts = ts;
        ts.sort_by(f64::total_cmp);
        for p in [Order::ONE, Order::TWO] {
            let sub: Vec<f64> = ts.iter().map(|&t| sub_size(&x, p, t).unwrap()).collect();
            let sup: Vec<f64> = ts.iter().map(|&t| sup_size(&x, p, t).unwrap()).collect();
            prop_assert!(sub.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(sup.windows(2).all(|w| w[0] >= w[1]));
        }
        let max = x.weights().min_max().unwrap().1;
        prop_assert_eq!(sub_size(&x, Order::TWO, max).unwrap(), size_p(&x, Order::TWO));
    }

    #[test]
    fn sublevel_superlevel_partition(x in arb_network(6), pick in any::<prop::sample::Index>()) {
        let mut ws: Vec<f64> = x.weights().iter().copied().collect();
        ws.sort_by(f64::total_cmp);
        ws.dedup();
        let k = pick.index(ws.len());
        let t = ws[k];
        let p = Order::new(1.5).unwrap();
        let total = size_p(&x, p).powf(1.5);
        let below = sub_size(&x, p, t).unwrap().powf(1.5);
        let above = match ws.get(k + 1) {
            Some(&next) => sup_size(&x, p, next).unwrap().powf(1.5),
            None => 0.0,
        };
        prop_assert!((below + above - total).abs() <= 1e-9 * (1.0 + total));
    }

    #[test]
    fn size_difference_bounded_by_distortion(x in arb_network(5), y in arb_network(5), seed in any::<u64>()) {
        let mut r = rng(seed);
        for _ in 0..100 {
            let mu = random_coupling(&mut r, x.measure(), y.measure());
            for p in [Order::ONE, Order::TWO] {
                let gap = (size_p(&x, p) - size_p(&y, p)).abs();
                prop_assert!(gap <= 2.0 * distortion(&x, &y, &mu, p).unwrap() + 1e-9);
            }
        }
    }
}

#[test]
fn circle_discretization_tracks_closed_form() {
    let x = sphere_discretize(1, 2000).unwrap();
    assert!((size_p(&x, Order::ONE) - PI / 2.0).abs() <= 2e-3);
    let curve = SizeCurve::of_network_on(&x, Order::ONE, LevelKind::Sublevel, (0..50).map(|k| PI * k as f64 / 49.0).collect()).unwrap();
    for (t, v) in curve.grid.iter().zip(&curve.values) {
        let exact = sphere_subsize_closed_form(1, Order::ONE, *t).unwrap();
        assert!((v - exact).abs() <= 5e-3, "t={t}: {v} vs {exact}");
    }
}

fn random_curve(seed: u64) -> SizeCurve {
    let mut r = rng(seed);
    let x = random_network(&mut r, 6, 3.0);
    let grid: Vec<f64> = (0..64).map(|k| -3.0 + 6.0 * k as f64 / 63.0).collect();
    SizeCurve::of_network_on(&x, Order::ONE, LevelKind::Sublevel, grid).unwrap()
}

#[test]
fn interleaving_symmetry_and_triangle() {
    for s in 0..30u64 {
        let (f, g, h) = (random_curve(3 * s), random_curve(3 * s + 1), random_curve(3 * s + 2));
        let fg = interleaving_distance(&f, &g).unwrap();
        let gf = interleaving_distance(&g, &f).unwrap();
        assert!((fg - gf).abs() <= 2.0 * INTERLEAVING_TOLERANCE);
        let gh = interleaving_distance(&g, &h).unwrap();
        let fh = interleaving_distance(&f, &h).unwrap();
        assert!(fh <= fg + gh + 2.0 * INTERLEAVING_TOLERANCE, "{fh} > {fg} + {gh}");
    }
}

#[test]
fn sphere_curve_bound() {
    let f = SizeCurve::sphere(1, Order::ONE).unwrap();
    let g = SizeCurve::sphere(2, Order::ONE).unwrap();
    let d = interleaving_distance(&f, &g).unwrap();
    assert!((0.17..=0.19).contains(&d), "{d}");
}
