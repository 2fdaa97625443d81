mod common;

use common::{arb_network, twins, random_coupling, rng};
use gwnet_core::bounds::{rflb, rslb, rtlb, rtlb_from_cost, rtlb_max, szlb, tlb_cost, Direction, TlbCostMatrix};
use gwnet_core::invariants::local_distribution;
use gwnet_core::network::distortion;
use gwnet_core::ot::exact_ot;
use gwnet_core::{Matrix, MeasureNetwork, Order};
use proptest::prelude::*;

fn lp_w(a: &gwnet_core::DiscreteDistribution, b: &gwnet_core::DiscreteDistribution, p: f64) -> f64 {
    let cost = Matrix::from_fn(a.len(), b.len(), |i, j| (a.atoms()[i] - b.atoms()[j]).abs().powf(p));
    exact_ot(&cost, a.masses(), b.masses()).unwrap().objective.max(0.0).powf(1.0 / p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hierarchy_and_sandwich(x in arb_network(8), y in arb_network(8), seed in any::<u64>()) {
        let mut r = rng(seed);
        for p in [Order::ONE, Order::TWO] {
            let rep = rtlb_max(&x, &y, p).unwrap();
            prop_assert!(rep.is_ordered(1e-9), "{rep:?}");
            for _ in 0..20 {
                let mu = random_coupling(&mut r, x.measure(), y.measure());
                prop_assert!(rep.rtlb_max <= distortion(&x, &y, &mu, p).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn bounds_symmetric(x in arb_network(6), y in arb_network(6)) {
        for p in [Order::ONE, Order::TWO] {
            prop_assert!((szlb(&x, &y, p) - szlb(&y, &x, p)).abs() <= 1e-12);
            prop_assert!((rslb(&x, &y, p) - rslb(&y, &x, p)).abs() <= 1e-12);
            for d in Direction::BOTH {
                prop_assert!((rflb(&x, &y, p, d) - rflb(&y, &x, p, d)).abs() <= 1e-12);
                let (a, _) = rtlb(&x, &y, p, d).unwrap();
                let (b, _) = rtlb(&y, &x, p, d).unwrap();
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a), "{a} vs {b}");
            }
            // transposing both networks swaps the roles of out and in
            let (xt, yt) = (x.transposed(), y.transposed());
            let (o, _) = rtlb(&x, &y, p, Direction::Out).unwrap();
            let (i, _) = rtlb(&xt, &yt, p, Direction::In).unwrap();
            prop_assert!((o - i).abs() <= 1e-12 * (1.0 + o));
        }
    }

    #[test]
    fn tlb_entries_match_lp(x in arb_network(6), y in arb_network(6)) {
        let p = 2.0;
        let c = tlb_cost(&x, &y, Order::TWO, Direction::Out).unwrap();
        let mut lp = Matrix::zeros(x.len(), y.len());
        for i in 0..x.len() {
            for j in 0..y.len() {
                let a = local_distribution(&x, i, Direction::Out).unwrap();
                let b = local_distribution(&y, j, Direction::Out).unwrap();
                lp[(i, j)] = lp_w(&a, &b, p);
                prop_assert!((c.cost[(i, j)] - lp[(i, j)]).abs() <= 1e-10 * (1.0 + lp[(i, j)]));
            }
        }
        let (closed, _) = rtlb_from_cost(&c, &x, &y).unwrap();
        let lp_cost = TlbCostMatrix { cost: lp, ..c };
        let (via_lp, _) = rtlb_from_cost(&lp_cost, &x, &y).unwrap();
        prop_assert!((closed - via_lp).abs() <= 1e-8);
    }
}

#[test]
fn weak_isomorphism_zeros() {
    let nets = twins();
    for a in &nets {
        for b in &nets {
            for p in [Order::ONE, Order::TWO] {
                let r = rtlb_max(a, b, p).unwrap();
                for v in [r.szlb, r.rflb_out, r.rflb_in, r.rslb, r.rtlb_out, r.rtlb_in] {
                    assert!(v <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn symmetric_networks_have_equal_directions() {
    let x = MeasureNetwork::from_rows(&[[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 1.0]], &[0.2, 0.3, 0.5]).unwrap();
    let y = MeasureNetwork::from_rows(&[[1.0, 4.0], [4.0, 0.0]], &[0.6, 0.4]).unwrap();
    let r = rtlb_max(&x, &y, Order::TWO).unwrap();
    assert_eq!(r.rtlb_out, r.rtlb_in);
}
