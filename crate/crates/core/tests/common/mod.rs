#![allow(dead_code)]

use gwnet_core::network::product_coupling;
use gwnet_core::ot::exact_ot;
use gwnet_core::{Coupling, Matrix, MeasureNetwork};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn random_measure(rng: &mut StdRng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

pub fn random_network(rng: &mut StdRng, max_n: usize, range: f64) -> MeasureNetwork {
    let n = rng.random_range(1..=max_n);
    let w = Matrix::from_fn(n, n, |_, _| rng.random_range(-range..range));
    MeasureNetwork::new(w, random_measure(rng, n), None).unwrap()
}

/// Mixture of the product coupling and an exact-OT vertex for a random
/// cost; always feasible.
pub fn random_coupling(rng: &mut StdRng, mu: &[f64], nu: &[f64]) -> Coupling {
    let cost = Matrix::from_fn(mu.len(), nu.len(), |_, _| rng.random_range(0.0..1.0));
    let vertex = exact_ot(&cost, mu, nu).unwrap().coupling;
    let t: f64 = rng.random_range(0.0..1.0);
    let prod = product_coupling(mu, nu).unwrap();
    let plan = Matrix::from_fn(mu.len(), nu.len(), |i, j| t * vertex.plan()[(i, j)] + (1.0 - t) * prod.plan()[(i, j)]);
    Coupling::new(plan, mu.to_vec(), nu.to_vec()).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn arb_network(max_n: usize) -> impl Strategy<Value = MeasureNetwork> {
    (1..=max_n)
        .prop_flat_map(|n| (prop::collection::vec(-10.0..10.0f64, n * n), prop::collection::vec(0.05..1.0f64, n)))
        .prop_map(|(w, m)| {
            let n = m.len();
            let s: f64 = m.iter().sum();
            MeasureNetwork::new(Matrix::from_vec(n, n, w).unwrap(), m.iter().map(|v| v / s).collect(), None).unwrap()
        })
}

pub fn twins() -> [MeasureNetwork; 3] {
    [
        MeasureNetwork::from_rows(&[[2.0, 2.0, 1.0], [2.0, 2.0, 1.0], [1.0, 1.0, 3.0]], &[0.25, 0.25, 0.5]).unwrap(),
        MeasureNetwork::from_rows(&[[2.0, 1.0, 1.0], [1.0, 3.0, 3.0], [1.0, 3.0, 3.0]], &[0.5, 0.25, 0.25]).unwrap(),
        MeasureNetwork::from_rows(
            &[[2.0, 2.0, 1.0, 1.0], [2.0, 2.0, 1.0, 1.0], [1.0, 1.0, 3.0, 3.0], [1.0, 1.0, 3.0, 3.0]],
            &[0.25; 4],
        )
        .unwrap(),
    ]
}
