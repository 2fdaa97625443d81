#![allow(dead_code)]

use gwnet::core::network::product_coupling;
use gwnet::core::ot::exact_ot;
use gwnet::core::{Coupling, Matrix, MeasureNetwork};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

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

/// Convex mix of the product coupling and an exact-OT vertex for a random
/// cost, with the mixing weight sometimes pinned to an endpoint.
pub fn random_coupling(rng: &mut StdRng, mu: &[f64], nu: &[f64]) -> Coupling {
    let cost = Matrix::from_fn(mu.len(), nu.len(), |_, _| rng.random_range(0.0..1.0));
    let vertex = exact_ot(&cost, mu, nu).unwrap().coupling;
    let t: f64 = match rng.random_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random_range(0.0..1.0),
    };
    let prod = product_coupling(mu, nu).unwrap();
    let plan = Matrix::from_fn(mu.len(), nu.len(), |i, j| t * vertex.plan()[(i, j)] + (1.0 - t) * prod.plan()[(i, j)]);
    Coupling::new(plan, mu.to_vec(), nu.to_vec()).unwrap()
}

/// Three pairwise weakly isomorphic networks: two 3-node networks with
/// different measures and their common 4-node refinement.
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
