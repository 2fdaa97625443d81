mod common;

use gwnet_core::cluster::single_linkage;
use gwnet_core::generators::{cycle_network, sbm_sample, SbmSpec};
use gwnet_core::{DissimilarityMatrix, Matrix};
use proptest::prelude::*;

fn arb_dissimilarity(max_k: usize) -> impl Strategy<Value = DissimilarityMatrix> {
    (1..=max_k).prop_flat_map(|k| prop::collection::vec(0.0..10.0f64, k * k)).prop_map(|raw| {
        let k = (raw.len() as f64).sqrt() as usize;
        let m = Matrix::from_fn(k, k, |i, j| if i == j { 0.0 } else { raw[i.min(j) * k + i.max(j)] });
        DissimilarityMatrix::new((0..k).map(|i| format!("n{i}")).collect(), m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merge_heights_nondecreasing(d in arb_dissimilarity(12)) {
        let g = single_linkage(&d);
        prop_assert_eq!(g.merges.len(), d.len() - 1);
        prop_assert!(g.merges.windows(2).all(|w| w[0].height <= w[1].height));
        prop_assert_eq!(g.merges.last().map_or(1, |m| m.size), d.len());
    }

    #[test]
    fn heights_invariant_under_relabeling(d in arb_dissimilarity(10), seed in any::<u64>()) {
        let k = d.len();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut s = seed;
        for i in (1..k).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let pm = Matrix::from_fn(k, k, |i, j| d.get(perm[i], perm[j]));
        let labels = perm.iter().map(|&i| d.labels()[i].clone()).collect();
        let pd = DissimilarityMatrix::new(labels, pm).unwrap();
        let h1: Vec<f64> = single_linkage(&d).merges.iter().map(|m| m.height).collect();
        let h2: Vec<f64> = single_linkage(&pd).merges.iter().map(|m| m.height).collect();
        prop_assert_eq!(h1, h2);
    }

    #[test]
    fn cycle_rows_are_shifts(v in prop::collection::vec(-5.0..5.0f64, 1..=8)) {
        let n = v.len();
        let g = cycle_network(&v);
        let mut row = v.clone();
        for i in 0..n {
            prop_assert_eq!(g.row(i), row.as_slice());
            row.rotate_right(1);
        }
    }
}

#[test]
fn block_means_concentrate() {
    let (n_i, sigma) = (200usize, 5f64.sqrt());
    let mut inside = 0;
    let mut total = 0;
    for seed in 0..100u64 {
        let spec = SbmSpec::cycle(&[0.0, 10.0], 5.0, n_i, seed).unwrap();
        let x = sbm_sample(&spec).unwrap();
        let block = spec.membership();
        let mut sums = [[0.0f64; 2]; 2];
        for (i, k, w) in x.weights().indexed() {
            sums[block[i]][block[k]] += w;
        }
        for a in 0..2 {
            for b in 0..2 {
                let mean = sums[a][b] / (n_i * n_i) as f64;
                total += 1;
                if (mean - spec.means[(a, b)]).abs() <= 5.0 * sigma / (n_i as f64) {
                    inside += 1;
                }
            }
        }
    }
    assert!(inside as f64 >= 0.99 * total as f64, "{inside}/{total}");
}

#[test]
fn table1_class1_block_means() {
    let spec = SbmSpec::cycle(&[0.0, 25.0, 50.0, 75.0, 100.0], 5.0, 10, 2024).unwrap();
    let x = sbm_sample(&spec).unwrap();
    assert_eq!(x.len(), 50);
    let block = spec.membership();
    let mut sums = vec![0.0f64; 25];
    for (i, k, w) in x.weights().indexed() {
        sums[block[i] * 5 + block[k]] += w;
    }
    for (idx, s) in sums.iter().enumerate() {
        let target = spec.means[(idx / 5, idx % 5)];
        assert!((s / 100.0 - target).abs() <= 3.0 * 5f64.sqrt() / 10.0);
    }
}
