mod common;

use std::fs;

use gwnet::core::cluster::single_linkage;
use gwnet::core::{DissimilarityMatrix, Matrix, MeasureNetwork};
use gwnet::emit::emit_outputs;
use gwnet::io::{
    ingest_matrix_csv, load_network, parse_matrix_csv, read_dissimilarity_csv, read_network_json, write_matrix_csv,
    write_network_json, CsvOptions, HeaderMode, MeasureMode,
};
use gwnet::Error;
use proptest::prelude::*;

fn arb_network(max_n: usize) -> impl Strategy<Value = MeasureNetwork> {
    (1..=max_n)
        .prop_flat_map(|n| (prop::collection::vec(-1e6..1e6f64, n * n), prop::collection::vec(0.01..1.0f64, n)))
        .prop_map(|(w, m)| {
            let n = m.len();
            let s: f64 = m.iter().sum();
            MeasureNetwork::new(Matrix::from_vec(n, n, w).unwrap(), m.iter().map(|v| v / s).collect(), None).unwrap()
        })
}

fn assert_close(a: &MeasureNetwork, b: &MeasureNetwork, tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.weights().iter().zip(b.weights().iter()) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }
    for (x, y) in a.measure().iter().zip(b.measure()) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_ingest_emit_ingest(x in arb_network(12)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let opts = CsvOptions { measure: MeasureMode::LastRow, header: HeaderMode::Absent };
        write_matrix_csv(fs::File::create(&path).unwrap(), &x, MeasureMode::LastRow).unwrap();
        let first = ingest_matrix_csv(&path, opts).unwrap();
        assert_close(&first, &x, 1e-12);
        let again = dir.path().join("y.csv");
        write_matrix_csv(fs::File::create(&again).unwrap(), &first, MeasureMode::LastRow).unwrap();
        let second = ingest_matrix_csv(&again, opts).unwrap();
        assert_close(&second, &first, 1e-12);
    }

    #[test]
    fn json_round_trip(x in arb_network(8)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        write_network_json(&path, &x).unwrap();
        prop_assert_eq!(read_network_json(&path).unwrap(), x);
    }

    #[test]
    fn dissimilarity_emit_and_reread(pts in prop::collection::vec(-50.0..50.0f64, 1..10)) {
        let k = pts.len();
        let labels: Vec<String> = (0..k).map(|i| format!("n{i}")).collect();
        let d = DissimilarityMatrix::new(labels, Matrix::from_fn(k, k, |i, j| (pts[i] - pts[j]).abs())).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_outputs(dir.path(), Some(&d), None, &[]).unwrap();
        let back = read_dissimilarity_csv(&dir.path().join("dissimilarity.csv")).unwrap();
        prop_assert_eq!(back.labels(), d.labels());
        for (a, b) in back.values().iter().zip(d.values().iter()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn migration_shaped_matrix() {
    let mut rng = common::rng(5);
    let n = 225;
    let mut text = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let v: u32 = if i == j { rand::Rng::random_range(&mut rng, 100_000..5_000_000) } else { rand::Rng::random_range(&mut rng, 0..20_000) };
                v.to_string()
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("migration.csv");
    fs::write(&path, &text).unwrap();
    let x = load_network(&path).unwrap();
    assert_eq!(x.len(), 225);
    assert!(x.measure().iter().all(|&m| m == 1.0 / 225.0));
    assert!(x.labels().is_none());
}

#[test]
fn non_square_and_located_parse_errors() {
    let e = parse_matrix_csv("1,2,3\n4,5,6\n7,8,9\n0,0,0\n".as_bytes(), CsvOptions::default()).unwrap_err();
    assert!(matches!(e, Error::NonSquare { rows: 4, cols: 3 }));
    let e = parse_matrix_csv("a,b\n1,2\n3,oops\n".as_bytes(), CsvOptions::default()).unwrap_err();
    assert!(matches!(e, Error::ParseError { row: 3, col: 2, .. }), "{e}");
    let three = parse_matrix_csv("0,1,2\n1,0,1\n2,1,0\n".as_bytes(), CsvOptions::default()).unwrap();
    assert_eq!(three.measure(), &[1.0 / 3.0; 3]);
}

#[test]
fn zero_matrix_outputs_are_stable() {
    let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let d = DissimilarityMatrix::new(labels, Matrix::zeros(4, 4)).unwrap();
    let g = single_linkage(&d);
    assert!(g.merges.iter().all(|m| m.height == 0.0));
    let nwk = g.to_newick();
    assert_eq!(nwk, "(d:0,(c:0,(a:0,b:0):0):0);");
    let read = |dir: &std::path::Path| {
        ["dissimilarity.csv", "dendrogram.nwk", "merges.csv"].map(|f| fs::read(dir.join(f)).unwrap())
    };
    let (one, two) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    emit_outputs(one.path(), Some(&d), Some(&g), &[]).unwrap();
    emit_outputs(two.path(), Some(&d), Some(&g), &[]).unwrap();
    assert_eq!(read(one.path()), read(two.path()));
    let csv = fs::read_to_string(one.path().join("dissimilarity.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "a,0,0,0,0");
    let merges = fs::read_to_string(one.path().join("merges.csv")).unwrap();
    assert_eq!(merges.lines().collect::<Vec<_>>(), ["a,b,height,size", "0,1,0,2", "2,4,0,3", "3,5,0,4"]);
}
