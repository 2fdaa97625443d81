//! Dissimilarity matrices over labelled collections and single-linkage
//! clustering.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const SYMMETRY_TOL: f64 = 1e-9;

/// Symmetric, nonnegative, zero-diagonal matrix with one label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    labels: Vec<String>,
    values: Matrix,
}

impl DissimilarityMatrix {
    pub fn new(labels: Vec<String>, values: Matrix) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::NonSquareWeights { rows: values.rows(), cols: values.cols() });
        }
        if labels.len() != values.rows() {
            return Err(Error::DimensionMismatch { expected: values.rows(), found: labels.len() });
        }
        for (i, j, v) in values.indexed() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            if v < 0.0 || (i == j && v != 0.0) || (v - values[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidSpec("dissimilarity must be symmetric, nonnegative, zero on the diagonal"));
            }
        }
        Ok(Self { labels, values })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }
}

/// One agglomeration step. Leaves are `0..k`; the cluster created by merge
/// `s` gets id `k + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    /// Number of leaves in the merged cluster.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub leaf_labels: Vec<String>,
}

struct DisjointSet {
    parent: Vec<usize>,
    cluster: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }
}

/// Single linkage via Kruskal's algorithm on all pairs, sorted by
/// `(distance, i, j)` so ties resolve toward the smallest index pair.
pub fn single_linkage(d: &DissimilarityMatrix) -> Dendrogram {
    let k = d.len();
    let mut edges: Vec<(f64, usize, usize)> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).map(|(i, j)| (d.get(i, j), i, j)).collect();
    edges.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut ds = DisjointSet { parent: (0..k).collect(), cluster: (0..k).collect(), size: vec![1; k] };
    let mut merges = Vec::with_capacity(k.saturating_sub(1));
    for (h, i, j) in edges {
        let (ri, rj) = (ds.find(i), ds.find(j));
        if ri == rj {
            continue;
        }
        let (ca, cb) = (ds.cluster[ri], ds.cluster[rj]);
        let size = ds.size[ri] + ds.size[rj];
        merges.push(Merge { a: ca.min(cb), b: ca.max(cb), height: h, size });
        ds.parent[rj] = ri;
        ds.size[ri] = size;
        ds.cluster[ri] = k + merges.len() - 1;
        if merges.len() + 1 == k {
            break;
        }
    }
    Dendrogram { merges, leaf_labels: d.labels().to_vec() }
}

fn quote_label(label: &str, out: &mut String) {
    let special = label.is_empty() || label.chars().any(|c| c.is_whitespace() || "()[]':;,".contains(c));
    if special {
        out.push('\'');
        for c in label.chars() {
            if c == '\'' {
                out.push('\'');
            }
            out.push(c);
        }
        out.push('\'');
    } else {
        out.push_str(label);
    }
}

impl Dendrogram {
    pub fn leaf_count(&self) -> usize {
        self.leaf_labels.len()
    }

    /// Id of the root cluster, if any leaves exist.
    pub fn root(&self) -> Option<usize> {
        match self.leaf_count() {
            0 => None,
            k => Some(k - 1 + self.merges.len()),
        }
    }

    /// Leaf indices of cluster `id`, ascending.
    pub fn members(&self, id: usize) -> Vec<usize> {
        let k = self.leaf_count();
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            if c < k {
                out.push(c);
            } else {
                let m = &self.merges[c - k];
                stack.push(m.a);
                stack.push(m.b);
            }
        }
        out.sort_unstable();
        out
    }

    fn height(&self, id: usize) -> f64 {
        let k = self.leaf_count();
        if id < k {
            0.0
        } else {
            self.merges[id - k].height
        }
    }

    fn write_newick(&self, id: usize, out: &mut String) {
        let k = self.leaf_count();
        if id < k {
            quote_label(&self.leaf_labels[id], out);
            return;
        }
        let m = self.merges[id - k];
        out.push('(');
        for (n, child) in [m.a, m.b].into_iter().enumerate() {
            if n > 0 {
                out.push(',');
            }
            self.write_newick(child, out);
            let _ = write!(out, ":{}", m.height - self.height(child));
        }
        out.push(')');
    }

    /// Newick string with branch lengths given by height differences.
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        if let Some(r) = self.root() {
            self.write_newick(r, &mut out);
        }
        out.push(';');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn dm(labels: &[&str], rows: &[&[f64]]) -> DissimilarityMatrix {
        DissimilarityMatrix::new(labels.iter().map(|s| s.to_string()).collect(), Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn clear_pair_first() {
        let d = dm(&["a", "b", "c"], &[&[0.0, 5.0, 1.0], &[5.0, 0.0, 4.0], &[1.0, 4.0, 0.0]]);
        let g = single_linkage(&d);
        assert_eq!(g.merges[0], Merge { a: 0, b: 2, height: 1.0, size: 2 });
        assert_eq!(g.merges[1], Merge { a: 1, b: 3, height: 4.0, size: 3 });
        assert_eq!(g.to_newick(), "(b:4,(a:1,c:1):3);");
    }

    #[test]
    fn equilateral_ties() {
        let d = dm(&["x", "y", "z"], &[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let g = single_linkage(&d);
        assert_eq!(g.merges.len(), 2);
        assert_eq!((g.merges[0].a, g.merges[0].b), (0, 1));
        assert_eq!((g.merges[1].a, g.merges[1].b), (2, 3));
        assert!(g.merges.iter().all(|m| m.height == 1.0));
        assert_eq!(g.members(4), vec![0, 1, 2]);
    }

    #[test]
    fn newick_quoting_and_single_leaf() {
        let d = dm(&["it's", "b c"], &[&[0.0, 2.0], &[2.0, 0.0]]);
        assert_eq!(single_linkage(&d).to_newick(), "('it''s':2,'b c':2);");
        let one = dm(&["solo"], &[&[0.0]]);
        assert_eq!(single_linkage(&one).to_newick(), "solo;");
    }

    #[test]
    fn rejects_bad_matrices() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let asym = Matrix::from_rows(&[[0.0, 1.0], [2.0, 0.0]]).unwrap();
        assert!(DissimilarityMatrix::new(labels.clone(), asym).is_err());
        let diag = Matrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(DissimilarityMatrix::new(labels, diag).is_err());
    }
}
