//! Exact transport via the primal network simplex method.
//!
//! The bipartite problem is posed as an uncapacitated min-cost flow: row
//! node `i` supplies `mu[i]`, column node `j` demands `nu[j]`, and an extra
//! root node carries one artificial arc per node so the starting spanning
//! tree is a star. The leaving arc is chosen so the tree stays strongly
//! feasible (last blocking arc met when walking the cycle from its apex),
//! which rules out cycling on degenerate pivots.

use alloc::vec;
use alloc::vec::Vec;

use super::check_marginal;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::network::{Coupling, MARGINAL_TOL};

/// Optimal plan, its cost, and the number of simplex pivots taken.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub coupling: Coupling,
    pub objective: f64,
    pub pivots: usize,
}

/// Minimizes `sum cost(i,j) P(i,j)` over the transportation polytope of
/// `(mu, nu)`.
pub fn exact_ot(cost: &Matrix, mu: &[f64], nu: &[f64]) -> Result<ExactSolution> {
    let (m, n) = cost.shape();
    if mu.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: mu.len() });
    }
    if nu.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: nu.len() });
    }
    if m == 0 || n == 0 {
        return Err(Error::Infeasible);
    }
    if let Some((row, col, _)) = cost.indexed().find(|(_, _, c)| !c.is_finite()) {
        return Err(Error::NonFinite { row, col });
    }
    let mu = check_marginal(mu)?;
    let nu = check_marginal(nu)?;

    let mut simplex = Simplex::new(cost, &mu, &nu);
    let pivots = simplex.run()?;

    let mut plan = Matrix::zeros(m, n);
    let mut objective = 0.0;
    for i in 0..m {
        for j in 0..n {
            let f = simplex.flow[i * n + j].max(0.0);
            plan[(i, j)] = f;
            objective += f * cost[(i, j)];
        }
    }
    let coupling = Coupling::new(plan, mu, nu)?;
    Ok(ExactSolution { coupling, objective, pivots })
}

const NONE: usize = usize::MAX;

struct Simplex<'a> {
    cost: &'a Matrix,
    m: usize,
    n: usize,
    root: usize,
    art_cost: f64,
    /// Artificial arc of node `u` points `u -> root` (else `root -> u`).
    art_up: Vec<bool>,
    flow: Vec<f64>,
    in_tree: Vec<bool>,
    tree_adj: Vec<Vec<usize>>,
    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    /// Tree arc `pred[u]` points from `u` to `parent[u]`.
    pred_up: Vec<bool>,
    depth: Vec<usize>,
    rc_tol: f64,
    next_arc: usize,
    block: usize,
}

impl<'a> Simplex<'a> {
    fn new(cost: &'a Matrix, mu: &[f64], nu: &[f64]) -> Self {
        let (m, n) = cost.shape();
        let nodes = m + n;
        let real = m * n;
        let max_abs = cost.max_abs();
        let art_cost = (max_abs + 1.0) * (nodes + 1) as f64;

        let mut flow = vec![0.0; real + nodes];
        let mut in_tree = vec![false; real + nodes];
        let mut tree_adj = vec![Vec::new(); nodes + 1];
        let mut art_up = vec![true; nodes];
        for u in 0..nodes {
            let supply = if u < m { mu[u] } else { -nu[u - m] };
            let e = real + u;
            art_up[u] = supply >= 0.0;
            flow[e] = supply.abs();
            in_tree[e] = true;
            tree_adj[u].push(e);
            tree_adj[nodes].push(e);
        }
        let block = (crate::math::sqrt(real as f64) as usize).max(10).min(real.max(1));
        let mut s = Self {
            cost,
            m,
            n,
            root: nodes,
            art_cost,
            art_up,
            flow,
            in_tree,
            tree_adj,
            pi: vec![0.0; nodes + 1],
            parent: vec![NONE; nodes + 1],
            pred: vec![NONE; nodes + 1],
            pred_up: vec![false; nodes + 1],
            depth: vec![0; nodes + 1],
            rc_tol: 1e-13 * max_abs.max(f64::MIN_POSITIVE),
            next_arc: 0,
            block,
        };
        s.rebuild_tree();
        s
    }

    #[inline]
    fn real_arcs(&self) -> usize {
        self.m * self.n
    }

    fn endpoints(&self, e: usize) -> (usize, usize) {
        let real = self.real_arcs();
        if e < real {
            (e / self.n, self.m + e % self.n)
        } else {
            let u = e - real;
            if self.art_up[u] {
                (u, self.root)
            } else {
                (self.root, u)
            }
        }
    }

    fn arc_cost(&self, e: usize) -> f64 {
        let real = self.real_arcs();
        if e < real {
            self.cost.as_slice()[e]
        } else if self.art_up[e - real] {
            0.0
        } else {
            self.art_cost
        }
    }

    /// Recomputes parent pointers, depths and potentials from the root.
    fn rebuild_tree(&mut self) {
        let root = self.root;
        self.parent[root] = NONE;
        self.pred[root] = NONE;
        self.depth[root] = 0;
        self.pi[root] = 0.0;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for idx in 0..self.tree_adj[u].len() {
                let e = self.tree_adj[u][idx];
                if e == self.pred[u] {
                    continue;
                }
                let (s, t) = self.endpoints(e);
                let child = if s == u { t } else { s };
                let up = s == child;
                self.parent[child] = u;
                self.pred[child] = e;
                self.pred_up[child] = up;
                self.depth[child] = self.depth[u] + 1;
                // reduced cost c + pi[s] - pi[t] vanishes on tree arcs
                let c = self.arc_cost(e);
                self.pi[child] = if up { self.pi[u] - c } else { self.pi[u] + c };
                stack.push(child);
            }
        }
    }

    #[inline]
    fn reduced_cost(&self, e: usize) -> f64 {
        let i = e / self.n;
        let j = self.m + e % self.n;
        self.cost.as_slice()[e] + self.pi[i] - self.pi[j]
    }

    /// Block search pricing over real arcs.
    fn find_entering(&mut self) -> Option<usize> {
        let total = self.real_arcs();
        let mut best = NONE;
        let mut best_rc = 0.0;
        let mut scanned = 0;
        let mut in_block = 0;
        let mut e = self.next_arc;
        while scanned < total {
            if !self.in_tree[e] {
                let rc = self.reduced_cost(e);
                if rc < best_rc {
                    best_rc = rc;
                    best = e;
                }
            }
            scanned += 1;
            in_block += 1;
            e += 1;
            if e == total {
                e = 0;
            }
            if in_block == self.block {
                if best != NONE && best_rc < -self.rc_tol {
                    self.next_arc = e;
                    return Some(best);
                }
                in_block = 0;
            }
        }
        if best != NONE && best_rc < -self.rc_tol {
            self.next_arc = e;
            return Some(best);
        }
        None
    }

    fn join(&self, mut u: usize, mut v: usize) -> usize {
        while u != v {
            if self.depth[u] > self.depth[v] {
                u = self.parent[u];
            } else if self.depth[v] > self.depth[u] {
                v = self.parent[v];
            } else {
                u = self.parent[u];
                v = self.parent[v];
            }
        }
        u
    }

    fn pivot(&mut self, entering: usize) -> Result<()> {
        let (first, second) = self.endpoints(entering);
        let apex = self.join(first, second);

        let mut delta = f64::INFINITY;
        let mut leaving_node = NONE;
        let mut u = first;
        while u != apex {
            if self.pred_up[u] {
                let d = self.flow[self.pred[u]];
                if d < delta {
                    delta = d;
                    leaving_node = u;
                }
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != apex {
            if !self.pred_up[u] {
                let d = self.flow[self.pred[u]];
                if d <= delta {
                    delta = d;
                    leaving_node = u;
                }
            }
            u = self.parent[u];
        }
        if leaving_node == NONE {
            // an uncapacitated negative cycle; impossible with the artificial star
            return Err(Error::Infeasible);
        }

        if delta > 0.0 {
            let mut u = first;
            while u != apex {
                let e = self.pred[u];
                self.flow[e] += if self.pred_up[u] { -delta } else { delta };
                u = self.parent[u];
            }
            let mut u = second;
            while u != apex {
                let e = self.pred[u];
                self.flow[e] += if self.pred_up[u] { delta } else { -delta };
                u = self.parent[u];
            }
        }
        self.flow[entering] = delta;

        let leaving = self.pred[leaving_node];
        self.flow[leaving] = 0.0;
        self.in_tree[leaving] = false;
        let (ls, lt) = self.endpoints(leaving);
        for node in [ls, lt] {
            let adj = &mut self.tree_adj[node];
            if let Some(pos) = adj.iter().position(|&a| a == leaving) {
                adj.swap_remove(pos);
            }
        }
        self.in_tree[entering] = true;
        self.tree_adj[first].push(entering);
        self.tree_adj[second].push(entering);
        self.rebuild_tree();
        Ok(())
    }

    fn run(&mut self) -> Result<usize> {
        let limit = 50 * self.real_arcs() + 10_000;
        let mut pivots = 0;
        while let Some(e) = self.find_entering() {
            self.pivot(e)?;
            pivots += 1;
            if pivots > limit {
                return Err(Error::PivotLimit(limit));
            }
        }
        let real = self.real_arcs();
        let residual = self.flow[real..].iter().fold(0.0_f64, |m, &f| m.max(f));
        if residual > MARGINAL_TOL {
            return Err(Error::Infeasible);
        }
        Ok(pivots)
    }
}
