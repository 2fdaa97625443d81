//! Pairwise comparison of a network collection on a rayon pool.

use gwnet_core::bounds::{self, local_distributions, rtlb_from_cost, tlb_cost_from};
use gwnet_core::gw::{entropic_gw, GwConfig};
use gwnet_core::{DiscreteDistribution, DissimilarityMatrix, Matrix, MeasureNetwork, Order};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest network the pipeline accepts; bigger inputs should be subsampled.
pub const MAX_NODES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Max of the out and in local-distribution bounds.
    #[default]
    RtlbMax,
    /// Max of the out and in eccentricity bounds.
    Rflb,
    Rslb,
    Szlb,
    /// Twice the entropic GW value, so it sits on the same scale as the bounds.
    EntropicGw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub method: Method,
    pub p: Order,
    /// Entropic regularization, used by [`Method::EntropicGw`] only.
    pub lambda: f64,
    /// Pool size; `None` uses rayon's default.
    pub workers: Option<usize>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self { method: Method::RtlbMax, p: Order::TWO, lambda: 20.0, workers: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    pub left: String,
    pub right: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseResult {
    pub labels: Vec<String>,
    /// Symmetric; failed pairs hold NaN.
    #[serde(serialize_with = "serialize_matrix")]
    pub values: Matrix,
    pub failures: Vec<PairFailure>,
    pub method: Method,
    pub p: f64,
}

fn serialize_matrix<S: serde::Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    // NaN has no JSON form; failed entries become null.
    let rows: Vec<Vec<Option<f64>>> =
        m.to_rows().into_iter().map(|r| r.into_iter().map(|v| v.is_finite().then_some(v)).collect()).collect();
    rows.serialize(s)
}

impl PairwiseResult {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }

    /// Fails if any pair failed.
    pub fn dissimilarity(&self) -> Result<DissimilarityMatrix> {
        if let Some(f) = self.failures.first() {
            return Err(Error::Input(format!(
                "{} pair(s) failed, first {} vs {}: {}",
                self.failures.len(),
                f.left,
                f.right,
                f.error
            )));
        }
        Ok(DissimilarityMatrix::new(self.labels.clone(), self.values.clone())?)
    }
}

/// Per-network data reused across every pair it takes part in.
struct Prepared<'a> {
    network: &'a MeasureNetwork,
    local_out: Vec<DiscreteDistribution>,
    local_in: Vec<DiscreteDistribution>,
}

impl<'a> Prepared<'a> {
    fn new(network: &'a MeasureNetwork, method: Method) -> Self {
        let (local_out, local_in) = if method == Method::RtlbMax {
            (local_distributions(network, bounds::Direction::Out), local_distributions(network, bounds::Direction::In))
        } else {
            (Vec::new(), Vec::new())
        };
        Self { network, local_out, local_in }
    }
}

fn evaluate(x: &Prepared, y: &Prepared, opts: &CompareOptions) -> gwnet_core::Result<f64> {
    let (a, b, p) = (x.network, y.network, opts.p);
    Ok(match opts.method {
        Method::RtlbMax => {
            let out = tlb_cost_from(&x.local_out, &y.local_out, p, bounds::Direction::Out)?;
            let inn = tlb_cost_from(&x.local_in, &y.local_in, p, bounds::Direction::In)?;
            rtlb_from_cost(&out, a, b)?.0.max(rtlb_from_cost(&inn, a, b)?.0)
        }
        Method::Rflb => {
            bounds::rflb(a, b, p, bounds::Direction::Out).max(bounds::rflb(a, b, p, bounds::Direction::In))
        }
        Method::Rslb => bounds::rslb(a, b, p),
        Method::Szlb => bounds::szlb(a, b, p),
        Method::EntropicGw => 2.0 * entropic_gw(a, b, &GwConfig::new(opts.lambda))?.value,
    })
}

/// Checks the node limit for every named network.
pub fn check_sizes(networks: &[(String, MeasureNetwork)]) -> Result<()> {
    match networks.iter().find(|(_, x)| x.len() > MAX_NODES) {
        Some((name, x)) => Err(Error::TooLarge { name: name.clone(), nodes: x.len(), limit: MAX_NODES }),
        None => Ok(()),
    }
}

/// Evaluates `opts.method` on every unordered pair. Individual pair
/// failures are collected rather than aborting the run.
pub fn compare_all(networks: &[(String, MeasureNetwork)], opts: &CompareOptions) -> Result<PairwiseResult> {
    check_sizes(networks)?;
    if opts.method == Method::EntropicGw && !(opts.lambda.is_finite() && opts.lambda > 0.0) {
        return Err(Error::Input(format!("lambda must be positive, got {}", opts.lambda)));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Input(format!("cannot build worker pool: {e}")))?;
    let k = networks.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let results: Vec<(usize, usize, gwnet_core::Result<f64>)> = pool.install(|| {
        let prepared: Vec<Prepared> = networks.par_iter().map(|(_, x)| Prepared::new(x, opts.method)).collect();
        pairs.par_iter().map(|&(i, j)| (i, j, evaluate(&prepared[i], &prepared[j], opts))).collect()
    });
    let mut values = Matrix::zeros(k, k);
    let mut failures = Vec::new();
    for (i, j, r) in results {
        let v = match r {
            Ok(v) => v,
            Err(e) => {
                failures.push(PairFailure {
                    i,
                    j,
                    left: networks[i].0.clone(),
                    right: networks[j].0.clone(),
                    error: e.to_string(),
                });
                f64::NAN
            }
        };
        values[(i, j)] = v;
        values[(j, i)] = v;
    }
    Ok(PairwiseResult {
        labels: networks.iter().map(|(n, _)| n.clone()).collect(),
        values,
        failures,
        method: opts.method,
        p: opts.p.value(),
    })
}
