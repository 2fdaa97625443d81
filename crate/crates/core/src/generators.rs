//! Random and structured network generators: Gaussian network SBMs, cycle
//! networks and the two preset experiment families.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::math::sqrt;
use crate::network::MeasureNetwork;

/// Block model: entry `(x, x')` with `x` in block `i` and `x'` in block `j`
/// is drawn from `Normal(means[i][j], variances[i][j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub means: Matrix,
    pub variances: Matrix,
    pub block_sizes: Vec<usize>,
    pub seed: u64,
}

impl SbmSpec {
    pub fn new(means: Matrix, variances: Matrix, block_sizes: Vec<usize>, seed: u64) -> Result<Self> {
        let spec = Self { means, variances, block_sizes, seed };
        spec.validate()?;
        Ok(spec)
    }

    /// Cycle-network means `G_N(v)` with a common variance and block size.
    pub fn cycle(v: &[f64], variance: f64, block_size: usize, seed: u64) -> Result<Self> {
        let n = v.len();
        Self::new(cycle_network(v), Matrix::filled(n, n, variance), vec![block_size; n], seed)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn node_count(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let b = self.block_sizes.len();
        if b == 0 {
            return Err(Error::InvalidSpec("at least one block is required"));
        }
        for mat in [&self.means, &self.variances] {
            if !mat.is_square() {
                return Err(Error::NonSquareWeights { rows: mat.rows(), cols: mat.cols() });
            }
            if mat.rows() != b {
                return Err(Error::DimensionMismatch { expected: b, found: mat.rows() });
            }
            if let Some((row, col, _)) = mat.indexed().find(|(_, _, v)| !v.is_finite()) {
                return Err(Error::NonFinite { row, col });
            }
        }
        if self.variances.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidSpec("variances must be nonnegative"));
        }
        if let Some(i) = self.block_sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyBlock(i));
        }
        Ok(())
    }

    /// Block index of every node.
    pub fn membership(&self) -> Vec<usize> {
        self.block_sizes.iter().enumerate().flat_map(|(b, &s)| core::iter::repeat_n(b, s)).collect()
    }
}

/// Samples one network from `spec` with uniform node measure. Entries are
/// drawn row by row from a ChaCha8 stream seeded by `spec.seed`, so output
/// is identical across platforms.
pub fn sbm_sample(spec: &SbmSpec) -> Result<MeasureNetwork> {
    spec.validate()?;
    let block = spec.membership();
    let b = spec.blocks();
    let mut dists = Vec::with_capacity(b * b);
    for (i, j, mean) in spec.means.indexed() {
        let sd = sqrt(spec.variances[(i, j)]);
        dists.push(Normal::new(mean, sd).map_err(|_| Error::InvalidSpec("invalid normal parameters"))?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = block.len();
    let mut data = Vec::with_capacity(n * n);
    for &bi in &block {
        for &bj in &block {
            data.push(dists[bi * b + bj].sample(&mut rng));
        }
    }
    MeasureNetwork::uniform(Matrix::from_vec(n, n, data)?)
}

/// `G_N(v)`: entry `(i, j) = v[(j - i) mod N]`, so each row is the
/// previous one shifted right by one.
pub fn cycle_network(v: &[f64]) -> Matrix {
    let n = v.len();
    Matrix::from_fn(n, n, |i, j| v[(j + n - i) % n])
}

/// One class of a preset experiment: the cycle seed vector and block
/// size behind its spec.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetClass {
    pub v: Vec<f64>,
    pub block_size: usize,
    pub variance: f64,
}

impl PresetClass {
    pub fn spec(&self, seed: u64) -> SbmSpec {
        SbmSpec::cycle(&self.v, self.variance, self.block_size, seed).expect("preset classes are valid")
    }
}

pub const PRESET_NAMES: [&str; 2] = ["table1", "table3"];

/// The class definitions of a named preset.
pub fn preset_classes(name: &str) -> Result<Vec<PresetClass>> {
    let class = |v: &[f64], block_size| PresetClass { v: v.to_vec(), block_size, variance: 5.0 };
    match name {
        "table1" => Ok(vec![
            class(&[0.0, 25.0, 50.0, 75.0, 100.0], 10),
            class(&[0.0, 50.0, 100.0, 150.0, 200.0], 10),
            class(&[0.0, 25.0, 50.0, 75.0, 100.0], 20),
            class(&[0.0, 100.0], 25),
            class(&[-100.0, -50.0, 0.0, 50.0, 100.0], 10),
        ]),
        "table3" => Ok([0.0, 5.0, 10.0, 15.0, 20.0].iter().map(|&s| class(&[0.0, s], 10)).collect()),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// One spec per class of the named preset, all with seed 0.
pub fn experiment_preset(name: &str) -> Result<Vec<SbmSpec>> {
    Ok(preset_classes(name)?.iter().map(|c| c.spec(0)).collect())
}

/// SplitMix64 finalizer, used to derive well-spread per-network seeds.
pub fn mix_seed(base: u64, class: usize, index: usize) -> u64 {
    let mut z = base
        .wrapping_add((class as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((index as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A sampled network together with its label and class index.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledNetwork {
    pub label: String,
    pub class: usize,
    pub network: MeasureNetwork,
}

/// Draws `per_class` networks from every spec, labelled `c{class}_{k}`
/// with 1-based class numbers. Seeds come from [`mix_seed`].
pub fn sample_collection(specs: &[SbmSpec], per_class: usize, base_seed: u64) -> Result<Vec<LabeledNetwork>> {
    let mut out = Vec::with_capacity(specs.len() * per_class);
    for (c, spec) in specs.iter().enumerate() {
        for k in 0..per_class {
            let s = spec.clone().with_seed(mix_seed(base_seed, c, k));
            out.push(LabeledNetwork { label: format!("c{}_{}", c + 1, k), class: c, network: sbm_sample(&s)? });
        }
    }
    Ok(out)
}

/// `omega / max |omega|`.
pub fn normalize_max_abs(x: &MeasureNetwork) -> Result<MeasureNetwork> {
    let m = x.weights().max_abs();
    if m == 0.0 {
        return Err(Error::ZeroNetwork);
    }
    x.with_weights(x.weights().map(|w| w / m))
}
