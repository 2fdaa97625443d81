//! Gromov-Wasserstein-type comparison of finite directed weighted measure
//! networks.
//!
//! A [`MeasureNetwork`] is a square weight matrix (arbitrary sign, possibly
//! asymmetric) together with a fully supported probability vector on its
//! nodes. This crate evaluates the p-distortion of couplings between two
//! networks, computes the hierarchy of optimal-transport lower bounds
//! (size, eccentricity, weight-distribution and local-distribution bounds),
//! sublevel size invariants and their interleaving distance, and runs an
//! entropic GW solver on a log-stabilized Sinkhorn stack.
//!
//! The crate is `no_std` (it needs `alloc`); file formats, the CLI and
//! parallel pair evaluation live in the `gwnet` companion crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod bounds;
pub mod cluster;
pub mod error;
pub mod generators;
pub mod gw;
pub mod invariants;
pub mod matrix;
mod math;
pub mod network;
pub mod ot;

pub use bounds::{BoundReport, Direction, TlbCostMatrix};
pub use cluster::{Dendrogram, DissimilarityMatrix, Merge};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use network::{Coupling, DiscreteDistribution, MeasureNetwork, Order};
pub use ot::{KernelState, SinkhornConfig, SinkhornDiagnostics, SinkhornSolution};
