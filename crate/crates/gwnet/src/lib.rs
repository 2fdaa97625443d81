//! File formats, pairwise comparison pipelines and output emission for
//! [`gwnet_core`]. The `gwnet` binary is a thin front end over this crate.

pub mod emit;
pub mod error;
pub mod io;
pub mod pipeline;

pub use error::{Error, Result};
pub use gwnet_core as core;
