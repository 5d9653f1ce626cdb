//! Desk-scale laboratory for the monotone minimal perfect hashing lower bound.
//!
//! The crate builds the combinatorial objects behind the bound and checks
//! them exactly:
//!
//! * [`graphs`]: conflict, offset, shift and product graphs, label functions
//!   and independent-set enumeration.
//! * [`coloring`]: exact chromatic and fractional chromatic numbers with
//!   primal/dual certificates in rational arithmetic.
//! * [`harddist`]: the iterated-window hard input distribution, its window
//!   ladders and exact enumeration oracles for small parameters.
//! * [`windowtree`]: window trees, sparse-node pruning and sampling paths.
//! * [`mmphf`]: concrete MMPHF schemes with bit-exact size accounting, the
//!   bit-string embedding and the coloring-extraction pipeline.
//!
//! Every operation that enumerates takes a [`Caps`] value and fails loudly
//! with [`Error::CapExceeded`] instead of truncating.

pub mod coloring;
pub mod error;
pub mod graphs;
pub mod harddist;
pub mod magnitude;
pub mod mmphf;
pub mod rational;
pub mod stats;
pub mod windowtree;

mod caps;

pub use caps::Caps;
pub use error::{Error, Result};

/// Crate version embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
