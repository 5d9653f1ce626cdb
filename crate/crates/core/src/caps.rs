use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Enumeration limits. Exceeding any of them is an error, never a silent
/// truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Vertices of an explicitly built graph.
    pub max_vertices: u64,
    /// Label functions `m^M` enumerated by brute force.
    pub max_label_functions: u64,
    /// Outcomes of the hard distribution enumerated exactly.
    pub max_outcomes: u64,
    /// Maximal independent sets produced by any enumerator.
    pub max_independent_sets: u64,
    /// Vertices handed to the exact chromatic-number search.
    pub max_coloring_vertices: u64,
    /// Nodes of an explicitly materialized window tree.
    pub max_tree_nodes: u64,
    /// Elements of a window scanned element by element.
    pub max_window: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_vertices: 1_000_000,
            max_label_functions: 59_049,
            max_outcomes: 10_000_000,
            max_independent_sets: 1_000_000,
            max_coloring_vertices: 128,
            max_tree_nodes: 2_000_000,
            max_window: 1_000_000,
        }
    }
}

impl Caps {
    pub(crate) fn check(&self, cap: &'static str, requested: &BigUint, limit: u64) -> Result<()> {
        if *requested > BigUint::from(limit) {
            return Err(Error::cap(cap, requested, limit));
        }
        Ok(())
    }

    pub(crate) fn check_vertices(&self, count: &BigUint) -> Result<()> {
        self.check("max_vertices", count, self.max_vertices)
    }

    pub(crate) fn check_label_functions(&self, count: &BigUint) -> Result<()> {
        self.check("max_label_functions", count, self.max_label_functions)
    }

    pub(crate) fn check_outcomes(&self, count: &BigUint) -> Result<()> {
        self.check("max_outcomes", count, self.max_outcomes)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.max_vertices,
            self.max_label_functions,
            self.max_outcomes,
            self.max_independent_sets,
            self.max_coloring_vertices,
            self.max_tree_nodes,
            self.max_window,
        ];
        if fields.iter().any(|&c| c == 0) {
            return Err(Error::InvalidParams("caps must be positive".into()));
        }
        Ok(())
    }
}
