//! Correlation taxonomies: signals or feature vectors are turned into Pearson
//! correlations, mapped to the metric `d = sqrt(2 (1 - c))`, reduced to a
//! minimum spanning tree and read back as the subdominant ultrametric.
//!
//! [`tail_exponent`] estimates a power-law tail with the Hill estimator.

mod correlation;
mod mst;
mod tail;
mod ultrametric;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use correlation::{correlation, log_returns, ultrametric_distance};
pub use mst::{minimum_spanning_tree, UnionFind};
pub use tail::{default_k, tail_exponent, TailFit};
pub use ultrametric::subdominant_ultrametric;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaxonomyError {
    #[error("series needs at least {needed} values, got {found}")]
    TooShort { needed: usize, found: usize },
    #[error("price at index {index} is not positive ({value})")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("need at least 2 series, got {0}")]
    TooFewSeries(usize),
    #[error("series `{0}` is constant (zero variance)")]
    ConstantSeries(String),
    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("k = {k} out of range 1..{positive} (positive samples)")]
    KOutOfRange { k: usize, positive: usize },
    #[error("degenerate tail: the {k} largest samples all equal the threshold")]
    DegenerateTail { k: usize },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
}

/// Square labelled matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledMatrix {
    pub labels: Vec<String>,
    values: Vec<f64>,
}

impl LabelledMatrix {
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = labels.len();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        LabelledMatrix { labels, values }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n().max(1))
    }
}

/// Pearson correlations: symmetric, unit diagonal, entries in [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorrelationMatrix(pub LabelledMatrix);

/// Distances: symmetric, zero diagonal, entries in [0, 2] for correlation metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceMatrix(pub LabelledMatrix);

impl std::ops::Deref for CorrelationMatrix {
    type Target = LabelledMatrix;
    fn deref(&self) -> &LabelledMatrix {
        &self.0
    }
}

impl std::ops::Deref for DistanceMatrix {
    type Target = LabelledMatrix;
    fn deref(&self) -> &LabelledMatrix {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Weighted spanning tree over labelled nodes; edges index into `labels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub labels: Vec<String>,
    pub edges: Vec<TreeEdge>,
}

impl Tree {
    /// Checks n - 1 edges, no self-edges, nonnegative weights and connectivity.
    pub fn validate(&self) -> Result<(), TaxonomyError> {
        let n = self.labels.len();
        if n == 0 {
            return Err(TaxonomyError::InvalidTree("no nodes".into()));
        }
        if self.edges.len() != n - 1 {
            return Err(TaxonomyError::InvalidTree(format!(
                "{} edges for {n} nodes",
                self.edges.len()
            )));
        }
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            if e.a >= n || e.b >= n {
                return Err(TaxonomyError::InvalidTree("edge endpoint out of range".into()));
            }
            if e.a == e.b {
                return Err(TaxonomyError::InvalidTree(format!("self-edge at `{}`", self.labels[e.a])));
            }
            if !(e.weight >= 0.0 && e.weight.is_finite()) {
                return Err(TaxonomyError::InvalidTree("negative or non-finite weight".into()));
            }
            if !uf.union(e.a, e.b) {
                return Err(TaxonomyError::InvalidTree("disconnected (edges form a cycle)".into()));
            }
        }
        Ok(())
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Adjacency lists with neighbors sorted by label.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.labels.len()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.weight));
            adj[e.b].push((e.a, e.weight));
        }
        for list in &mut adj {
            list.sort_by(|x, y| self.labels[x.0].cmp(&self.labels[y.0]));
        }
        adj
    }
}
