//! Spin-network topology and control parameters.

use crate::error::Error;
use crate::num::Float;
use crate::Result;

/// Lattice tag.
///
/// `NnNnnChain` is the open chain with nearest- and next-nearest-neighbor
/// couplings; `Triangle` is its `n = 3` special case (the smallest
/// frustrated lattice). `Custom` carries an explicit edge set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Triangle,
    NnNnnChain,
    Custom,
}

/// Undirected spin network: site count plus coupling edges.
///
/// Edges are stored normalized as `(min, max)` pairs, sorted, without
/// duplicates or self-loops. Each edge carries a dimensionless weight
/// (1 unless overridden) that multiplies the scheduled coupling `J(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinNetwork {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
    topology: Topology,
}

impl SpinNetwork {
    /// Three sites, all pairs coupled.
    pub fn triangle() -> Self {
        Self {
            n: 3,
            edges: vec![(0, 1), (0, 2), (1, 2)],
            weights: vec![1.0; 3],
            topology: Topology::Triangle,
        }
    }

    /// Open chain of `n` sites with nearest- and next-nearest-neighbor edges.
    pub fn nn_nnn_chain(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidNetwork("site count must be >= 1".into()));
        }
        let mut edges = Vec::new();
        for i in 0..n.saturating_sub(1) {
            edges.push((i, i + 1));
        }
        for i in 0..n.saturating_sub(2) {
            edges.push((i, i + 2));
        }
        edges.sort_unstable();
        let weights = vec![1.0; edges.len()];
        Ok(Self {
            n,
            edges,
            weights,
            topology: Topology::NnNnnChain,
        })
    }

    /// Network with an explicit edge set.
    pub fn custom(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::custom_weighted(n, edges, &vec![1.0; edges.len()])
    }

    /// Network with an explicit edge set and per-edge coupling weights.
    pub fn custom_weighted(
        n: usize,
        edges: &[(usize, usize)],
        weights: &[f64],
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidNetwork("site count must be >= 1".into()));
        }
        if weights.len() != edges.len() {
            return Err(Error::InvalidNetwork(format!(
                "{} weights for {} edges",
                weights.len(),
                edges.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidNetwork("non-finite edge weight".into()));
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (&(i, j), &w) in edges.iter().zip(weights) {
            if i == j {
                return Err(Error::InvalidNetwork(format!("self-loop at site {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            norm.push(((i.min(j), i.max(j)), w));
        }
        norm.sort_unstable_by_key(|&(e, _)| e);
        if norm.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidNetwork("duplicate edge".into()));
        }
        Ok(Self {
            n,
            edges: norm.iter().map(|&(e, _)| e).collect(),
            weights: norm.iter().map(|&(_, w)| w).collect(),
            topology: Topology::Custom,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Per-edge coupling weights, ordered like [`SpinNetwork::edges`].
    pub fn edge_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Hilbert-space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1usize << self.n
    }
}

/// Per-site and per-edge control parameters, in GHz.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlParams<T> {
    /// Per-site bias `eps_i`. Zero throughout the sweep protocol.
    pub epsilon: Vec<T>,
    /// Per-site tunneling `delta_i`.
    pub delta: Vec<T>,
    /// Per-edge coupling `J_ij`, ordered like [`SpinNetwork::edges`].
    pub j: Vec<T>,
}

impl<T: Float> ControlParams<T> {
    /// Uniform parameters sized to `network`.
    pub fn uniform(network: &SpinNetwork, epsilon: T, delta: T, j: T) -> Self {
        Self {
            epsilon: vec![epsilon; network.n()],
            delta: vec![delta; network.n()],
            j: vec![j; network.edges().len()],
        }
    }

    /// Checks sizes against `network` and that every value is finite.
    pub fn validate(&self, network: &SpinNetwork) -> Result<()> {
        if self.epsilon.len() != network.n() || self.delta.len() != network.n() {
            return Err(Error::DimensionMismatch {
                expected: network.n(),
                got: self.epsilon.len().min(self.delta.len()),
            });
        }
        if self.j.len() != network.edges().len() {
            return Err(Error::DimensionMismatch {
                expected: network.edges().len(),
                got: self.j.len(),
            });
        }
        let finite = |v: &[T]| v.iter().all(|x| x.is_finite());
        if !finite(&self.epsilon) || !finite(&self.delta) || !finite(&self.j) {
            return Err(Error::InvalidNetwork("non-finite control parameter".into()));
        }
        Ok(())
    }
}
