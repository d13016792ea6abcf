//! Combinatorial polytopes and their oracles.
//!
//! All three families are `{x ≥ 0, equalities}` with vertices in `{0,1}ⁿ`:
//! the probability simplex, unit s-t flows in a DAG (node and arc
//! coordinates), and the perfect matching polytope of a bipartite graph.

mod dag;
mod graph_io;
mod hungarian;
mod mapping;
mod matching;
mod reduce;
mod simplex;

pub use dag::DagPaths;
pub use graph_io::{parse_graph, write_graph, GraphSpec};
pub use hungarian::{hungarian, BipartiteGraph, HungarianResult};
pub use mapping::{CoordTag, MappingDescriptor};
pub use matching::BipartiteMatching;
pub use reduce::{reduce, reduced_count, ReduceOutcome, ReduceResult};
pub use simplex::Simplex;

use crate::atom::Atom;
use crate::error::{FwError, Result};
use crate::linalg::DenseVector;

/// Coordinates at or below this value count as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Tolerance on equality constraints.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Polytope {
    Simplex(Simplex),
    Dag(DagPaths),
    Matching(BipartiteMatching),
}

impl Polytope {
    pub fn simplex(n: usize) -> Self {
        Self::Simplex(Simplex::new(n))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Simplex(p) => p.dim(),
            Self::Dag(p) => p.dim(),
            Self::Matching(p) => p.dim(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Simplex(_) => "simplex",
            Self::Dag(_) => "dag",
            Self::Matching(_) => "pm",
        }
    }

    /// Vertex minimizing `⟨g, ·⟩`, ties to the lowest encoding.
    pub fn min_oracle(&self, g: &DenseVector) -> Atom {
        assert_eq!(g.len(), self.dim(), "min_oracle: dimension");
        match self {
            Self::Simplex(p) => p.min_oracle(g),
            Self::Dag(p) => p.min_oracle(g),
            Self::Matching(p) => p.min_oracle(g),
        }
    }

    /// Vertex maximizing `⟨g, ·⟩` over the minimal face containing `x`.
    pub fn face_max_oracle(&self, x: &DenseVector, g: &DenseVector) -> Result<Atom> {
        assert_eq!(g.len(), self.dim(), "face_max_oracle: dimension");
        assert_eq!(x.len(), self.dim(), "face_max_oracle: dimension");
        match self {
            Self::Simplex(p) => p.face_max_oracle(x, g),
            Self::Dag(p) => p.face_max_oracle(x, g),
            Self::Matching(p) => p.face_max_oracle(x, g),
        }
    }

    /// Largest `η ≥ 0` with `x + ηd ≥ 0`.
    ///
    /// Upper bounds `x ≤ 1` are implied by the equality systems of all three
    /// families, so only the nonnegativity ratio test is needed.
    pub fn max_feasible_step(&self, x: &DenseVector, d: &DenseVector) -> Result<f64> {
        assert_eq!(x.len(), d.len(), "max_feasible_step: dimension");
        let mut eta = f64::INFINITY;
        for (xi, di) in x.iter().zip(d.iter()) {
            if *di < -ZERO_TOL {
                eta = eta.min(xi.max(0.0) / -di);
            }
        }
        if eta.is_finite() {
            Ok(eta)
        } else {
            Err(FwError::NoBlocking)
        }
    }

    pub fn is_vertex(&self, atom: &Atom) -> bool {
        match self {
            Self::Simplex(p) => p.is_vertex(atom),
            Self::Dag(p) => p.is_vertex(atom),
            Self::Matching(p) => p.is_vertex(atom),
        }
    }

    /// Largest violation of the equality constraints or nonnegativity.
    pub fn infeasibility(&self, x: &DenseVector) -> f64 {
        assert_eq!(x.len(), self.dim(), "infeasibility: dimension");
        let neg = x.iter().fold(0.0f64, |acc, &v| acc.max(-v));
        let eq = match self {
            Self::Simplex(p) => p.equality_violation(x),
            Self::Dag(p) => p.equality_violation(x),
            Self::Matching(p) => p.equality_violation(x),
        };
        neg.max(eq)
    }

    pub fn is_feasible(&self, x: &DenseVector) -> bool {
        let neg = x.iter().fold(0.0f64, |acc, &v| acc.max(-v));
        neg <= ZERO_TOL && self.infeasibility(x) <= FEAS_TOL
    }

    /// Work units charged per min- or max-oracle call.
    pub fn oracle_cost(&self) -> u64 {
        match self {
            Self::Simplex(p) => p.dim() as u64,
            Self::Dag(p) => (p.num_nodes() + p.num_arcs()) as u64,
            Self::Matching(p) => (p.num_left().max(1) * p.num_edges().max(1)) as u64,
        }
    }

    /// A fixed, deterministic starting vertex: the min-oracle answer for the
    /// all-ones cost vector.
    pub fn initial_atom(&self) -> Atom {
        self.min_oracle(&DenseVector::from_vec(vec![1.0; self.dim()]))
    }
}
