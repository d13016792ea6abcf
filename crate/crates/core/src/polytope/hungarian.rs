//! Minimum-cost perfect matching on a sparse bipartite graph.
//!
//! Shortest augmenting paths with vertex potentials (the O(n²·deg) form of
//! the Hungarian method). The potentials are returned as LP duals: every
//! allowed edge has nonnegative reduced cost `c_e − u_i − v_j`, matched
//! edges are tight, and `Σu + Σv` equals the matching cost.

use crate::error::{FwError, Result};

/// Undirected bipartite graph with `n_left` and `n_right` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<(usize, usize)>,
    adj_left: Vec<Vec<(usize, usize)>>,
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut adj_left = vec![Vec::new(); n_left];
        for (e, &(l, r)) in edges.iter().enumerate() {
            if l >= n_left || r >= n_right {
                return Err(FwError::InvalidInstance(format!("edge {e} ({l},{r}) out of range")));
            }
            if adj_left[l].iter().any(|&(rr, _)| rr == r) {
                return Err(FwError::InvalidInstance(format!("parallel edge ({l},{r})")));
            }
            adj_left[l].push((r, e));
        }
        Ok(Self {
            n_left,
            n_right,
            edges,
            adj_left,
        })
    }

    /// Complete bipartite graph `K_{n,n}` with edges in row-major order.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|l| (0..n).map(move |r| (l, r))).collect();
        Self::new(n, n, edges).expect("complete graph is valid")
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `(right vertex, edge id)` pairs incident to a left vertex.
    pub fn neighbors(&self, left: usize) -> &[(usize, usize)] {
        &self.adj_left[left]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HungarianResult {
    /// Right partner of each left vertex.
    pub matching: Vec<usize>,
    /// Edge id used by each left vertex.
    pub edges: Vec<usize>,
    pub cost: f64,
    /// Left-vertex duals.
    pub u: Vec<f64>,
    /// Right-vertex duals.
    pub v: Vec<f64>,
}

impl HungarianResult {
    /// Reduced cost `c_e − u_l − v_r` of edge `e`.
    pub fn slack(&self, graph: &BipartiteGraph, costs: &[f64], e: usize) -> f64 {
        let (l, r) = graph.edges[e];
        costs[e] - self.u[l] - self.v[r]
    }
}

/// Minimum-cost perfect matching using only edges with `allowed(e)`.
pub fn hungarian(graph: &BipartiteGraph, costs: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<HungarianResult> {
    assert_eq!(costs.len(), graph.edges.len(), "hungarian: one cost per edge");
    if graph.n_left != graph.n_right {
        return Err(FwError::Infeasible);
    }
    let n = graph.n_left;
    let inf = f64::INFINITY;
    // 1-based rows/columns; column 0 is the virtual root of each search
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        minv.fill(inf);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            for &(r, e) in &graph.adj_left[i0 - 1] {
                let j = r + 1;
                if used[j] || !allowed(e) {
                    continue;
                }
                let cur = costs[e] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
            }
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] && minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if j1 == 0 {
                return Err(FwError::Infeasible);
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut matching = vec![0; n];
    let mut edges = vec![0; n];
    for j in 1..=n {
        let l = row_of[j] - 1;
        matching[l] = j - 1;
        edges[l] = graph.adj_left[l]
            .iter()
            .find(|&&(r, e)| r == j - 1 && allowed(e))
            .map(|&(_, e)| e)
            .expect("matched pair has an allowed edge");
    }
    let cost = edges.iter().map(|&e| costs[e]).sum();
    Ok(HungarianResult {
        matching,
        edges,
        cost,
        u: u[1..].to_vec(),
        v: v[1..].to_vec(),
    })
}
