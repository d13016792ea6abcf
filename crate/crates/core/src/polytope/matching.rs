//! Perfect matching polytope of a bipartite graph; one coordinate per edge.

use crate::atom::Atom;
use crate::error::{FwError, Result};
use crate::linalg::DenseVector;

use super::hungarian::{hungarian, BipartiteGraph, HungarianResult};
use super::{CoordTag, ZERO_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteMatching {
    graph: BipartiteGraph,
}

impl BipartiteMatching {
    /// Fails unless the graph is balanced and has a perfect matching.
    pub fn new(graph: BipartiteGraph) -> Result<Self> {
        if graph.n_left() != graph.n_right() {
            return Err(FwError::InvalidInstance("unbalanced bipartite graph".into()));
        }
        let zeros = vec![0.0; graph.edges().len()];
        hungarian(&graph, &zeros, &|_| true)?;
        Ok(Self { graph })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.graph.edges().len()
    }

    pub fn num_left(&self) -> usize {
        self.graph.n_left()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.edges().len()
    }

    pub fn solve(&self, g: &DenseVector) -> HungarianResult {
        hungarian(&self.graph, g.as_slice(), &|_| true).expect("graph has a perfect matching")
    }

    pub fn min_oracle(&self, g: &DenseVector) -> Atom {
        Atom::from_coords(self.solve(g).edges)
    }

    /// Max-weight perfect matching on the edges carrying mass in `x`.
    pub fn face_max_oracle(&self, x: &DenseVector, g: &DenseVector) -> Result<Atom> {
        let neg: Vec<f64> = g.iter().map(|v| -v).collect();
        match hungarian(&self.graph, &neg, &|e| x[e] > ZERO_TOL) {
            Ok(res) => Ok(Atom::from_coords(res.edges)),
            Err(FwError::Infeasible) => Err(FwError::EmptyFace),
            Err(e) => Err(e),
        }
    }

    /// Right partner of each left vertex, if `atom` is a perfect matching.
    pub fn decode(&self, atom: &Atom) -> Option<Vec<usize>> {
        let n = self.num_left();
        if atom.len() != n {
            return None;
        }
        let mut partner = vec![usize::MAX; n];
        let mut right_used = vec![false; n];
        for &e in atom.ones() {
            let &(l, r) = self.graph.edges().get(e)?;
            if partner[l] != usize::MAX || right_used[r] {
                return None;
            }
            partner[l] = r;
            right_used[r] = true;
        }
        Some(partner)
    }

    pub fn is_vertex(&self, atom: &Atom) -> bool {
        self.decode(atom).is_some()
    }

    pub fn equality_violation(&self, x: &DenseVector) -> f64 {
        let n = self.num_left();
        let mut left = vec![0.0; n];
        let mut right = vec![0.0; n];
        for (e, &(l, r)) in self.graph.edges().iter().enumerate() {
            left[l] += x[e];
            right[r] += x[e];
        }
        left.iter().chain(&right).map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Fix the marked edges to zero, then repeatedly force degree-one
    /// vertices: their edge becomes one and the partner's other edges zero.
    pub(crate) fn restrict_structure(&self, fixed: &[bool]) -> Option<(BipartiteMatching, Vec<CoordTag>)> {
        let n = self.num_left();
        let edges = self.graph.edges();
        let mut state: Vec<Option<bool>> = fixed.iter().map(|&f| if f { Some(false) } else { None }).collect();
        let mut right_adj = vec![Vec::new(); n];
        for (e, &(_, r)) in edges.iter().enumerate() {
            right_adj[r].push(e);
        }
        let mut deg_left = vec![0usize; n];
        let mut deg_right = vec![0usize; n];
        for (e, &(l, r)) in edges.iter().enumerate() {
            if state[e].is_none() {
                deg_left[l] += 1;
                deg_right[r] += 1;
            }
        }
        let mut left_done = vec![false; n];
        let mut right_done = vec![false; n];
        // vertices are sides: (false, l) left, (true, r) right
        let mut queue: Vec<(bool, usize)> = (0..n)
            .filter(|&l| deg_left[l] == 1)
            .map(|l| (false, l))
            .chain((0..n).filter(|&r| deg_right[r] == 1).map(|r| (true, r)))
            .collect();
        queue.reverse();
        while let Some((right_side, i)) = queue.pop() {
            let done = if right_side { right_done[i] } else { left_done[i] };
            if done {
                continue;
            }
            let incident: Vec<usize> = if right_side {
                right_adj[i].clone()
            } else {
                self.graph.neighbors(i).iter().map(|&(_, e)| e).collect()
            };
            let free: Vec<usize> = incident.into_iter().filter(|&e| state[e].is_none()).collect();
            assert!(!free.is_empty(), "reduction destroyed all perfect matchings");
            if free.len() != 1 {
                continue;
            }
            let e = free[0];
            let (l, r) = edges[e];
            state[e] = Some(true);
            left_done[l] = true;
            right_done[r] = true;
            let mut drop = |f: usize, state: &mut Vec<Option<bool>>, queue: &mut Vec<(bool, usize)>| {
                if state[f].is_none() {
                    state[f] = Some(false);
                    let (fl, fr) = edges[f];
                    deg_left[fl] -= 1;
                    deg_right[fr] -= 1;
                    if deg_left[fl] == 1 && !left_done[fl] {
                        queue.push((false, fl));
                    }
                    if deg_right[fr] == 1 && !right_done[fr] {
                        queue.push((true, fr));
                    }
                }
            };
            let others: Vec<usize> = self
                .graph
                .neighbors(l)
                .iter()
                .map(|&(_, f)| f)
                .chain(right_adj[r].iter().copied())
                .filter(|&f| f != e)
                .collect();
            for f in others {
                drop(f, &mut state, &mut queue);
            }
        }

        if state.iter().all(Option::is_none) {
            return None;
        }
        let mut left_id = vec![usize::MAX; n];
        let mut right_id = vec![usize::MAX; n];
        let mut nl = 0;
        let mut nr = 0;
        for l in 0..n {
            if !left_done[l] {
                left_id[l] = nl;
                nl += 1;
            }
        }
        for r in 0..n {
            if !right_done[r] {
                right_id[r] = nr;
                nr += 1;
            }
        }
        let mut q_edges = Vec::new();
        let mut tags = Vec::with_capacity(edges.len());
        for (e, &(l, r)) in edges.iter().enumerate() {
            tags.push(match state[e] {
                Some(b) => CoordTag::Fixed(b),
                None => {
                    q_edges.push((left_id[l], right_id[r]));
                    CoordTag::Linked(q_edges.len() - 1)
                }
            });
        }
        let graph = BipartiteGraph::new(nl, nr, q_edges).expect("subgraph is valid");
        let q = BipartiteMatching::new(graph).expect("reduced graph keeps a perfect matching");
        Some((q, tags))
    }
}
