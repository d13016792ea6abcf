//! s-t paths in a directed acyclic graph.
//!
//! Coordinates are the internal nodes (every node except `s` and `t`, in
//! increasing node id) followed by all arcs. A path's indicator vector has a
//! one on each arc it uses and each internal node it visits.

use crate::atom::Atom;
use crate::error::{FwError, Result};
use crate::linalg::DenseVector;

use super::{CoordTag, ZERO_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct DagPaths {
    num_nodes: usize,
    source: usize,
    sink: usize,
    arcs: Vec<(usize, usize)>,
    node_coord: Vec<Option<usize>>,
    num_internal: usize,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

/// A pruned DAG together with where each input node and arc ended up.
#[derive(Debug, Clone)]
pub struct DagBuild {
    pub dag: DagPaths,
    pub node_map: Vec<Option<usize>>,
    pub arc_map: Vec<Option<usize>>,
}

fn adjacency(num_nodes: usize, arcs: &[(usize, usize)]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut out_arcs = vec![Vec::new(); num_nodes];
    let mut in_arcs = vec![Vec::new(); num_nodes];
    for (a, &(u, v)) in arcs.iter().enumerate() {
        out_arcs[u].push(a);
        in_arcs[v].push(a);
    }
    (out_arcs, in_arcs)
}

fn topo_order(num_nodes: usize, arcs: &[(usize, usize)], out_arcs: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; num_nodes];
    for &(_, v) in arcs {
        indeg[v] += 1;
    }
    let mut stack: Vec<usize> = (0..num_nodes).rev().filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(num_nodes);
    while let Some(u) = stack.pop() {
        order.push(u);
        for &a in out_arcs[u].iter().rev() {
            let v = arcs[a].1;
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    (order.len() == num_nodes).then_some(order)
}

/// Nodes reachable from `from` following `next` over arcs passing `alive`.
fn sweep(
    start: usize,
    num_nodes: usize,
    adj: &[Vec<usize>],
    arcs: &[(usize, usize)],
    forward: bool,
    alive: &dyn Fn(usize) -> bool,
) -> Vec<bool> {
    let mut seen = vec![false; num_nodes];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &a in &adj[u] {
            if !alive(a) {
                continue;
            }
            let w = if forward { arcs[a].1 } else { arcs[a].0 };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

impl DagPaths {
    /// Build from an arc list, inferring the unique source and sink.
    /// Isolated nodes are ignored.
    pub fn new(num_nodes: usize, arcs: Vec<(usize, usize)>) -> Result<Self> {
        check_arcs(num_nodes, &arcs)?;
        let (out_arcs, in_arcs) = adjacency(num_nodes, &arcs);
        let sources: Vec<_> = (0..num_nodes)
            .filter(|&v| in_arcs[v].is_empty() && !out_arcs[v].is_empty())
            .collect();
        let sinks: Vec<_> = (0..num_nodes)
            .filter(|&v| out_arcs[v].is_empty() && !in_arcs[v].is_empty())
            .collect();
        if sources.len() != 1 || sinks.len() != 1 {
            return Err(FwError::InvalidInstance(format!(
                "DAG needs exactly one source and one sink, found {} and {}",
                sources.len(),
                sinks.len()
            )));
        }
        Ok(Self::with_terminals(num_nodes, arcs, sources[0], sinks[0])?.dag)
    }

    /// Build with explicit terminals, pruning every node and arc that lies on
    /// no s-t path. Surviving nodes and arcs keep their relative order.
    pub fn with_terminals(num_nodes: usize, arcs: Vec<(usize, usize)>, source: usize, sink: usize) -> Result<DagBuild> {
        check_arcs(num_nodes, &arcs)?;
        if source >= num_nodes || sink >= num_nodes || source == sink {
            return Err(FwError::InvalidInstance("bad terminals".into()));
        }
        let (out_arcs, in_arcs) = adjacency(num_nodes, &arcs);
        if topo_order(num_nodes, &arcs, &out_arcs).is_none() {
            return Err(FwError::InvalidInstance("graph has a cycle".into()));
        }
        let reach = sweep(source, num_nodes, &out_arcs, &arcs, true, &|_| true);
        let coreach = sweep(sink, num_nodes, &in_arcs, &arcs, false, &|_| true);
        if !reach[sink] {
            return Err(FwError::InvalidInstance("no s-t path".into()));
        }
        let mut node_map = vec![None; num_nodes];
        let mut next = 0;
        for v in 0..num_nodes {
            if reach[v] && coreach[v] {
                node_map[v] = Some(next);
                next += 1;
            }
        }
        let mut arc_map = vec![None; arcs.len()];
        let mut kept = Vec::new();
        for (a, &(u, v)) in arcs.iter().enumerate() {
            if let (Some(nu), Some(nv)) = (node_map[u], node_map[v]) {
                arc_map[a] = Some(kept.len());
                kept.push((nu, nv));
            }
        }
        let dag = Self::assemble(next, kept, node_map[source].unwrap(), node_map[sink].unwrap());
        Ok(DagBuild { dag, node_map, arc_map })
    }

    fn assemble(num_nodes: usize, arcs: Vec<(usize, usize)>, source: usize, sink: usize) -> Self {
        let (out_arcs, in_arcs) = adjacency(num_nodes, &arcs);
        let topo = topo_order(num_nodes, &arcs, &out_arcs).expect("acyclic");
        let mut node_coord = vec![None; num_nodes];
        let mut num_internal = 0;
        for (v, slot) in node_coord.iter_mut().enumerate() {
            if v != source && v != sink {
                *slot = Some(num_internal);
                num_internal += 1;
            }
        }
        Self {
            num_nodes,
            source,
            sink,
            arcs,
            node_coord,
            num_internal,
            out_arcs,
            in_arcs,
            topo,
        }
    }

    /// Layered chain: `n_layers` layers of `k` labels, complete bipartite
    /// arcs between consecutive layers, `s` feeding layer 1 and the last
    /// layer feeding `t`. Node 0 is `s`, node `n_layers·k + 1` is `t`.
    pub fn chain(n_layers: usize, k: usize) -> Self {
        assert!(n_layers >= 1 && k >= 1, "chain needs at least one layer and label");
        let node = |i: usize, a: usize| 1 + i * k + a;
        let sink = n_layers * k + 1;
        let mut arcs = Vec::with_capacity(2 * k + (n_layers - 1) * k * k);
        for b in 0..k {
            arcs.push((0, node(0, b)));
        }
        for i in 0..n_layers - 1 {
            for a in 0..k {
                for b in 0..k {
                    arcs.push((node(i, a), node(i + 1, b)));
                }
            }
        }
        for a in 0..k {
            arcs.push((node(n_layers - 1, a), sink));
        }
        Self::assemble(sink + 1, arcs, 0, sink)
    }

    pub fn dim(&self) -> usize {
        self.num_internal + self.arcs.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_arcs[v]
    }

    pub fn node_coord(&self, v: usize) -> Option<usize> {
        self.node_coord[v]
    }

    pub fn arc_coord(&self, a: usize) -> usize {
        self.num_internal + a
    }

    fn node_cost(&self, g: &DenseVector, v: usize) -> f64 {
        self.node_coord[v].map_or(0.0, |c| g[c])
    }

    /// Indicator atom of a path given by its arcs.
    pub fn path_atom(&self, path: &[usize]) -> Atom {
        let mut ones = Vec::with_capacity(2 * path.len());
        for &a in path {
            ones.push(self.arc_coord(a));
            if let Some(c) = self.node_coord[self.arcs[a].1] {
                ones.push(c);
            }
        }
        Atom::from_coords(ones)
    }

    /// Cheapest s-t path under `sign·g` using arcs passing `allowed`.
    fn best_path(&self, g: &DenseVector, sign: f64, allowed: &dyn Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut dist = vec![f64::INFINITY; self.num_nodes];
        let mut pred = vec![usize::MAX; self.num_nodes];
        dist[self.source] = 0.0;
        for &v in &self.topo {
            if v == self.source {
                continue;
            }
            let nc = sign * self.node_cost(g, v);
            for &a in &self.in_arcs[v] {
                if !allowed(a) {
                    continue;
                }
                let du = dist[self.arcs[a].0];
                if du.is_finite() {
                    let cand = du + sign * g[self.arc_coord(a)] + nc;
                    if cand < dist[v] {
                        dist[v] = cand;
                        pred[v] = a;
                    }
                }
            }
        }
        if !dist[self.sink].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut v = self.sink;
        while v != self.source {
            let a = pred[v];
            path.push(a);
            v = self.arcs[a].0;
        }
        path.reverse();
        Some(path)
    }

    pub fn min_oracle(&self, g: &DenseVector) -> Atom {
        let path = self.best_path(g, 1.0, &|_| true).expect("pruned DAG has an s-t path");
        self.path_atom(&path)
    }

    /// Longest path on the subgraph of arcs carrying flow in `x`.
    pub fn face_max_oracle(&self, x: &DenseVector, g: &DenseVector) -> Result<Atom> {
        self.best_path(g, -1.0, &|a| x[self.arc_coord(a)] > ZERO_TOL)
            .map(|p| self.path_atom(&p))
            .ok_or(FwError::EmptyFace)
    }

    /// For every arc, the cheapest s-t path through it under `g`, computed by
    /// one forward and one backward pass.
    pub fn through_costs(&self, g: &DenseVector) -> Vec<f64> {
        let mut fwd = vec![f64::INFINITY; self.num_nodes];
        fwd[self.source] = 0.0;
        for &v in &self.topo {
            if v == self.source {
                continue;
            }
            let best = self.in_arcs[v]
                .iter()
                .map(|&a| fwd[self.arcs[a].0] + g[self.arc_coord(a)])
                .fold(f64::INFINITY, f64::min);
            fwd[v] = best + self.node_cost(g, v);
        }
        let mut bwd = vec![f64::INFINITY; self.num_nodes];
        bwd[self.sink] = 0.0;
        for &v in self.topo.iter().rev() {
            if v == self.sink {
                continue;
            }
            let best = self.out_arcs[v]
                .iter()
                .map(|&a| bwd[self.arcs[a].1] + g[self.arc_coord(a)])
                .fold(f64::INFINITY, f64::min);
            bwd[v] = best + self.node_cost(g, v);
        }
        self.arcs
            .iter()
            .enumerate()
            .map(|(a, &(u, v))| fwd[u] + g[self.arc_coord(a)] + bwd[v])
            .collect()
    }

    /// Arcs of the s-t path encoded by `atom`, in order from `s`.
    pub fn decode(&self, atom: &Atom) -> Option<Vec<usize>> {
        let mut path = Vec::new();
        let mut v = self.source;
        while v != self.sink {
            let mut next = self.out_arcs[v].iter().filter(|&&a| atom.contains(self.arc_coord(a)));
            let a = *next.next()?;
            if next.next().is_some() {
                return None;
            }
            path.push(a);
            v = self.arcs[a].1;
        }
        (self.path_atom(&path) == *atom).then_some(path)
    }

    pub fn is_vertex(&self, atom: &Atom) -> bool {
        atom.ones().iter().all(|&c| c < self.dim()) && self.decode(atom).is_some()
    }

    pub fn equality_violation(&self, x: &DenseVector) -> f64 {
        let flow = |arcs: &[usize]| arcs.iter().map(|&a| x[self.arc_coord(a)]).sum::<f64>();
        let mut worst = (flow(&self.out_arcs[self.source]) - 1.0)
            .abs()
            .max((flow(&self.in_arcs[self.sink]) - 1.0).abs());
        for v in 0..self.num_nodes {
            if let Some(c) = self.node_coord[v] {
                worst = worst
                    .max((flow(&self.in_arcs[v]) - x[c]).abs())
                    .max((flow(&self.out_arcs[v]) - x[c]).abs());
            }
        }
        worst
    }

    /// Fix the marked arcs to zero, prune arcs on no s-t path, and contract
    /// arcs that are the only way out of their tail and the only way into
    /// their head. Returns `None` if nothing changed.
    pub(crate) fn restrict_structure(&self, fixed: &[bool]) -> Option<(DagPaths, Vec<CoordTag>)> {
        let alive0 = |a: usize| !fixed[a];
        let reach = sweep(self.source, self.num_nodes, &self.out_arcs, &self.arcs, true, &alive0);
        let coreach = sweep(self.sink, self.num_nodes, &self.in_arcs, &self.arcs, false, &alive0);
        assert!(reach[self.sink], "reduction disconnected s from t");
        let alive_arc: Vec<bool> = self
            .arcs
            .iter()
            .enumerate()
            .map(|(a, &(u, v))| !fixed[a] && reach[u] && coreach[v])
            .collect();
        let alive_node: Vec<bool> = (0..self.num_nodes).map(|v| reach[v] && coreach[v]).collect();

        let mut outdeg = vec![0usize; self.num_nodes];
        let mut indeg = vec![0usize; self.num_nodes];
        for (a, &(u, v)) in self.arcs.iter().enumerate() {
            if alive_arc[a] {
                outdeg[u] += 1;
                indeg[v] += 1;
            }
        }
        let internal = |v: usize| v != self.source && v != self.sink;
        let mut parent: Vec<usize> = (0..self.num_nodes).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        let mut contracted = vec![false; self.arcs.len()];
        for (a, &(u, v)) in self.arcs.iter().enumerate() {
            if alive_arc[a] && internal(u) && internal(v) && outdeg[u] == 1 && indeg[v] == 1 {
                contracted[a] = true;
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                parent[rv.max(ru)] = ru.min(rv);
            }
        }

        let changed = alive_arc.iter().any(|&x| !x) || contracted.iter().any(|&x| x);
        if !changed {
            return None;
        }

        let mut group_id = vec![usize::MAX; self.num_nodes];
        let mut q_nodes = 0;
        for v in 0..self.num_nodes {
            if alive_node[v] {
                let r = find(&mut parent, v);
                if group_id[r] == usize::MAX {
                    group_id[r] = q_nodes;
                    q_nodes += 1;
                }
            }
        }
        let mut qid = |v: usize| group_id[find(&mut parent, v)];
        let mut q_arcs = Vec::new();
        let mut q_arc_of = vec![usize::MAX; self.arcs.len()];
        for (a, &(u, v)) in self.arcs.iter().enumerate() {
            if alive_arc[a] && !contracted[a] {
                q_arc_of[a] = q_arcs.len();
                q_arcs.push((qid(u), qid(v)));
            }
        }
        let build =
            DagPaths::with_terminals(q_nodes, q_arcs, qid(self.source), qid(self.sink)).expect("reduced DAG is valid");
        let q = build.dag;
        let q_node_coord = |qn: usize| {
            let mapped = build.node_map[qn].expect("reduced DAG needs no pruning");
            q.node_coord(mapped).expect("merged groups are internal")
        };

        let mut tags = Vec::with_capacity(self.dim());
        for v in 0..self.num_nodes {
            if self.node_coord[v].is_some() {
                tags.push(if alive_node[v] {
                    CoordTag::Linked(q_node_coord(qid(v)))
                } else {
                    CoordTag::Fixed(false)
                });
            }
        }
        for a in 0..self.arcs.len() {
            tags.push(if !alive_arc[a] {
                CoordTag::Fixed(false)
            } else if contracted[a] {
                CoordTag::Linked(q_node_coord(qid(self.arcs[a].0)))
            } else {
                let qa = build.arc_map[q_arc_of[a]].expect("reduced DAG needs no pruning");
                CoordTag::Linked(q.arc_coord(qa))
            });
        }
        Some((q, tags))
    }
}

fn check_arcs(num_nodes: usize, arcs: &[(usize, usize)]) -> Result<()> {
    for (a, &(u, v)) in arcs.iter().enumerate() {
        if u >= num_nodes || v >= num_nodes || u == v {
            return Err(FwError::InvalidInstance(format!("arc {a} ({u},{v}) invalid")));
        }
    }
    Ok(())
}
