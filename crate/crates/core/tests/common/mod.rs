//! Independent reference oracles shared by the integration tests.
#![allow(dead_code)]

use facet_core::polytope::{BipartiteGraph, BipartiteMatching, DagPaths};
use facet_core::{Atom, ColMatrix, DenseVector, Polytope, QuadraticObjective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DenseVector {
    (0..n).map(|_| rng.random_range(lo..hi)).collect::<Vec<_>>().into()
}

pub fn random_ls(rng: &mut ChaCha8Rng, m: usize, n: usize) -> QuadraticObjective {
    let a = ColMatrix::from_col_major(m, n, (0..m * n).map(|_| rng.random::<f64>()).collect());
    let b = (0..m).map(|_| rng.random_range(0.0..2.0)).collect();
    QuadraticObjective::least_squares(a, b)
}

/// Every s-t path of the DAG as an atom, by depth-first search; `None` once
/// more than `limit` paths exist.
pub fn enumerate_paths(dag: &DagPaths, limit: usize) -> Option<Vec<Atom>> {
    fn walk(dag: &DagPaths, v: usize, path: &mut Vec<usize>, out: &mut Vec<Atom>, limit: usize) -> bool {
        if v == dag.sink() {
            out.push(dag.path_atom(path));
            return out.len() <= limit;
        }
        for &a in dag.out_arcs(v) {
            path.push(a);
            let ok = walk(dag, dag.arcs()[a].1, path, out, limit);
            path.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    walk(dag, dag.source(), &mut Vec::new(), &mut out, limit).then_some(out)
}

/// Every perfect matching of the graph as an atom of edge indices.
pub fn enumerate_matchings(g: &BipartiteGraph) -> Vec<Atom> {
    fn walk(g: &BipartiteGraph, l: usize, used: &mut [bool], edges: &mut Vec<usize>, out: &mut Vec<Atom>) {
        if l == g.n_left() {
            out.push(Atom::from_coords(edges.clone()));
            return;
        }
        for &(r, e) in g.neighbors(l) {
            if !used[r] {
                used[r] = true;
                edges.push(e);
                walk(g, l + 1, used, edges, out);
                edges.pop();
                used[r] = false;
            }
        }
    }
    let mut out = Vec::new();
    walk(g, 0, &mut vec![false; g.n_right()], &mut Vec::new(), &mut out);
    out
}

/// Every vertex of a polytope small enough to enumerate.
pub fn enumerate_vertices(p: &Polytope) -> Vec<Atom> {
    match p {
        Polytope::Simplex(s) => (0..s.dim()).map(Atom::unit).collect(),
        Polytope::Dag(d) => enumerate_paths(d, 100_000).expect("enumerable DAG"),
        Polytope::Matching(m) => enumerate_matchings(m.graph()),
    }
}

/// Brute-force argmin of `⟨g, ·⟩` over the atoms, first index on ties.
pub fn argmin<'a>(atoms: &'a [Atom], g: &DenseVector) -> &'a Atom {
    let mut best = &atoms[0];
    let mut val = best.dot(g);
    for a in &atoms[1..] {
        let v = a.dot(g);
        if v < val {
            best = a;
            val = v;
        }
    }
    best
}

pub fn argmax<'a>(atoms: &'a [Atom], g: &DenseVector) -> &'a Atom {
    let neg: DenseVector = g.iter().map(|v| -v).collect::<Vec<_>>().into();
    argmin(atoms, &neg)
}

/// Atoms whose coordinates all lie in the support of `x`.
pub fn face_atoms(atoms: &[Atom], x: &DenseVector) -> Vec<Atom> {
    atoms
        .iter()
        .filter(|a| a.ones().iter().all(|&i| x[i] > 1e-12))
        .cloned()
        .collect()
}

/// Layered DAG with random arc subsets; pruning removes dead ends.
pub fn random_dag(rng: &mut ChaCha8Rng, layers: usize, width: usize, density: f64) -> DagPaths {
    loop {
        let node = |i: usize, a: usize| 1 + i * width + a;
        let sink = layers * width + 1;
        let mut arcs = Vec::new();
        for b in 0..width {
            if rng.random::<f64>() < density {
                arcs.push((0, node(0, b)));
            }
        }
        for i in 0..layers - 1 {
            for a in 0..width {
                for b in 0..width {
                    if rng.random::<f64>() < density {
                        arcs.push((node(i, a), node(i + 1, b)));
                    }
                }
            }
        }
        for a in 0..width {
            if rng.random::<f64>() < density {
                arcs.push((node(layers - 1, a), sink));
            }
        }
        // occasional skip arcs make the graph non-layered
        for _ in 0..width {
            let i = rng.random_range(0..layers);
            let j = rng.random_range(i..layers);
            if j > i + 1 {
                arcs.push((node(i, rng.random_range(0..width)), node(j, rng.random_range(0..width))));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        if let Ok(build) = DagPaths::with_terminals(sink + 1, arcs, 0, sink) {
            return build.dag;
        }
    }
}

pub fn random_matching_polytope(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BipartiteMatching {
    let g = facet_core::instances::regular_bipartite(rng, n, k).unwrap();
    BipartiteMatching::new(g).unwrap()
}

/// A random convex combination of `k` oracle atoms, with those atoms.
pub fn random_mixture(rng: &mut ChaCha8Rng, p: &Polytope, k: usize) -> (Vec<(Atom, f64)>, DenseVector) {
    let n = p.dim();
    let mut atoms: Vec<Atom> = Vec::new();
    for _ in 0..k {
        let a = p.min_oracle(&random_vec(rng, n, -1.0, 1.0));
        if !atoms.contains(&a) {
            atoms.push(a);
        }
    }
    let w: Vec<f64> = atoms.iter().map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = w.iter().sum();
    let support: Vec<(Atom, f64)> = atoms.into_iter().zip(w).map(|(a, w)| (a, w / total)).collect();
    let mut x = DenseVector::zeros(n);
    for (a, w) in &support {
        a.add_to(&mut x, *w);
    }
    (support, x)
}

/// `h(δ) = (c₀ − δ) + Σᵢ min(cᵢ − δ, 0)`.
pub fn shadow_h(c: &[f64], delta: f64) -> f64 {
    (c[0] - delta) + c[1..].iter().map(|&v| (v - delta).min(0.0)).sum::<f64>()
}

/// Root of the strictly decreasing `h` by bisection.
pub fn bisect_delta(c: &[f64]) -> f64 {
    let span = c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let (mut lo, mut hi) = (-2.0 * span * c.len() as f64, 2.0 * span * c.len() as f64);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if shadow_h(c, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Euclidean projection of `−c` onto `{d : d₁..dₘ ≥ 0, Σd = 0}` by trying
/// every active set `S ⊆ {1..m}` (coordinates pinned to zero). On the free
/// set `F` the projection is `dᵢ = −cᵢ + mean_F(c)`.
pub fn active_set_projection(c: &[f64]) -> Vec<f64> {
    let m = c.len() - 1;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << m) {
        let free: Vec<usize> = std::iter::once(0)
            .chain((1..=m).filter(|i| mask & (1 << (i - 1)) == 0))
            .collect();
        let mean = free.iter().map(|&i| c[i]).sum::<f64>() / free.len() as f64;
        let mut d = vec![0.0; m + 1];
        for &i in &free {
            d[i] = mean - c[i];
        }
        if d[1..].iter().any(|&v| v < -1e-14) {
            continue;
        }
        let dist: f64 = d.iter().zip(c).map(|(di, ci)| (di + ci).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _)| dist < *b) {
            best = Some((dist, d));
        }
    }
    best.expect("the all-pinned set is always feasible").1
}

/// Euclidean projection onto the probability simplex (sort-based).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Reference minimum of a quadratic over `Δⁿ` by accelerated projected
/// gradient with restarts, run until the FW gap is at most `tol`.
pub fn simplex_qp_reference(obj: &QuadraticObjective, tol: f64) -> (DenseVector, f64) {
    let n = obj.dim();
    // Lipschitz constant of ∇f by power iteration on the Hessian action
    let hess = |p: &DenseVector| -> DenseVector {
        let z = DenseVector::zeros(n);
        let g0 = obj.gradient(&z);
        let g1 = obj.gradient(p);
        g1.sub(&g0)
    };
    let mut v = DenseVector::from_vec(vec![1.0; n]);
    let mut lip = 1.0;
    for _ in 0..200 {
        let hv = hess(&v);
        lip = hv.norm_sq().sqrt() / v.norm_sq().sqrt();
        v = hv;
        let nv = v.norm_sq().sqrt();
        v.scale(1.0 / nv);
    }
    let step = 1.0 / (1.01 * lip);
    let mut x = DenseVector::from_vec(vec![1.0 / n as f64; n]);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut f_prev = obj.value(&x);
    for _ in 0..2_000_000 {
        let gx = obj.gradient(&x);
        let gap = gx.dot(&x) - gx.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if gap <= tol {
            return (x, f_prev);
        }
        let g = obj.gradient(&y);
        let moved: Vec<f64> = y.iter().zip(g.iter()).map(|(yi, gi)| yi - step * gi).collect();
        let x_new = DenseVector::from_vec(project_simplex(&moved));
        let f_new = obj.value(&x_new);
        if f_new > f_prev + 1e-15 * (1.0 + f_prev.abs()) && t > 1.0 {
            // restart momentum from the last iterate
            y = x.clone();
            t = 1.0;
            continue;
        }
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mut y_new = x_new.clone();
        y_new.axpy((t - 1.0) / t_new, &x_new.sub(&x));
        x = x_new;
        y = y_new;
        t = t_new;
        f_prev = f_new;
    }
    panic!("reference solver did not reach the requested gap");
}

/// Outcome of one reduce property check.
pub struct ReduceCheck {
    pub reduced: bool,
    pub p5_discrepancy: f64,
}

/// Check [P1]–[P5] for one `(support, s, g)` triple at the given depth.
/// Failures are returned as messages naming the property.
pub fn check_reduce_properties(
    rng: &mut ChaCha8Rng,
    p: &Polytope,
    obj: &QuadraticObjective,
    support: &[(Atom, f64)],
    depth: usize,
    d_max: usize,
) -> Result<ReduceCheck, String> {
    use facet_core::polytope::{reduce, ReduceOutcome};
    use facet_core::{ConvexState, PointState, State};

    let n = p.dim();
    let convex = ConvexState::from_weights(support.to_vec(), n);
    let x = convex.x().clone();
    let g = obj.gradient(&x);
    let s = p.min_oracle(&g);
    let out = reduce(p, &x, &s, &g, depth, d_max, obj).map_err(|e| format!("reduce failed: {e}"))?;
    let ReduceOutcome::Reduced(r) = out else {
        return Ok(ReduceCheck {
            reduced: false,
            p5_discrepancy: 0.0,
        });
    };
    let (q, map, fq) = (&r.q, &r.map, &r.restricted_objective);

    // [P1] supp(α) ∪ {s} restrict into Q and lift back exactly
    for a in support.iter().map(|(a, _)| a).chain(std::iter::once(&s)) {
        let ra = map.restrict_atom(a).ok_or("P1: atom not representable in Q")?;
        if !q.is_vertex(&ra) || &map.lift_atom(&ra) != a {
            return Err("P1: atom round trip changed the atom".into());
        }
    }
    let point = State::Point(PointState::new(x.clone()));
    let rp = point
        .restrict(map)
        .map_err(|e| format!("P1: point restriction failed: {e}"))?;
    if rp.lift(map).x().max_abs_diff(&x) > 1e-12 {
        return Err("P1: point round trip moved x".into());
    }
    let rc = State::Convex(convex.clone())
        .restrict(map)
        .map_err(|e| format!("P1: convex restriction failed: {e}"))?;

    // [P2] restrict ∘ lift is the identity on Q
    let (_, yq) = random_mixture(rng, q, 3);
    let back = map
        .restrict_point(&map.lift_point(&yq))
        .map_err(|e| format!("P2: {e}"))?;
    if back.max_abs_diff(&yq) > 1e-12 {
        return Err("P2: restrict(lift(y)) differs from y".into());
    }

    // [P3] lifted atoms of Q are atoms of P
    for _ in 0..5 {
        let a = q.min_oracle(&random_vec(rng, q.dim(), -1.0, 1.0));
        if !p.is_vertex(&map.lift_atom(&a)) {
            return Err("P3: lifted atom is not a vertex of P".into());
        }
    }

    // [P4] f̃ = f ∘ L
    let fy = obj.value(&map.lift_point(&yq));
    if (fq.value(&yq) - fy).abs() > 1e-10 * (1.0 + fy.abs()) {
        return Err(format!("P4: f̃(y) = {} but f(L(y)) = {fy}", fq.value(&yq)));
    }

    // [P5] w̃ computed by Q's oracles equals w computed in P
    let w_of = |poly: &Polytope, f: &QuadraticObjective, st: &State| -> f64 {
        let xs = st.x();
        let gr = f.gradient(xs);
        let lo = poly.min_oracle(&gr).dot(&gr);
        let hi = match st {
            State::Point(_) => poly.face_max_oracle(xs, &gr).unwrap().dot(&gr),
            State::Convex(c) => c
                .support()
                .iter()
                .map(|(a, _)| a.dot(&gr))
                .fold(f64::NEG_INFINITY, f64::max),
        };
        hi - lo
    };
    let mut disc: f64 = 0.0;
    for (orig, red) in [(point, rp), (State::Convex(convex), rc)] {
        let w = w_of(p, obj, &orig);
        let wq = w_of(q, fq, &red);
        disc = disc.max((w - wq).abs());
    }
    if disc > 1e-9 {
        return Err(format!("P5: |w̃ − w| = {disc:e}"));
    }
    Ok(ReduceCheck {
        reduced: true,
        p5_discrepancy: disc,
    })
}

/// The three polytope families at property-test scale.
pub fn property_polytopes(rng: &mut ChaCha8Rng) -> Vec<(&'static str, Polytope)> {
    vec![
        ("simplex", Polytope::simplex(40)),
        ("dag", Polytope::Dag(DagPaths::chain(6, 4))),
        ("pm", Polytope::Matching(random_matching_polytope(rng, 8, 3))),
    ]
}
