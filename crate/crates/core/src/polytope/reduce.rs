//! The self-reducible oracle: shrink `P` to a face-like sub-polytope `Q`
//! that still contains the current support and the latest oracle atom.

use crate::atom::Atom;
use crate::error::{FwError, Result};
use crate::linalg::DenseVector;
use crate::objective::QuadraticObjective;

use super::{CoordTag, MappingDescriptor, Polytope, Simplex, ZERO_TOL};

#[derive(Debug, Clone)]
pub struct ReduceResult {
    pub q: Polytope,
    pub map: MappingDescriptor,
    pub restricted_objective: QuadraticObjective,
}

#[derive(Debug, Clone)]
pub enum ReduceOutcome {
    Unchanged,
    Reduced(Box<ReduceResult>),
}

/// `⌊N₀·(N₀/N)^(d_max − depth − 1)⌋`, computed exactly in integers.
pub fn reduced_count(n0: usize, n: usize, depth: usize, d_max: usize) -> usize {
    assert!(depth < d_max && n0 <= n, "reduced_count: invalid arguments");
    if n0 == 0 {
        return 0;
    }
    let e = (d_max - depth - 1) as u32;
    match ((n0 as u128).checked_pow(e + 1), (n as u128).checked_pow(e)) {
        (Some(num), Some(den)) => (num / den) as usize,
        _ => (n0 as f64 * (n0 as f64 / n as f64).powi(e as i32)).floor() as usize,
    }
}

/// Reduce `p` around the point `x` and atom `s`.
///
/// Candidate coordinates are those of the designated variable set (simplex
/// coordinates, DAG arcs, matching edges) with `x_e = s_e = 0`. They are
/// ranked by `z_e`: the gradient for the simplex, the cheapest path through
/// the arc for DAGs, and the Hungarian reduced cost for matchings. The
/// `Ñ₀` candidates ranked worst are fixed to zero, keeping the most
/// promising ones free; the structure is then simplified.
#[allow(clippy::too_many_arguments)]
pub fn reduce(
    p: &Polytope,
    x: &DenseVector,
    s: &Atom,
    g: &DenseVector,
    depth: usize,
    d_max: usize,
    obj: &QuadraticObjective,
) -> Result<ReduceOutcome> {
    if depth >= d_max {
        return Ok(ReduceOutcome::Unchanged);
    }
    if x.len() != p.dim() || g.len() != p.dim() {
        return Err(FwError::Dimension {
            expected: p.dim(),
            got: x.len().max(g.len()),
        });
    }
    // (variable index, coordinate, score)
    let (candidates, n_vars): (Vec<(usize, f64)>, usize) = match p {
        Polytope::Simplex(sx) => {
            let c = (0..sx.dim())
                .filter(|&i| x[i] <= ZERO_TOL && !s.contains(i))
                .map(|i| (i, g[i]))
                .collect();
            (c, sx.dim())
        }
        Polytope::Dag(d) => {
            let z = d.through_costs(g);
            let c = (0..d.num_arcs())
                .filter(|&a| {
                    let c = d.arc_coord(a);
                    x[c] <= ZERO_TOL && !s.contains(c)
                })
                .map(|a| (a, z[a]))
                .collect();
            (c, d.num_arcs())
        }
        Polytope::Matching(pm) => {
            let res = pm.solve(g);
            let c = (0..pm.num_edges())
                .filter(|&e| x[e] <= ZERO_TOL && !s.contains(e))
                .map(|e| (e, res.slack(pm.graph(), g.as_slice(), e)))
                .collect();
            (c, pm.num_edges())
        }
    };
    let n_fix = reduced_count(candidates.len(), n_vars, depth, d_max);
    let fixed = select_worst(candidates, n_fix, n_vars);

    let restricted = match p {
        Polytope::Simplex(sx) => {
            if n_fix == 0 {
                None
            } else {
                let mut next = 0;
                let tags: Vec<CoordTag> = (0..sx.dim())
                    .map(|i| {
                        if fixed[i] {
                            CoordTag::Fixed(false)
                        } else {
                            next += 1;
                            CoordTag::Linked(next - 1)
                        }
                    })
                    .collect();
                Some((Polytope::Simplex(Simplex::new(next)), tags))
            }
        }
        Polytope::Dag(d) => d.restrict_structure(&fixed).map(|(q, t)| (Polytope::Dag(q), t)),
        Polytope::Matching(pm) => pm.restrict_structure(&fixed).map(|(q, t)| (Polytope::Matching(q), t)),
    };
    let Some((q, tags)) = restricted else {
        return Ok(ReduceOutcome::Unchanged);
    };
    let map = MappingDescriptor::new(tags, q.dim());
    let restricted_objective = map.restrict_objective(obj);
    Ok(ReduceOutcome::Reduced(Box::new(ReduceResult {
        q,
        map,
        restricted_objective,
    })))
}

/// Mark the `count` candidates with the largest score (ties: larger index
/// first) using expected-linear selection.
fn select_worst(mut candidates: Vec<(usize, f64)>, count: usize, n_vars: usize) -> Vec<bool> {
    let mut fixed = vec![false; n_vars];
    if count == 0 {
        return fixed;
    }
    let keep = candidates.len() - count;
    let order = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
    if keep > 0 {
        candidates.select_nth_unstable_by(keep, order);
    }
    for &(i, _) in &candidates[keep..] {
        fixed[i] = true;
    }
    fixed
}
