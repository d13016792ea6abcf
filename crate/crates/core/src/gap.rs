//! Frank-Wolfe gap quantities and the dual lower bound.

use crate::atom::Atom;
use crate::error::Result;
use crate::linalg::DenseVector;
use crate::objective::QuadraticObjective;
use crate::problem::Problem;
use crate::state::State;

/// `w = ⟨g, v − s⟩`, `w⁺ = ⟨g, x − s⟩` and, for convex combinations,
/// `w⁻ = ⟨g, v − u⟩` with `u`, `v` the best and worst support atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct GapInfo {
    pub w: f64,
    pub w_plus: f64,
    pub w_minus: Option<f64>,
    /// Min-oracle answer.
    pub s: Atom,
    /// Max-oracle answer over the face or the support.
    pub v: Atom,
}

/// Indices of the smallest and largest score, first occurrence on ties.
pub(crate) fn extremes(scores: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, &v) in scores.iter().enumerate() {
        if v < scores[lo] {
            lo = i;
        }
        if v > scores[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

/// Gap quantities at `state` given its gradient.
pub fn gap_with_gradient(problem: &Problem<'_>, state: &State, g: &DenseVector) -> Result<GapInfo> {
    let x = state.x();
    let s = problem.min_oracle(g);
    let gs = s.dot(g);
    let gx = g.dot(x);
    match state {
        State::Point(_) => {
            let v = problem.face_max_oracle(x, g)?;
            Ok(GapInfo {
                w: v.dot(g) - gs,
                w_plus: gx - gs,
                w_minus: None,
                s,
                v,
            })
        }
        State::Convex(c) => {
            problem.charge(c.support().iter().map(|(a, _)| a.len() as u64).sum());
            let scores: Vec<f64> = c.support().iter().map(|(a, _)| a.dot(g)).collect();
            let (lo, hi) = extremes(&scores);
            Ok(GapInfo {
                w: scores[hi] - gs,
                w_plus: gx - gs,
                w_minus: Some(scores[hi] - scores[lo]),
                s,
                v: c.support()[hi].0.clone(),
            })
        }
    }
}

pub fn gap_info(problem: &Problem<'_>, state: &State) -> Result<GapInfo> {
    let (_, g) = problem.value_and_gradient(state.x());
    gap_with_gradient(problem, state, &g)
}

/// `f(x) − w⁺`, a lower bound on `min_P f`.
pub fn bound_from(f: f64, w_plus: f64) -> f64 {
    f - w_plus.max(0.0)
}

pub fn lower_bound(obj: &QuadraticObjective, state: &State, gap: &GapInfo) -> f64 {
    bound_from(obj.value(state.x()), gap.w_plus)
}
