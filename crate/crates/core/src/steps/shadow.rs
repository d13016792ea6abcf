use crate::atom::Atom;
use crate::linalg::DenseVector;
use crate::polytope::ZERO_TOL;
use crate::problem::Problem;
use crate::trace::StepKind;

use super::StepReport;

/// The unique `δ` with `(c₀ − δ) + Σᵢ₌₁..ₘ min(cᵢ − δ, 0) = 0`.
pub fn shadow_delta(c: &[f64]) -> f64 {
    assert!(!c.is_empty(), "shadow_delta needs c₀");
    let mut tail = c[1..].to_vec();
    tail.sort_unstable_by(f64::total_cmp);
    let mut s = c[0];
    let mut k = 1;
    for &ck in &tail {
        if s - k as f64 * ck <= 0.0 {
            break;
        }
        s += ck;
        k += 1;
    }
    s / k as f64
}

/// `c^δ` for the `δ` returned by [`shadow_delta`].
pub fn shifted(c: &[f64], delta: f64) -> Vec<f64> {
    c.iter()
        .enumerate()
        .map(|(i, &ci)| if i == 0 { ci - delta } else { (ci - delta).min(0.0) })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ShadowOutcome {
    pub y: DenseVector,
    pub report: StepReport,
    /// Weights `νᵢ ≥ 0` on the working-set atoms (all zero when stationary).
    pub nu: Vec<f64>,
}

/// One step along the shadow of the gradient over `conv({x} ∪ W)`.
pub fn shadow_simplex_step(problem: &Problem<'_>, x: &DenseVector, atoms: &[&Atom]) -> ShadowOutcome {
    let clock = &problem.env.clock;
    let start = clock.now();
    let (f, g) = problem.value_and_gradient(x);
    let mut c = Vec::with_capacity(atoms.len() + 1);
    c.push(g.dot(x));
    c.extend(atoms.iter().map(|a| a.dot(&g)));
    problem.charge(atoms.iter().map(|a| a.len() as u64).sum::<u64>() + problem.dim() as u64);
    let delta = shadow_delta(&c);
    let cd = shifted(&c, delta);
    let finish = |y: DenseVector, delta_f: f64, nu: Vec<f64>| ShadowOutcome {
        y,
        report: StepReport {
            kind: StepKind::Simplex,
            f_before: f,
            f_after: f - delta_f,
            delta_f,
            phi: None,
            w_plus: None,
            gap: None,
            duration: clock.since(start),
            finished_at: clock.now(),
        },
        nu,
    };
    // Σᵢ −c^δᵢ equals c^δ₀ exactly; dividing by the computed sum keeps ν on
    // the unit simplex when c^δ₀ is tiny relative to rounding in δ
    let total: f64 = cd[1..].iter().map(|v| -v).sum();
    if cd[0] <= 0.0 || total <= 0.0 {
        return finish(x.clone(), 0.0, vec![0.0; atoms.len()]);
    }
    let nu: Vec<f64> = cd[1..].iter().map(|v| -v / total).collect();
    let mut u = DenseVector::zeros(problem.dim());
    for (a, &w) in atoms.iter().zip(&nu) {
        if w > 0.0 {
            a.add_to(&mut u, w);
        }
    }
    let seg = problem.segment(x, &g, &u);
    let mut y = seg.y;
    y.snap_zeros(ZERO_TOL);
    finish(y, seg.delta_f, nu)
}
