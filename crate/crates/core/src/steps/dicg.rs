use crate::atom::Atom;
use crate::error::Result;
use crate::gap::GapInfo;
use crate::linalg::DenseVector;
use crate::polytope::{FEAS_TOL, ZERO_TOL};
use crate::problem::Problem;
use crate::trace::StepKind;

use super::StepReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DicgVariant {
    /// Away steps: the better of `s − x` and `x − v`.
    Afw,
    /// Pairwise steps: `s − v`.
    Pfw,
}

#[derive(Debug, Clone)]
pub struct DicgOutcome {
    pub y: DenseVector,
    pub report: StepReport,
    pub s: Atom,
    /// Gradient at the input point.
    pub g: DenseVector,
    /// Search direction, absent when no descent direction exists.
    pub d: Option<DenseVector>,
    /// Whether an AFW step took the away direction.
    pub away: bool,
}

/// Decomposition-invariant conditional gradient step.
pub fn dicg_step(problem: &Problem<'_>, x: &DenseVector, variant: DicgVariant) -> Result<DicgOutcome> {
    let clock = &problem.env.clock;
    let start = clock.now();
    let n = problem.dim();
    let (f, g) = problem.value_and_gradient(x);
    let s = problem.min_oracle(&g);
    let v = problem.face_max_oracle(x, &g)?;
    let gx = g.dot(x);
    let gs = s.dot(&g);
    let gv = v.dot(&g);
    let gap = GapInfo {
        w: gv - gs,
        w_plus: gx - gs,
        w_minus: None,
        s: s.clone(),
        v: v.clone(),
    };

    let (d, away) = match variant {
        DicgVariant::Afw => {
            // −⟨g, s − x⟩ = w⁺ versus −⟨g, x − v⟩ = ⟨g, v⟩ − ⟨g, x⟩
            if gap.w_plus >= gv - gx {
                let mut d = s.to_dense(n);
                d.axpy(-1.0, x);
                (d, false)
            } else {
                let mut d = x.clone();
                v.add_to(&mut d, -1.0);
                (d, true)
            }
        }
        DicgVariant::Pfw => {
            let mut d = s.to_dense(n);
            v.add_to(&mut d, -1.0);
            (d, false)
        }
    };
    problem.charge(n as u64);

    let descent = g.dot(&d) < 0.0;
    let (y, delta_f, gamma, u) = if descent {
        let eta = problem.max_feasible_step(x, &d)?;
        let mut u = x.add_scaled(eta, &d);
        u.snap_zeros(ZERO_TOL);
        let seg = problem.segment(x, &g, &u);
        let mut y = seg.y;
        y.snap_zeros(ZERO_TOL);
        (y, seg.delta_f, seg.gamma, Some(u))
    } else {
        (x.clone(), 0.0, 0.0, None)
    };

    let kind = classify(x, &y, gamma, u.as_ref(), &s, n);
    let report = StepReport {
        kind,
        f_before: f,
        f_after: f - delta_f,
        delta_f,
        phi: Some(gap.w),
        w_plus: Some(gap.w_plus),
        gap: Some(gap),
        duration: clock.since(start),
        finished_at: clock.now(),
    };
    Ok(DicgOutcome {
        y,
        report,
        s,
        g,
        d: descent.then_some(d),
        away,
    })
}

/// Drop if a new zero coordinate appears; good if the step stopped short of
/// the boundary or landed on `s`; abnormal otherwise.
fn classify(x: &DenseVector, y: &DenseVector, gamma: f64, u: Option<&DenseVector>, s: &Atom, n: usize) -> StepKind {
    if y.count_zeros(ZERO_TOL) > x.count_zeros(ZERO_TOL) {
        return StepKind::DicgDrop;
    }
    if gamma < 1.0 || u.is_none() || y.max_abs_diff(&s.to_dense(n)) <= FEAS_TOL {
        StepKind::DicgGood
    } else {
        StepKind::DicgAbnormal
    }
}
