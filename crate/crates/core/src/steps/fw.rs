use crate::linalg::DenseVector;
use crate::problem::Problem;
use crate::trace::StepKind;

use super::StepReport;

/// Classic Frank-Wolfe step: exact line search toward the min-oracle atom.
pub fn fw_step(problem: &Problem<'_>, x: &DenseVector) -> (DenseVector, StepReport) {
    let clock = &problem.env.clock;
    let start = clock.now();
    let (f, g) = problem.value_and_gradient(x);
    let s = problem.min_oracle(&g);
    let w_plus = g.dot(x) - s.dot(&g);
    let sd = s.to_dense(problem.dim());
    let seg = problem.segment(x, &g, &sd);
    let report = StepReport {
        kind: StepKind::Fw,
        f_before: f,
        f_after: f - seg.delta_f,
        delta_f: seg.delta_f,
        phi: Some(w_plus),
        w_plus: Some(w_plus),
        gap: None,
        duration: clock.since(start),
        finished_at: clock.now(),
    };
    (seg.y, report)
}
