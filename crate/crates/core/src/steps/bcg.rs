use crate::error::{FwError, Result};
use crate::gap::{extremes, GapInfo};
use crate::linalg::DenseVector;
use crate::problem::Problem;
use crate::state::ConvexState;
use crate::trace::StepKind;

use super::StepReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcgOptions {
    /// Try support atoms before calling the min-oracle.
    pub lazy: bool,
    /// Lazy acceptance factor `K ≥ 1`.
    pub k: f64,
    /// Take the FW step even when the halve branch fires.
    pub accept_all: bool,
}

impl Default for BcgOptions {
    fn default() -> Self {
        Self {
            lazy: false,
            k: 1.0,
            accept_all: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BcgOutcome {
    pub state: ConvexState,
    pub phi: f64,
    pub report: StepReport,
}

/// One simplex gradient descent step over the current support.
pub fn sido_step(problem: &Problem<'_>, state: &ConvexState) -> (ConvexState, StepReport) {
    let start = problem.env.clock.now();
    let (f, g) = problem.value_and_gradient(state.x());
    let scores = support_scores(problem, state, &g);
    sido_with(problem, state, f, &g, &scores, start)
}

fn support_scores(problem: &Problem<'_>, state: &ConvexState, g: &DenseVector) -> Vec<f64> {
    problem.charge(state.support().iter().map(|(a, _)| a.len() as u64).sum());
    state.support().iter().map(|(a, _)| a.dot(g)).collect()
}

fn sido_with(
    problem: &Problem<'_>,
    state: &ConvexState,
    f: f64,
    g: &DenseVector,
    scores: &[f64],
    start: f64,
) -> (ConvexState, StepReport) {
    let clock = &problem.env.clock;
    let report = |delta_f: f64| StepReport {
        kind: StepKind::Sido,
        f_before: f,
        f_after: f - delta_f,
        delta_f,
        phi: None,
        w_plus: None,
        gap: None,
        duration: clock.since(start),
        finished_at: clock.now(),
    };
    let k = scores.len();
    let mean = scores.iter().sum::<f64>() / k as f64;
    // fold the rounding residual of the mean into a multiple of the weights so
    // the move keeps the weights summing to one
    let residual: f64 = scores.iter().map(|c| c - mean).sum();
    let p: Vec<f64> = scores
        .iter()
        .zip(state.support())
        .map(|(c, (_, w))| c - mean - residual * w)
        .collect();
    // the first weight to reach zero moving against p; rounding can leave no
    // positive entry, which counts as a zero direction
    let Some((cap_idx, t_max)) = p
        .iter()
        .enumerate()
        .filter(|(_, &pi)| pi > 0.0)
        .map(|(i, &pi)| (i, state.support()[i].1 / pi))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    else {
        return (state.clone(), report(0.0));
    };
    let n = problem.dim();
    let mut dx = DenseVector::zeros(n);
    for ((atom, _), &pi) in state.support().iter().zip(&p) {
        atom.add_to(&mut dx, -pi);
    }
    let u = state.x().add_scaled(t_max, &dx);
    let seg = problem.segment(state.x(), g, &u);
    let step = seg.gamma * t_max;
    let support = state
        .support()
        .iter()
        .zip(&p)
        .enumerate()
        .map(|(i, ((a, w), &pi))| {
            let nw = if seg.gamma == 1.0 && i == cap_idx {
                0.0
            } else {
                w - step * pi
            };
            (a.clone(), nw)
        })
        .collect();
    problem.charge(state.support().iter().map(|(a, _)| a.len() as u64).sum::<u64>() + n as u64);
    let next = ConvexState::from_weights(support, n);
    (next, report(seg.delta_f))
}

/// Blended conditional gradient step on `(α, Φ)`.
pub fn bcg_step(problem: &Problem<'_>, state: &ConvexState, phi: f64, opts: BcgOptions) -> Result<BcgOutcome> {
    if phi.is_nan() || phi <= 0.0 {
        return Err(FwError::Precondition(format!("BCG needs Φ > 0, got {phi}")));
    }
    let clock = &problem.env.clock;
    let start = clock.now();
    let (f, g) = problem.value_and_gradient(state.x());
    let scores = support_scores(problem, state, &g);
    let (lo, hi) = extremes(&scores);
    let w_minus = scores[hi] - scores[lo];
    if w_minus >= phi / 2.0 {
        let (next, report) = sido_with(problem, state, f, &g, &scores, start);
        return Ok(BcgOutcome {
            state: next,
            phi,
            report,
        });
    }

    let gx = g.dot(state.x());
    let lazy_hit = opts.lazy && gx - scores[lo] >= phi / (2.0 * opts.k);
    let (s, gap) = if lazy_hit {
        (state.support()[lo].0.clone(), None)
    } else {
        let s = problem.min_oracle(&g);
        let gs = s.dot(&g);
        let gap = GapInfo {
            w: scores[hi] - gs,
            w_plus: gx - gs,
            w_minus: Some(w_minus),
            s: s.clone(),
            v: state.support()[hi].0.clone(),
        };
        (s, Some(gap))
    };
    let w_plus = gap.as_ref().map(|gi| gi.w_plus);
    let mut phi_next = phi;
    let mut kind = StepKind::BcgFw;
    if let Some(gi) = &gap {
        if gi.w_plus < phi / 2.0 {
            phi_next = gi.w.min(phi / 2.0);
            kind = StepKind::Halve;
        }
    }
    let take_fw = kind == StepKind::BcgFw || opts.accept_all;
    let (next, delta_f) = if take_fw {
        let n = problem.dim();
        let seg = problem.segment(state.x(), &g, &s.to_dense(n));
        let mut support: Vec<_> = state
            .support()
            .iter()
            .map(|(a, w)| (a.clone(), w * (1.0 - seg.gamma)))
            .collect();
        support.push((s, seg.gamma));
        problem.charge(support.iter().map(|(a, _)| a.len() as u64).sum::<u64>() + n as u64);
        (ConvexState::from_weights(support, n), seg.delta_f)
    } else {
        (state.clone(), 0.0)
    };
    Ok(BcgOutcome {
        state: next,
        phi: phi_next,
        report: StepReport {
            kind,
            f_before: f,
            f_after: f - delta_f,
            delta_f,
            phi: Some(phi_next),
            w_plus,
            gap,
            duration: clock.since(start),
            finished_at: clock.now(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::Atom;
    use crate::linalg::ColMatrix;
    use crate::objective::QuadraticObjective;
    use crate::polytope::Polytope;
    use crate::problem::Env;
    use rand::{Rng, SeedableRng};

    #[test]
    fn equal_scores_leave_state_unchanged() {
        // g = 2(x − b) = (−1, −1) at x = (0.3, 0.7)
        let obj = QuadraticObjective::least_squares(ColMatrix::identity(2), vec![0.8, 1.2]);
        let p = Polytope::simplex(2);
        let env = Env::counted();
        let prob = Problem::new(&obj, &p, &env);
        let st = ConvexState::from_weights(vec![(Atom::unit(0), 0.3), (Atom::unit(1), 0.7)], 2);
        let (next, rep) = sido_step(&prob, &st);
        assert_eq!(rep.delta_f, 0.0);
        assert_eq!(next, st);
    }

    #[test]
    fn two_atom_cap_binds() {
        // f = ‖x − (2, −1)‖² on Δ², α = (½, ½): c = (−3, 3), the weight cap
        // t = ⅙ reaches e1, while the unconstrained minimizer lies at γ = 3
        let obj = QuadraticObjective::least_squares(ColMatrix::identity(2), vec![2.0, -1.0]);
        let p = Polytope::simplex(2);
        let env = Env::counted();
        let prob = Problem::new(&obj, &p, &env);
        let st = ConvexState::from_weights(vec![(Atom::unit(0), 0.5), (Atom::unit(1), 0.5)], 2);
        let (next, rep) = sido_step(&prob, &st);
        assert_eq!(next.support().len(), 1);
        assert_eq!(next.support()[0].0, Atom::unit(0));
        assert_eq!(next.x().as_slice(), &[1.0, 0.0]);
        // grid oracle over the segment from x to e1
        let best = (0..=100_000)
            .map(|k| k as f64 / 100_000.0)
            .map(|t| obj.value(&vec![0.5 + 0.5 * t, 0.5 - 0.5 * t].into()))
            .fold(f64::INFINITY, f64::min);
        assert!((rep.f_after - best).abs() < 1e-9);
    }

    #[test]
    fn weights_stay_a_probability_vector() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let n = 5;
        let a = ColMatrix::from_col_major(4, n, (0..4 * n).map(|_| rng.random::<f64>()).collect());
        let obj = QuadraticObjective::least_squares(a, vec![1.0, 0.0, 2.0, 0.5]);
        let p = Polytope::simplex(n);
        let env = Env::counted();
        let prob = Problem::new(&obj, &p, &env);
        for _ in 0..50 {
            let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.01).collect();
            let st = ConvexState::from_weights((0..n).map(|i| (Atom::unit(i), w[i])).collect(), n);
            let (next, rep) = sido_step(&prob, &st);
            let total: f64 = next.support().iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!(next.support().iter().all(|(_, w)| *w > 0.0));
            assert!(obj.value(next.x()) <= obj.value(st.x()) + 1e-12);
            assert!(rep.delta_f > 0.0 || next.support().len() < st.support().len());
        }
    }

    #[test]
    fn halve_uses_min_of_gap_and_half() {
        // Δ³ with b = (0.1, 0.2, 0.7) at α = e1: g = (1.8, −0.4, −1.4),
        // w⁻ = 0 and w⁺ = w = 3.2
        let obj = QuadraticObjective::least_squares(ColMatrix::identity(3), vec![0.1, 0.2, 0.7]);
        let p = Polytope::simplex(3);
        let env = Env::counted();
        let prob = Problem::new(&obj, &p, &env);
        let st = ConvexState::from_atom(Atom::unit(0), 3);
        let out = bcg_step(&prob, &st, 8.0, BcgOptions::default()).unwrap();
        assert_eq!(out.report.kind, StepKind::Halve);
        assert!((out.phi - 3.2).abs() < 1e-12);
        assert_eq!(out.state, st);
        // Φ = w(α) exactly cannot halve
        let phi = out.phi;
        let out = bcg_step(&prob, &st, phi, BcgOptions::default()).unwrap();
        assert_eq!(out.report.kind, StepKind::BcgFw);
        assert_eq!(out.phi, phi);
        assert_eq!(out.state.support().len(), 2);
        assert!(bcg_step(&prob, &st, 0.0, BcgOptions::default()).is_err());
    }

    #[test]
    fn large_support_spread_takes_sido() {
        let obj = QuadraticObjective::least_squares(ColMatrix::identity(3), vec![0.1, 0.2, 0.7]);
        let p = Polytope::simplex(3);
        let env = Env::counted();
        let prob = Problem::new(&obj, &p, &env);
        let st = ConvexState::from_weights(vec![(Atom::unit(0), 0.5), (Atom::unit(2), 0.5)], 3);
        // c = 2(x − b) at e1, e3: 0.8 and −0.4, w⁻ = 1.2 ≥ Φ/2 for Φ = 1
        let out = bcg_step(&prob, &st, 1.0, BcgOptions::default()).unwrap();
        assert_eq!(out.report.kind, StepKind::Sido);
        assert_eq!(out.phi, 1.0);
    }
}
