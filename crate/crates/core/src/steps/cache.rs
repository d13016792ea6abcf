use crate::error::Result;
use crate::problem::Problem;
use crate::state::{PointState, WorkingSet, DEFAULT_CAPACITY};

use super::{dicg_step, shadow_simplex_step, DicgVariant, StepReport};

/// Benchmark default: no time budget on the simplex loop.
pub const DEFAULT_KAPPA: f64 = f64::INFINITY;

/// Upper bound on simplex steps per call, a guard against stalls that the
/// progress test alone does not catch.
const MAX_SIMPLEX_STEPS: usize = 1000;

#[derive(Debug, Clone)]
pub struct CacheOutcome {
    pub state: PointState,
    pub dicg: StepReport,
    pub simplex: Vec<StepReport>,
    /// Simplex steps with `Δₜ/Tₜ ≤ Δ₀/T₀`.
    pub unsuccessful: usize,
    /// `f(x) − min_{ξ≥0} f(x + ξd)` for the DiCG direction.
    pub delta0: f64,
    /// Measured span of the DiCG part, `T₀`.
    pub t0: f64,
    pub max_working_set: usize,
    pub away: bool,
}

/// One DiCG step that feeds the working set, followed by shadow-simplex
/// steps over `conv({x} ∪ W)` while they out-pace the DiCG step.
pub fn cache_dicg_step(
    problem: &Problem<'_>,
    state: &PointState,
    variant: DicgVariant,
    kappa: f64,
) -> Result<CacheOutcome> {
    assert!(kappa > 0.0, "kappa must be positive");
    let clock = &problem.env.clock;
    let start = clock.now();
    let out = dicg_step(problem, &state.x, variant)?;
    let mut ws = state
        .working_set
        .clone()
        .unwrap_or_else(|| WorkingSet::new(DEFAULT_CAPACITY));
    ws.insert(out.s.clone());
    let mut max_ws = ws.len();
    let delta0 = match &out.d {
        Some(d) => problem.ray(&out.g, d)?.1,
        None => 0.0,
    };
    let t0 = clock.since(start);
    let rate0 = delta0 / t0;

    let mut x = out.y;
    let mut simplex = Vec::new();
    let mut unsuccessful = 0;
    let mut spent = 0.0;
    while simplex.len() < MAX_SIMPLEX_STEPS {
        let atoms: Vec<_> = ws.atoms().cloned().collect();
        let refs: Vec<_> = atoms.iter().collect();
        let step = shadow_simplex_step(problem, &x, &refs);
        for (i, &nu) in step.nu.iter().enumerate() {
            if nu > 0.0 {
                ws.touch(i);
            }
        }
        max_ws = max_ws.max(ws.len());
        let t = step.report.duration;
        spent += t;
        let failed = step.report.delta_f / t <= rate0;
        x = step.y;
        simplex.push(step.report);
        if failed {
            unsuccessful += 1;
        }
        if failed || spent >= kappa * t0 {
            break;
        }
    }
    Ok(CacheOutcome {
        state: PointState {
            x,
            working_set: Some(ws),
        },
        dicg: out.report,
        simplex,
        unsuccessful,
        delta0,
        t0,
        max_working_set: max_ws,
        away: out.away,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ColMatrix, DenseVector};
    use crate::objective::QuadraticObjective;
    use crate::polytope::Polytope;
    use crate::problem::Env;
    use crate::trace::StepKind;
    use rand::{Rng, SeedableRng};

    fn random_ls(n: usize, m: usize, seed: u64) -> QuadraticObjective {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * m).map(|_| rng.random::<f64>()).collect();
        let b = (0..m).map(|_| rng.random::<f64>() * 2.0).collect();
        QuadraticObjective::least_squares(ColMatrix::from_col_major(m, n, data), b)
    }

    #[test]
    fn runs_decrease_f_and_respect_capacity() {
        let n = 30;
        let obj = random_ls(n, 20, 1);
        let p = Polytope::simplex(n);
        let env = Env::counted();
        let prob = Problem::new(&obj, &p, &env);
        let mut st = PointState::from_atom(&p.initial_atom(), n).with_working_set(4);
        let mut f = obj.value(&st.x);
        for _ in 0..50 {
            let out = cache_dicg_step(&prob, &st, DicgVariant::Pfw, DEFAULT_KAPPA).unwrap();
            assert!(out.unsuccessful <= 1);
            assert!(out.max_working_set <= 4);
            assert!(!out.simplex.is_empty());
            assert!(out.simplex.iter().all(|r| r.kind == StepKind::Simplex));
            let f_new = obj.value(&out.state.x);
            assert!(f_new <= f + 1e-12 * (1.0 + f.abs()));
            assert!(p.is_feasible(&out.state.x));
            f = f_new;
            st = out.state;
        }
    }

    #[test]
    fn kappa_budget_limits_simplex_steps() {
        let n = 30;
        let obj = random_ls(n, 20, 2);
        let p = Polytope::simplex(n);
        let env = Env::counted();
        let prob = Problem::new(&obj, &p, &env);
        let mut st = PointState::from_atom(&p.initial_atom(), n).with_working_set(10);
        for _ in 0..20 {
            let out = cache_dicg_step(&prob, &st, DicgVariant::Pfw, 1.0).unwrap();
            // every simplex step costs at least as much as the DiCG part
            // here (both are dominated by one gradient evaluation)
            let total: f64 = out.simplex.iter().map(|r| r.duration).sum();
            assert!(out.simplex.len() == 1 || total - out.simplex.last().unwrap().duration < out.t0);
            st = out.state;
        }
    }

    #[test]
    fn eviction_keeps_capacity() {
        let obj = random_ls(5, 5, 3);
        let p = Polytope::simplex(5);
        let env = Env::counted();
        let prob = Problem::new(&obj, &p, &env);
        let mut st = PointState::new(DenseVector::from_vec(vec![0.2; 5])).with_working_set(1);
        for _ in 0..5 {
            let out = cache_dicg_step(&prob, &st, DicgVariant::Afw, DEFAULT_KAPPA).unwrap();
            assert_eq!(out.state.working_set.as_ref().unwrap().len(), 1);
            st = out.state;
        }
    }
}
