//! The recursive wrapper over self-reducible oracles, the step adapters it
//! drives, and the flat base loop it degenerates to when `d_max = 0`.

use std::time::Instant;

use crate::error::{FwError, Result};
use crate::gap::{bound_from, gap_with_gradient, GapInfo};
use crate::linalg::DenseVector;
use crate::polytope::{reduce, Polytope, ReduceOutcome};
use crate::problem::{Env, Problem};
use crate::state::{ConvexState, PointState, State, DEFAULT_CAPACITY};
use crate::steps::{bcg_step, cache_dicg_step, dicg_step, BcgOptions, DicgVariant, StepReport};
use crate::trace::{RunStatus, StepKind, Trace};

/// κ used by the cached adapter inside the recursion.
pub const RECURSIVE_KAPPA: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CgStepAdapter {
    Dicg(DicgVariant),
    Bcg(BcgOptions),
    CacheDicg {
        variant: DicgVariant,
        kappa: f64,
        capacity: usize,
    },
}

/// Result of one adapter call: `(α′, Φ′, T′)` plus what was recorded.
#[derive(Debug, Clone)]
pub struct AdapterStep {
    pub state: State,
    pub phi: f64,
    pub t: f64,
    pub reports: Vec<StepReport>,
    /// The gap estimate was already zero; nothing was done.
    pub stationary: bool,
    pub unsuccessful_simplex: usize,
    pub working_set_len: usize,
}

impl CgStepAdapter {
    pub fn cache_dicg(variant: DicgVariant) -> Self {
        Self::CacheDicg {
            variant,
            kappa: RECURSIVE_KAPPA,
            capacity: DEFAULT_CAPACITY,
        }
    }

    /// The starting state: the polytope's initial atom in the adapter's
    /// state shape.
    pub fn initial_state(&self, p: &Polytope) -> State {
        let atom = p.initial_atom();
        match self {
            Self::Dicg(_) => State::Point(PointState::from_atom(&atom, p.dim())),
            Self::CacheDicg { capacity, .. } => {
                State::Point(PointState::from_atom(&atom, p.dim()).with_working_set(*capacity))
            }
            Self::Bcg(_) => State::Convex(ConvexState::from_atom(atom, p.dim())),
        }
    }

    pub fn step(&self, problem: &Problem<'_>, state: &State, phi: f64) -> Result<AdapterStep> {
        match (self, state) {
            (Self::Dicg(variant), State::Point(ps)) => {
                let out = dicg_step(problem, &ps.x, *variant)?;
                let phi = out.report.phi.unwrap_or(0.0);
                Ok(AdapterStep {
                    state: State::Point(PointState {
                        x: out.y,
                        working_set: ps.working_set.clone(),
                    }),
                    phi,
                    t: out.report.duration,
                    stationary: phi <= 0.0,
                    reports: vec![out.report],
                    unsuccessful_simplex: 0,
                    working_set_len: 0,
                })
            }
            (Self::CacheDicg { variant, kappa, .. }, State::Point(ps)) => {
                let out = cache_dicg_step(problem, ps, *variant, *kappa)?;
                let phi = out.dicg.phi.unwrap_or(0.0);
                let mut reports = vec![out.dicg];
                reports.extend(out.simplex);
                Ok(AdapterStep {
                    state: State::Point(out.state),
                    phi,
                    t: out.t0,
                    stationary: phi <= 0.0,
                    reports,
                    unsuccessful_simplex: out.unsuccessful,
                    working_set_len: out.max_working_set,
                })
            }
            (Self::Bcg(opts), State::Convex(cs)) => {
                if phi.is_nan() || phi <= 0.0 {
                    return Ok(AdapterStep {
                        state: state.clone(),
                        phi: 0.0,
                        t: problem.env.clock.floor(),
                        reports: Vec::new(),
                        stationary: true,
                        unsuccessful_simplex: 0,
                        working_set_len: 0,
                    });
                }
                let out = bcg_step(problem, cs, phi, *opts)?;
                Ok(AdapterStep {
                    state: State::Convex(out.state),
                    phi: out.phi,
                    t: out.report.duration,
                    reports: vec![out.report],
                    stationary: false,
                    unsuccessful_simplex: 0,
                    working_set_len: 0,
                })
            }
            _ => Err(FwError::Precondition("adapter and state shape do not match".into())),
        }
    }

    fn is_afw(&self) -> bool {
        matches!(
            self,
            Self::Dicg(DicgVariant::Afw)
                | Self::CacheDicg {
                    variant: DicgVariant::Afw,
                    ..
                }
        )
    }
}

/// Stopping rules and switches shared by all runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunControl {
    /// Stop once the root `w⁺` is at most this value.
    pub target_gap: f64,
    pub max_steps: Option<u64>,
    pub max_oracle_calls: Option<u64>,
    /// Real elapsed seconds, whatever the clock mode.
    pub max_wall_secs: Option<f64>,
    /// Keep the computed state on failed inner steps.
    pub accept_all: bool,
    /// Recompute `w` in every reduced polytope and record the discrepancy.
    pub check_p5: bool,
}

impl Default for RunControl {
    fn default() -> Self {
        Self {
            target_gap: 0.0,
            max_steps: Some(10_000),
            max_oracle_calls: None,
            max_wall_secs: None,
            accept_all: false,
            check_p5: false,
        }
    }
}

/// Appends trace entries and evaluates the stopping rules.
struct Recorder<'e> {
    env: &'e Env,
    control: RunControl,
    start: f64,
    wall_start: Instant,
    trace: Trace,
    afw: bool,
}

impl<'e> Recorder<'e> {
    fn new(env: &'e Env, control: RunControl, afw: bool) -> Self {
        Self {
            env,
            control,
            start: env.clock.now(),
            wall_start: Instant::now(),
            trace: Trace::new(),
            afw,
        }
    }

    fn elapsed(&self, at: f64) -> f64 {
        (at - self.start).max(self.env.clock.floor())
    }

    fn stopped(&self) -> bool {
        self.trace.status != RunStatus::Running
    }

    fn root_gap(&mut self, w_plus: f64) {
        let d = &mut self.trace.diagnostics;
        d.first_w_plus.get_or_insert(w_plus);
        d.last_w_plus = Some(w_plus);
        if w_plus <= self.control.target_gap {
            self.trace.status = RunStatus::TargetReached;
        }
    }

    fn check_budget(&mut self) {
        if self.stopped() {
            return;
        }
        let c = self.control;
        if c.max_steps.is_some_and(|m| self.trace.steps() >= m) {
            self.trace.status = RunStatus::StepBudget;
        } else if c.max_oracle_calls.is_some_and(|m| self.env.oracle_calls() >= m) {
            self.trace.status = RunStatus::OracleBudget;
        } else if c
            .max_wall_secs
            .is_some_and(|m| self.wall_start.elapsed().as_secs_f64() >= m)
        {
            self.trace.status = RunStatus::TimeBudget;
        }
    }

    fn outer(&mut self, depth: usize, f: f64, w_plus: f64) {
        let at = self.elapsed(self.env.clock.now());
        let bound = (depth == 0).then(|| bound_from(f, w_plus));
        self.trace.push(at, f, bound, StepKind::Outer);
        if depth == 0 {
            self.root_gap(w_plus);
        }
        self.check_budget();
    }

    fn failed(&mut self, f: f64) {
        let at = self.elapsed(self.env.clock.now());
        self.trace.push(at, f, None, StepKind::Failed);
        self.check_budget();
    }

    fn step(&mut self, depth: usize, step: &AdapterStep) {
        let d = &mut self.trace.diagnostics;
        d.max_unsuccessful_simplex = d.max_unsuccessful_simplex.max(step.unsuccessful_simplex);
        d.max_working_set = d.max_working_set.max(step.working_set_len);
        for r in &step.reports {
            if self.afw && r.kind == StepKind::DicgAbnormal && r.delta_f > 0.0 {
                self.trace.diagnostics.afw_unclassified += 1;
            }
            let bound = if depth == 0 { r.bound() } else { None };
            let at = self.elapsed(r.finished_at);
            self.trace.push(at, r.f_after, bound, r.kind);
            if depth == 0 {
                if let Some(w) = r.w_plus {
                    self.root_gap(w);
                }
            }
        }
        self.check_budget();
    }

    fn finish(mut self) -> Trace {
        self.trace.oracle = self.env.stats();
        self.trace
    }
}

struct OuterEval {
    f: f64,
    g: DenseVector,
    gap: GapInfo,
    /// Measured span `T′`.
    t: f64,
}

fn outer_eval(problem: &Problem<'_>, state: &State) -> Result<OuterEval> {
    let clock = &problem.env.clock;
    let start = clock.now();
    let (f, g) = problem.value_and_gradient(state.x());
    let gap = gap_with_gradient(problem, state, &g)?;
    Ok(OuterEval {
        f,
        g,
        gap,
        t: clock.since(start),
    })
}

/// The base algorithm: one initial evaluation of `Φ = w(α)`, then adapter
/// steps until a stopping rule fires.
pub fn run_base(
    problem: &Problem<'_>,
    adapter: &CgStepAdapter,
    state: State,
    control: RunControl,
) -> Result<(State, Trace)> {
    let mut rec = Recorder::new(problem.env, control, adapter.is_afw());
    let ev = outer_eval(problem, &state)?;
    rec.outer(0, ev.f, ev.gap.w_plus);
    let mut phi = ev.gap.w;
    let mut state = state;
    if phi <= 0.0 && !rec.stopped() {
        rec.trace.status = RunStatus::Stationary;
    }
    while !rec.stopped() {
        let step = adapter.step(problem, &state, phi)?;
        if step.stationary && step.reports.is_empty() {
            rec.trace.status = RunStatus::Stationary;
            break;
        }
        rec.step(0, &step);
        state = step.state;
        phi = step.phi;
        if step.stationary && !rec.stopped() {
            rec.trace.status = RunStatus::Stationary;
        }
    }
    Ok((state, rec.finish()))
}

/// Classic Frank-Wolfe loop; the first entry is the same initial
/// evaluation used by the other algorithms.
pub fn run_fw(problem: &Problem<'_>, x0: PointState, control: RunControl) -> Result<(PointState, Trace)> {
    let mut rec = Recorder::new(problem.env, control, false);
    let state = State::Point(x0);
    let ev = outer_eval(problem, &state)?;
    rec.outer(0, ev.f, ev.gap.w_plus);
    let State::Point(mut ps) = state else { unreachable!() };
    while !rec.stopped() {
        let (y, report) = crate::steps::fw_step(problem, &ps.x);
        let stationary = report.w_plus.is_some_and(|w| w <= 0.0);
        let step = AdapterStep {
            state: State::Point(PointState::new(y.clone())),
            phi: report.phi.unwrap_or(0.0),
            t: report.duration,
            reports: vec![report],
            stationary,
            unsuccessful_simplex: 0,
            working_set_len: 0,
        };
        rec.step(0, &step);
        ps.x = y;
        if stationary && !rec.stopped() {
            rec.trace.status = RunStatus::Stationary;
        }
    }
    Ok((ps, rec.finish()))
}

struct Ctx<'e> {
    adapter: CgStepAdapter,
    d_max: usize,
    rec: Recorder<'e>,
}

/// Run the recursive wrapper from the root polytope.
pub fn cg_recursive(
    problem: &Problem<'_>,
    adapter: &CgStepAdapter,
    state: State,
    d_max: usize,
    control: RunControl,
) -> Result<(State, Trace)> {
    if let CgStepAdapter::CacheDicg { kappa, .. } = adapter {
        if !kappa.is_finite() {
            return Err(FwError::Precondition("the cached adapter needs a finite kappa".into()));
        }
    }
    let mut ctx = Ctx {
        adapter: *adapter,
        d_max,
        rec: Recorder::new(problem.env, control, adapter.is_afw()),
    };
    let root = problem.at_depth(0);
    let state = recurse(&mut ctx, &root, state, 0.0, 0.0)?;
    Ok((state, ctx.rec.finish()))
}

fn recurse(
    ctx: &mut Ctx<'_>,
    problem: &Problem<'_>,
    mut state: State,
    phi_parent: f64,
    t_parent: f64,
) -> Result<State> {
    let depth = problem.depth;
    let backtrack = |phi: f64, t: f64| depth > 0 && phi * phi / t < phi_parent * phi_parent / t_parent;
    ctx.rec.trace.diagnostics.max_depth_reached = ctx.rec.trace.diagnostics.max_depth_reached.max(depth);

    let mut phi;
    let mut t_outer = 0usize;
    loop {
        let ev = outer_eval(problem, &state)?;
        let f = ev.f;
        phi = ev.gap.w;
        let t_eff = if depth == 0 { ev.t } else { ev.t.min(t_parent) };
        ctx.rec.outer(depth, f, ev.gap.w_plus);
        if ctx.rec.stopped() {
            return Ok(state);
        }
        if phi <= 0.0 {
            if depth == 0 {
                ctx.rec.trace.status = RunStatus::Stationary;
            } else {
                ctx.rec.failed(f);
            }
            return Ok(state);
        }
        if t_outer > 0 && backtrack(phi, t_eff) {
            ctx.rec.failed(f);
            return Ok(state);
        }
        t_outer += 1;

        if depth >= ctx.d_max {
            break;
        }
        problem.charge(problem.polytope.oracle_cost() + problem.dim() as u64);
        let reduced = reduce(
            problem.polytope,
            state.x(),
            &ev.gap.s,
            &ev.g,
            depth,
            ctx.d_max,
            problem.objective,
        )?;
        let ReduceOutcome::Reduced(r) = reduced else {
            break;
        };
        ctx.rec.trace.diagnostics.reduce_calls += 1;
        problem.charge(r.map.restrict_cost(problem.objective) + 2 * problem.dim() as u64);
        let child_state = state.restrict(&r.map)?;
        let child = Problem {
            objective: &r.restricted_objective,
            polytope: &r.q,
            env: problem.env,
            depth: depth + 1,
        };
        if ctx.rec.control.check_p5 {
            let d = p5_discrepancy(&child, &child_state, phi)?;
            let diag = &mut ctx.rec.trace.diagnostics;
            diag.p5_max_discrepancy = diag.p5_max_discrepancy.max(d);
        }
        let out = recurse(ctx, &child, child_state, phi, t_eff)?;
        state = out.lift(&r.map);
        if ctx.rec.stopped() {
            return Ok(state);
        }
    }

    for t in 0.. {
        let step = ctx.adapter.step(problem, &state, phi)?;
        let f_now = step
            .reports
            .first()
            .map_or_else(|| problem.objective.value(state.x()), |r| r.f_before);
        if step.stationary && step.reports.is_empty() {
            if depth == 0 {
                ctx.rec.trace.status = RunStatus::Stationary;
            } else {
                ctx.rec.failed(f_now);
            }
            return Ok(state);
        }
        if t > 0 && backtrack(step.phi, step.t) {
            if ctx.rec.control.accept_all {
                ctx.rec.step(depth, &step);
                state = step.state;
            } else {
                ctx.rec.failed(f_now);
            }
            return Ok(state);
        }
        ctx.rec.step(depth, &step);
        state = step.state;
        phi = step.phi;
        if depth == 0 && step.stationary && !ctx.rec.stopped() {
            ctx.rec.trace.status = RunStatus::Stationary;
        }
        if ctx.rec.stopped() {
            return Ok(state);
        }
    }
    unreachable!("the inner loop only exits by returning")
}

/// `|w̃ − w|` with `w̃` computed by the reduced polytope's own oracles.
fn p5_discrepancy(child: &Problem<'_>, state: &State, w: f64) -> Result<f64> {
    let x = state.x();
    let g = child.objective.gradient(x);
    let s = child.polytope.min_oracle(&g);
    let v_score = match state {
        State::Point(_) => child.polytope.face_max_oracle(x, &g)?.dot(&g),
        State::Convex(c) => c
            .support()
            .iter()
            .map(|(a, _)| a.dot(&g))
            .fold(f64::NEG_INFINITY, f64::max),
    };
    Ok((v_score - s.dot(&g) - w).abs())
}
