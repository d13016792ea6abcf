//! A problem instance bound to a run environment.
//!
//! Every oracle and linear-algebra kernel used by the step procedures goes
//! through [`Problem`], which charges the clock and counts oracle calls per
//! recursion depth.

use std::cell::RefCell;

use crate::atom::Atom;
use crate::clock::Clock;
use crate::error::Result;
use crate::linalg::DenseVector;
use crate::objective::{QuadraticObjective, SegmentSearch};
use crate::polytope::{Polytope, ZERO_TOL};

/// Oracle call counts indexed by recursion depth.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub min_calls: Vec<u64>,
    pub max_calls: Vec<u64>,
}

impl OracleStats {
    fn bump(v: &mut Vec<u64>, depth: usize) {
        if v.len() <= depth {
            v.resize(depth + 1, 0);
        }
        v[depth] += 1;
    }

    pub fn total(&self) -> u64 {
        self.min_calls.iter().chain(&self.max_calls).sum()
    }

    pub fn root_min_calls(&self) -> u64 {
        self.min_calls.first().copied().unwrap_or(0)
    }
}

/// Per-run environment: the clock and oracle accounting.
#[derive(Debug)]
pub struct Env {
    pub clock: Clock,
    stats: RefCell<OracleStats>,
}

impl Env {
    pub fn new(clock: Clock) -> Self {
        Self {
            clock,
            stats: RefCell::new(OracleStats::default()),
        }
    }

    pub fn counted() -> Self {
        Self::new(Clock::counted())
    }

    pub fn wall() -> Self {
        Self::new(Clock::wall())
    }

    pub fn stats(&self) -> OracleStats {
        self.stats.borrow().clone()
    }

    pub fn oracle_calls(&self) -> u64 {
        self.stats.borrow().total()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub objective: &'a QuadraticObjective,
    pub polytope: &'a Polytope,
    pub env: &'a Env,
    pub depth: usize,
}

impl<'a> Problem<'a> {
    pub fn new(objective: &'a QuadraticObjective, polytope: &'a Polytope, env: &'a Env) -> Self {
        assert_eq!(
            objective.dim(),
            polytope.dim(),
            "objective and polytope dimensions differ"
        );
        Self {
            objective,
            polytope,
            env,
            depth: 0,
        }
    }

    pub fn at_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn charge(&self, units: u64) {
        self.env.clock.charge(units);
    }

    pub fn value(&self, x: &DenseVector) -> f64 {
        self.charge(self.objective.matvec_cost(nnz(x)) + 1);
        self.objective.value(x)
    }

    pub fn value_and_gradient(&self, x: &DenseVector) -> (f64, DenseVector) {
        self.charge(self.objective.gradient_cost(nnz(x)) + 1);
        self.objective.value_and_gradient(x)
    }

    pub fn min_oracle(&self, g: &DenseVector) -> Atom {
        self.charge(self.polytope.oracle_cost());
        OracleStats::bump(&mut self.env.stats.borrow_mut().min_calls, self.depth);
        self.polytope.min_oracle(g)
    }

    pub fn face_max_oracle(&self, x: &DenseVector, g: &DenseVector) -> Result<Atom> {
        self.charge(self.polytope.oracle_cost());
        OracleStats::bump(&mut self.env.stats.borrow_mut().max_calls, self.depth);
        self.polytope.face_max_oracle(x, g)
    }

    pub fn max_feasible_step(&self, x: &DenseVector, d: &DenseVector) -> Result<f64> {
        self.charge(self.dim() as u64 + 1);
        self.polytope.max_feasible_step(x, d)
    }

    pub fn segment(&self, x: &DenseVector, g: &DenseVector, u: &DenseVector) -> SegmentSearch {
        let p = u.sub(x);
        self.charge(self.objective.matvec_cost(nnz(&p)) + 2 * self.dim() as u64 + 1);
        self.objective.segment_search(x, g, u)
    }

    pub fn ray(&self, g: &DenseVector, d: &DenseVector) -> Result<(f64, f64)> {
        self.charge(self.objective.matvec_cost(nnz(d)) + self.dim() as u64 + 1);
        self.objective.ray_search(g, d)
    }
}

pub(crate) fn nnz(x: &DenseVector) -> usize {
    x.iter().filter(|v| v.abs() > ZERO_TOL).count()
}
