//! Frank-Wolfe methods over combinatorial polytopes.
//!
//! The crate provides the step procedures (FW, DiCG, BCG, cached DiCG with
//! shadow-simplex steps), the recursive wrapper built on self-reducible
//! oracles, oracles for the simplex, DAG paths and bipartite perfect
//! matchings, and the instance generators and runner used by the CLI.

pub mod atom;
pub mod clock;
pub mod error;
pub mod gap;
pub mod instances;
pub mod linalg;
pub mod objective;
pub mod polytope;
pub mod problem;
pub mod recursive;
pub mod runner;
pub mod state;
pub mod steps;
pub mod trace;

pub use atom::Atom;
pub use clock::{Clock, ClockMode};
pub use error::{FwError, Result};
pub use gap::{gap_info, lower_bound, GapInfo};
pub use instances::{generate, Family, Instance, InstanceSpec};
pub use linalg::{ColMatrix, DenseVector};
pub use objective::{line_search_ray, line_search_segment, QuadraticObjective};
pub use polytope::{MappingDescriptor, Polytope, ReduceOutcome, ReduceResult};
pub use problem::{Env, OracleStats, Problem};
pub use recursive::{cg_recursive, run_base, run_fw, AdapterStep, CgStepAdapter, RunControl};
pub use runner::{calibrate_sigma, run, Algorithm, Calibration, RunConfig};
pub use state::{ConvexState, PointState, State, WorkingSet};
pub use steps::{BcgOptions, DicgVariant, StepReport};
pub use trace::{RunStatus, StepKind, Trace, TraceEntry};
