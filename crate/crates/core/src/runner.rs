//! Experiment runner: one configured algorithm on one instance, and the
//! noise-level calibration built on it.

use std::fmt;
use std::str::FromStr;

use crate::clock::{Clock, ClockMode};
use crate::error::{FwError, Result};
use crate::instances::{generate, Instance, InstanceSpec};
use crate::problem::{Env, Problem};
use crate::recursive::{cg_recursive, run_base, run_fw, CgStepAdapter, RunControl, RECURSIVE_KAPPA};
use crate::state::{PointState, DEFAULT_CAPACITY};
use crate::steps::{BcgOptions, DicgVariant, DEFAULT_KAPPA};
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Fw,
    Dicg(DicgVariant),
    CacheDicg(DicgVariant),
    Bcg,
}

impl Algorithm {
    pub const NAMES: [&'static str; 7] = [
        "fw",
        "dicg-afw",
        "dicg-pfw",
        "cache-dicg-afw",
        "cache-dicg-pfw",
        "bcg",
        "dicg",
    ];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |v: &DicgVariant| match v {
            DicgVariant::Afw => "afw",
            DicgVariant::Pfw => "pfw",
        };
        match self {
            Self::Fw => write!(f, "fw"),
            Self::Dicg(var) => write!(f, "dicg-{}", v(var)),
            Self::CacheDicg(var) => write!(f, "cache-dicg-{}", v(var)),
            Self::Bcg => write!(f, "bcg"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = FwError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "fw" => Self::Fw,
            "dicg" | "dicg-pfw" => Self::Dicg(DicgVariant::Pfw),
            "dicg-afw" => Self::Dicg(DicgVariant::Afw),
            "cache-dicg" | "cache-dicg-pfw" | "cachedicg" => Self::CacheDicg(DicgVariant::Pfw),
            "cache-dicg-afw" => Self::CacheDicg(DicgVariant::Afw),
            "bcg" => Self::Bcg,
            other => {
                return Err(FwError::Precondition(format!(
                    "unknown algorithm `{other}`; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub d_max: usize,
    pub control: RunControl,
    /// Working-set capacity `M`.
    pub capacity: usize,
    /// Simplex-loop budget factor; defaults to `∞` for flat runs and to
    /// [`RECURSIVE_KAPPA`] inside the recursion.
    pub kappa: Option<f64>,
    pub lazy: bool,
    pub k: f64,
    pub clock: ClockMode,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            d_max: 0,
            control: RunControl::default(),
            capacity: DEFAULT_CAPACITY,
            kappa: None,
            lazy: false,
            k: 1.0,
            clock: ClockMode::Counted,
        }
    }

    pub fn with_d_max(mut self, d_max: usize) -> Self {
        self.d_max = d_max;
        self
    }

    pub fn with_target_gap(mut self, target_gap: f64) -> Self {
        self.control.target_gap = target_gap;
        self
    }

    pub fn with_max_steps(mut self, max_steps: Option<u64>) -> Self {
        self.control.max_steps = max_steps;
        self
    }

    pub fn with_clock(mut self, clock: ClockMode) -> Self {
        self.clock = clock;
        self
    }

    /// The adapter that drives the configured algorithm; `None` for FW.
    pub fn adapter(&self) -> Option<CgStepAdapter> {
        let kappa = self
            .kappa
            .unwrap_or(if self.d_max > 0 { RECURSIVE_KAPPA } else { DEFAULT_KAPPA });
        match self.algorithm {
            Algorithm::Fw => None,
            Algorithm::Dicg(v) => Some(CgStepAdapter::Dicg(v)),
            Algorithm::CacheDicg(variant) => Some(CgStepAdapter::CacheDicg {
                variant,
                kappa,
                capacity: self.capacity,
            }),
            Algorithm::Bcg => Some(CgStepAdapter::Bcg(BcgOptions {
                lazy: self.lazy,
                k: self.k,
                accept_all: self.control.accept_all,
            })),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.d_max > 2 {
            return Err(FwError::Precondition(format!(
                "d_max must be 0, 1 or 2, got {}",
                self.d_max
            )));
        }
        if self.algorithm == Algorithm::Fw && self.d_max > 0 {
            return Err(FwError::Precondition(
                "FW has no recursive variant; use d_max = 0".into(),
            ));
        }
        if self.capacity == 0 {
            return Err(FwError::Precondition("working-set capacity must be positive".into()));
        }
        if self.kappa.is_some_and(|k| !(k > 0.0)) {
            return Err(FwError::Precondition("kappa must be positive".into()));
        }
        if !(self.k >= 1.0) {
            return Err(FwError::Precondition("lazy factor K must be at least 1".into()));
        }
        let c = &self.control;
        if c.target_gap.is_nan() {
            return Err(FwError::Precondition("target gap must not be NaN".into()));
        }
        if c.max_steps == Some(0) || c.max_oracle_calls == Some(0) || c.max_wall_secs.is_some_and(|t| !(t > 0.0)) {
            return Err(FwError::Precondition("budgets must be positive".into()));
        }
        Ok(())
    }
}

/// Run the configured algorithm; the recursive wrapper is used when
/// `d_max > 0`.
pub fn run(instance: &Instance, config: &RunConfig) -> Result<Trace> {
    config.validate()?;
    let env = Env::new(Clock::new(config.clock));
    let problem = Problem::new(&instance.objective, &instance.polytope, &env);
    let trace = match config.adapter() {
        None => {
            let x0 = PointState::from_atom(&instance.polytope.initial_atom(), problem.dim());
            run_fw(&problem, x0, config.control)?.1
        }
        Some(adapter) => {
            let state = adapter.initial_state(&instance.polytope);
            if config.d_max == 0 {
                run_base(&problem, &adapter, state, config.control)?.1
            } else {
                cg_recursive(&problem, &adapter, state, config.d_max, config.control)?.1
            }
        }
    };
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Calibration {
    /// Smallest integer `σ` with a certified positive optimum, plus one.
    Sigma(u64),
    /// A probe at this `σ` hit its budget before deciding.
    Indeterminate(u64),
}

/// Outcome of one probe: `Some(true)` when `f − w⁺ > 0` was certified.
pub fn probe_sigma(spec: &InstanceSpec, config: &RunConfig, sigma: u64) -> Result<Option<bool>> {
    let inst = generate(&spec.clone().with_sigma(sigma as f64))?;
    let trace = run(&inst, config)?;
    if trace.final_lb() > 0.0 {
        Ok(Some(true))
    } else if trace.status.is_budget() {
        Ok(None)
    } else {
        Ok(Some(false))
    }
}

/// Exponential then binary search over integer `σ ≤ max_sigma`, assuming
/// positivity is monotone in `σ`.
pub fn calibrate_sigma(spec: &InstanceSpec, config: &RunConfig, max_sigma: u64) -> Result<Calibration> {
    if !spec.family.has_noise() {
        return Err(FwError::Precondition(format!(
            "{} instances have no noise level",
            spec.family.name()
        )));
    }
    let probe = |s: u64| -> Result<std::result::Result<bool, Calibration>> {
        Ok(probe_sigma(spec, config, s)?.ok_or(Calibration::Indeterminate(s)))
    };
    match probe(0)? {
        Ok(true) => return Ok(Calibration::Sigma(1)),
        Ok(false) => {}
        Err(c) => return Ok(c),
    }
    let mut lo = 0;
    let mut hi = 1;
    loop {
        if hi > max_sigma {
            return Err(FwError::Precondition(format!(
                "no certified positive optimum for σ ≤ {max_sigma}"
            )));
        }
        match probe(hi)? {
            Ok(true) => break,
            Ok(false) => {
                lo = hi;
                hi = (hi * 2).min(max_sigma.max(hi + 1));
            }
            Err(c) => return Ok(c),
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match probe(mid)? {
            Ok(true) => hi = mid,
            Ok(false) => lo = mid,
            Err(c) => return Ok(c),
        }
    }
    Ok(Calibration::Sigma(hi + 1))
}
