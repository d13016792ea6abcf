//! Step procedures. Each maps a state to a new state and reports what it
//! did; all work is charged through [`Problem`](crate::problem::Problem).

mod bcg;
mod cache;
mod dicg;
mod fw;
mod shadow;

pub use bcg::{bcg_step, sido_step, BcgOptions, BcgOutcome};
pub use cache::{cache_dicg_step, CacheOutcome, DEFAULT_KAPPA};
pub use dicg::{dicg_step, DicgOutcome, DicgVariant};
pub use fw::fw_step;
pub use shadow::{shadow_delta, shadow_simplex_step, shifted, ShadowOutcome};

use crate::gap::{bound_from, GapInfo};
use crate::trace::StepKind;

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub kind: StepKind,
    /// `f` at the input point.
    pub f_before: f64,
    /// `f_before − delta_f`.
    pub f_after: f64,
    pub delta_f: f64,
    /// Gap estimate produced by the step (`w` for DiCG, `Φ′` for BCG).
    pub phi: Option<f64>,
    /// `w⁺` at the input point, when the min-oracle was called.
    pub w_plus: Option<f64>,
    pub gap: Option<GapInfo>,
    pub duration: f64,
    /// Clock reading when the step finished.
    pub finished_at: f64,
}

impl StepReport {
    /// Dual bound `f_before − w⁺` certified by this step, if any.
    pub fn bound(&self) -> Option<f64> {
        self.w_plus.map(|w| bound_from(self.f_before, w))
    }
}
