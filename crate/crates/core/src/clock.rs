//! Injectable time source.
//!
//! The recursive wrapper and the cached DiCG step branch on measured
//! durations. `Counted` mode replaces wall time with a deterministic work
//! counter so those branches replay identically.

use std::cell::Cell;
use std::time::Instant;

pub const DEFAULT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockMode {
    Wall,
    Counted,
}

#[derive(Debug)]
pub struct Clock {
    mode: ClockMode,
    floor: f64,
    start: Instant,
    units: Cell<u64>,
}

impl Clock {
    pub fn new(mode: ClockMode) -> Self {
        Self {
            mode,
            floor: DEFAULT_FLOOR,
            start: Instant::now(),
            units: Cell::new(0),
        }
    }

    pub fn wall() -> Self {
        Self::new(ClockMode::Wall)
    }

    pub fn counted() -> Self {
        Self::new(ClockMode::Counted)
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        assert!(floor > 0.0, "clock floor must be positive");
        self.floor = floor;
        self
    }

    pub fn mode(&self) -> ClockMode {
        self.mode
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Record `units` of work. No-op for wall clocks.
    pub fn charge(&self, units: u64) {
        if self.mode == ClockMode::Counted {
            self.units.set(self.units.get().saturating_add(units));
        }
    }

    /// Current reading: seconds since construction, or accumulated units.
    pub fn now(&self) -> f64 {
        match self.mode {
            ClockMode::Wall => self.start.elapsed().as_secs_f64(),
            ClockMode::Counted => self.units.get() as f64,
        }
    }

    /// Duration since `since`, clamped to the floor.
    pub fn since(&self, since: f64) -> f64 {
        (self.now() - since).max(self.floor)
    }
}
