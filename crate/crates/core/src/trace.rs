//! Timestamped run traces and their CSV form.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{FwError, Result};
use crate::problem::OracleStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Fw,
    DicgGood,
    DicgDrop,
    /// A PFW step that is neither good nor a drop step.
    DicgAbnormal,
    Simplex,
    Sido,
    BcgFw,
    Halve,
    Outer,
    Failed,
}

impl StepKind {
    pub const ALL: [StepKind; 10] = [
        Self::Fw,
        Self::DicgGood,
        Self::DicgDrop,
        Self::DicgAbnormal,
        Self::Simplex,
        Self::Sido,
        Self::BcgFw,
        Self::Halve,
        Self::Outer,
        Self::Failed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fw => "FW",
            Self::DicgGood => "DICG_GOOD",
            Self::DicgDrop => "DICG_DROP",
            Self::DicgAbnormal => "DICG_ABNORMAL",
            Self::Simplex => "SIMPLEX",
            Self::Sido => "SIDO",
            Self::BcgFw => "BCG_FW",
            Self::Halve => "HALVE",
            Self::Outer => "OUTER",
            Self::Failed => "FAILED",
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).expect("listed")
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StepKind {
    type Err = FwError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| FwError::Parse {
                line: 0,
                msg: format!("unknown step kind '{s}'"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub elapsed: f64,
    pub f: f64,
    /// Running maximum of the dual bounds seen so far (`-inf` before any).
    pub lb: f64,
    pub kind: StepKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RunStatus {
    #[default]
    Running,
    /// `w⁺ ≤ target_gap` at the root.
    TargetReached,
    /// The root gap estimate vanished.
    Stationary,
    StepBudget,
    OracleBudget,
    TimeBudget,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Running => "RUNNING",
            Self::TargetReached => "TARGET_REACHED",
            Self::Stationary => "STATIONARY",
            Self::StepBudget => "STEP_BUDGET",
            Self::OracleBudget => "ORACLE_BUDGET",
            Self::TimeBudget => "TIME_BUDGET",
        }
    }

    pub fn is_budget(self) -> bool {
        matches!(self, Self::StepBudget | Self::OracleBudget | Self::TimeBudget)
    }
}

/// Quantities checked by the structural-invariant tests.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Largest number of unsuccessful simplex steps within one cached call.
    pub max_unsuccessful_simplex: usize,
    pub max_working_set: usize,
    /// AFW steps that decreased `f` but were classified abnormal.
    pub afw_unclassified: u64,
    /// Largest `|w̃ − w|` observed at a reduce boundary, when checked.
    pub p5_max_discrepancy: f64,
    pub reduce_calls: u64,
    pub max_depth_reached: usize,
    /// Latest root `w⁺` observed.
    pub last_w_plus: Option<f64>,
    pub first_w_plus: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    counts: [u64; 10],
    pub oracle: OracleStats,
    pub status: RunStatus,
    pub diagnostics: Diagnostics,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append an entry; `raw_lb` is folded into the running maximum.
    pub fn push(&mut self, elapsed: f64, f: f64, raw_lb: Option<f64>, kind: StepKind) {
        let prev = self.entries.last().map_or(f64::NEG_INFINITY, |e| e.lb);
        let lb = raw_lb.map_or(prev, |b| prev.max(b));
        self.entries.push(TraceEntry { elapsed, f, lb, kind });
        self.counts[kind.index()] += 1;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, kind: StepKind) -> u64 {
        self.counts[kind.index()]
    }

    /// Entries that are algorithm steps (excludes outer evaluations and
    /// failed-step markers).
    pub fn steps(&self) -> u64 {
        self.entries.len() as u64 - self.count(StepKind::Outer) - self.count(StepKind::Failed)
    }

    pub fn last(&self) -> Option<&TraceEntry> {
        self.entries.last()
    }

    pub fn final_f(&self) -> f64 {
        self.last().map_or(f64::NAN, |e| e.f)
    }

    pub fn final_lb(&self) -> f64 {
        self.last().map_or(f64::NEG_INFINITY, |e| e.lb)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["elapsed", "f", "lb", "step_kind"])?;
        for e in &self.entries {
            w.write_record([fmt_f64(e.elapsed), fmt_f64(e.f), fmt_f64(e.lb), e.kind.to_string()])?;
        }
        w.into_inner().map_err(|e| FwError::Csv(e.into_error().into()))
    }

    /// Parse the CSV produced by [`Trace::to_csv`]. Counters are rebuilt
    /// from the entries; lower bounds are taken as written.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["elapsed", "f", "lb", "step_kind"] {
            return Err(FwError::Parse {
                line: 1,
                msg: "unexpected trace header".into(),
            });
        }
        let mut trace = Trace::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let num = |k: usize| -> Result<f64> {
                rec.get(k).unwrap_or_default().parse().map_err(|e| FwError::Parse {
                    line,
                    msg: format!("bad number: {e}"),
                })
            };
            let kind: StepKind = rec.get(3).unwrap_or_default().parse().map_err(|_| FwError::Parse {
                line,
                msg: "bad step kind".into(),
            })?;
            trace.entries.push(TraceEntry {
                elapsed: num(0)?,
                f: num(1)?,
                lb: num(2)?,
                kind,
            });
            trace.counts[kind.index()] += 1;
        }
        Ok(trace)
    }

    pub fn summary_csv(&self) -> String {
        format!(
            "final_f,final_lb,steps,oracle_calls,status\n{},{},{},{},{}\n",
            fmt_f64(self.final_f()),
            fmt_f64(self.final_lb()),
            self.steps(),
            self.oracle.total(),
            self.status.as_str()
        )
    }

    /// Write the trace to `path` and the summary to the sidecar path.
    pub fn emit_csv(&self, path: &Path) -> Result<PathBuf> {
        if self.is_empty() {
            return Err(FwError::Precondition("cannot emit an empty trace".into()));
        }
        let io = |source| FwError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut f = BufWriter::new(File::create(path).map_err(io)?);
        f.write_all(&self.to_csv()?).map_err(io)?;
        f.flush().map_err(io)?;
        let side = summary_path(path);
        std::fs::write(&side, self.summary_csv()).map_err(|source| FwError::Io {
            path: side.display().to_string(),
            source,
        })?;
        Ok(side)
    }
}

/// `trace.csv` → `trace.summary.csv`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.summary.csv"))
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
