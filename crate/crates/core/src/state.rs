//! Algorithm states: a bare point (optionally with a working set of atoms)
//! for DiCG-style methods, or an explicit convex combination for BCG.

use crate::atom::Atom;
use crate::error::{FwError, Result};
use crate::linalg::DenseVector;
use crate::polytope::{MappingDescriptor, Polytope, ZERO_TOL};

pub const DEFAULT_CAPACITY: usize = 10;

/// Bounded cache of atoms with oldest-timestamp eviction.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkingSet {
    entries: Vec<(Atom, u64)>,
    capacity: usize,
    next_stamp: u64,
}

impl WorkingSet {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "working set capacity must be positive");
        Self {
            entries: Vec::new(),
            capacity,
            next_stamp: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.entries.iter().map(|(a, _)| a)
    }

    pub fn entries(&self) -> &[(Atom, u64)] {
        &self.entries
    }

    fn stamp(&mut self) -> u64 {
        self.next_stamp += 1;
        self.next_stamp
    }

    /// Insert `atom` (or refresh its timestamp if present), evicting the
    /// oldest entry when the capacity is exceeded. Returns the evicted atom.
    pub fn insert(&mut self, atom: Atom) -> Option<Atom> {
        let t = self.stamp();
        if let Some(entry) = self.entries.iter_mut().find(|(a, _)| *a == atom) {
            entry.1 = t;
            return None;
        }
        self.entries.push((atom, t));
        if self.entries.len() > self.capacity {
            let oldest = (0..self.entries.len())
                .min_by_key(|&i| self.entries[i].1)
                .expect("nonempty");
            return Some(self.entries.remove(oldest).0);
        }
        None
    }

    /// Refresh the timestamp of the entry at `index`.
    pub fn touch(&mut self, index: usize) {
        let t = self.stamp();
        self.entries[index].1 = t;
    }

    fn map_atoms(&self, f: impl Fn(&Atom) -> Option<Atom>) -> Self {
        Self {
            entries: self.entries.iter().filter_map(|(a, t)| f(a).map(|b| (b, *t))).collect(),
            capacity: self.capacity,
            next_stamp: self.next_stamp,
        }
    }
}

/// A feasible point, optionally carrying a working set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointState {
    pub x: DenseVector,
    pub working_set: Option<WorkingSet>,
}

impl PointState {
    pub fn new(x: DenseVector) -> Self {
        Self { x, working_set: None }
    }

    pub fn from_atom(atom: &Atom, dim: usize) -> Self {
        Self::new(atom.to_dense(dim))
    }

    pub fn with_working_set(mut self, capacity: usize) -> Self {
        self.working_set = Some(WorkingSet::new(capacity));
        self
    }
}

/// `x = Σ wᵢ·atomᵢ` with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexState {
    support: Vec<(Atom, f64)>,
    x: DenseVector,
}

impl ConvexState {
    pub fn from_atom(atom: Atom, dim: usize) -> Self {
        let x = atom.to_dense(dim);
        Self {
            support: vec![(atom, 1.0)],
            x,
        }
    }

    /// Build from weighted atoms; weights are pruned and renormalized.
    pub fn from_weights(support: Vec<(Atom, f64)>, dim: usize) -> Self {
        let mut s = Self {
            support,
            x: DenseVector::zeros(dim),
        };
        s.resync();
        s
    }

    pub fn support(&self) -> &[(Atom, f64)] {
        &self.support
    }

    pub fn x(&self) -> &DenseVector {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Drop weights ≤ 1e-12, renormalize, merge duplicates and recompute `x`.
    pub fn resync(&mut self) {
        let mut merged: Vec<(Atom, f64)> = Vec::with_capacity(self.support.len());
        for (a, w) in self.support.drain(..) {
            match merged.iter_mut().find(|(b, _)| *b == a) {
                Some(entry) => entry.1 += w,
                None => merged.push((a, w)),
            }
        }
        merged.retain(|(_, w)| *w > ZERO_TOL);
        assert!(!merged.is_empty(), "convex state lost its whole support");
        let total: f64 = merged.iter().map(|(_, w)| w).sum();
        for (_, w) in &mut merged {
            *w /= total;
        }
        let mut x = DenseVector::zeros(self.x.len());
        for (a, w) in &merged {
            a.add_to(&mut x, *w);
        }
        self.support = merged;
        self.x = x;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Point(PointState),
    Convex(ConvexState),
}

impl State {
    pub fn x(&self) -> &DenseVector {
        match self {
            Self::Point(p) => &p.x,
            Self::Convex(c) => c.x(),
        }
    }

    pub fn is_feasible(&self, p: &Polytope) -> bool {
        p.is_feasible(self.x())
    }

    /// Map into the reduced polytope. Working-set atoms that do not survive
    /// are dropped; support atoms must survive.
    pub fn restrict(&self, map: &MappingDescriptor) -> Result<State> {
        match self {
            Self::Point(p) => Ok(Self::Point(PointState {
                x: map.restrict_point(&p.x)?,
                working_set: p.working_set.as_ref().map(|w| w.map_atoms(|a| map.restrict_atom(a))),
            })),
            Self::Convex(c) => {
                let support = c
                    .support
                    .iter()
                    .map(|(a, w)| map.restrict_atom(a).map(|b| (b, *w)).ok_or(FwError::AtomRestrict))
                    .collect::<Result<Vec<_>>>()?;
                let x = map.restrict_point(&c.x)?;
                Ok(Self::Convex(ConvexState { support, x }))
            }
        }
    }

    pub fn lift(&self, map: &MappingDescriptor) -> State {
        match self {
            Self::Point(p) => Self::Point(PointState {
                x: map.lift_point(&p.x),
                working_set: p.working_set.as_ref().map(|w| w.map_atoms(|a| Some(map.lift_atom(a)))),
            }),
            Self::Convex(c) => Self::Convex(ConvexState {
                support: c.support.iter().map(|(a, w)| (map.lift_atom(a), *w)).collect(),
                x: map.lift_point(&c.x),
            }),
        }
    }
}
