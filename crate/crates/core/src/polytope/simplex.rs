use crate::atom::Atom;
use crate::error::{FwError, Result};
use crate::linalg::DenseVector;

use super::ZERO_TOL;

/// Probability simplex `{x ≥ 0 : Σx = 1}` in `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    n: usize,
}

impl Simplex {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "simplex needs at least one coordinate");
        Self { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn min_oracle(&self, g: &DenseVector) -> Atom {
        let mut best = 0;
        for i in 1..self.n {
            if g[i] < g[best] {
                best = i;
            }
        }
        Atom::unit(best)
    }

    pub fn face_max_oracle(&self, x: &DenseVector, g: &DenseVector) -> Result<Atom> {
        let mut best: Option<usize> = None;
        for i in 0..self.n {
            if x[i] > ZERO_TOL && best.is_none_or(|b| g[i] > g[b]) {
                best = Some(i);
            }
        }
        best.map(Atom::unit).ok_or(FwError::EmptyFace)
    }

    pub fn is_vertex(&self, atom: &Atom) -> bool {
        atom.len() == 1 && atom.ones()[0] < self.n
    }

    pub fn equality_violation(&self, x: &DenseVector) -> f64 {
        (x.iter().sum::<f64>() - 1.0).abs()
    }

    /// Index of the vertex `e_i`.
    pub fn decode(&self, atom: &Atom) -> Option<usize> {
        self.is_vertex(atom).then(|| atom.ones()[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_oracle_argmin() {
        let s = Simplex::new(3);
        assert_eq!(s.min_oracle(&vec![3.0, 1.0, 2.0].into()), Atom::unit(1));
        // ties go to the lowest index
        assert_eq!(s.min_oracle(&vec![1.0, 1.0, 2.0].into()), Atom::unit(0));
    }

    #[test]
    fn face_max_respects_support() {
        let s = Simplex::new(3);
        let x: DenseVector = vec![0.5, 0.5, 0.0].into();
        let v = s.face_max_oracle(&x, &vec![1.0, 2.0, 9.0].into()).unwrap();
        assert_eq!(v, Atom::unit(1));
    }

    #[test]
    fn face_max_at_vertex_returns_vertex() {
        let s = Simplex::new(4);
        let x = Atom::unit(2).to_dense(4);
        let v = s.face_max_oracle(&x, &vec![5.0, 6.0, -1.0, 7.0].into()).unwrap();
        assert_eq!(v, Atom::unit(2));
    }
}
