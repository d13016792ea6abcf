use crate::linalg::DenseVector;

/// A vertex of a 0/1 polytope, stored as the sorted list of coordinates
/// equal to one.
///
/// Every shipped polytope has vertices in `{0,1}ⁿ`, so the sorted support is
/// a canonical encoding: two atoms are equal iff they are the same vertex.
/// Polytope-specific views (simplex index, arc list, matching) are decoded by
/// the owning polytope.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    ones: Vec<usize>,
}

impl Atom {
    /// Build from coordinates in any order; duplicates are removed.
    pub fn from_coords(mut ones: Vec<usize>) -> Self {
        ones.sort_unstable();
        ones.dedup();
        Self { ones }
    }

    pub fn unit(i: usize) -> Self {
        Self { ones: vec![i] }
    }

    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    pub fn len(&self) -> usize {
        self.ones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ones.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.ones.binary_search(&i).is_ok()
    }

    /// `⟨g, atom⟩`.
    pub fn dot(&self, g: &DenseVector) -> f64 {
        self.ones.iter().map(|&i| g[i]).sum()
    }

    pub fn to_dense(&self, n: usize) -> DenseVector {
        let mut v = DenseVector::zeros(n);
        self.add_to(&mut v, 1.0);
        v
    }

    /// `x += t·atom`.
    pub fn add_to(&self, x: &mut DenseVector, t: f64) {
        for &i in &self.ones {
            x[i] += t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_encoding() {
        assert_eq!(Atom::from_coords(vec![3, 1, 3]), Atom::from_coords(vec![1, 3]));
        let a = Atom::from_coords(vec![0, 2]);
        let g: DenseVector = vec![1.0, 10.0, 100.0].into();
        assert_eq!(a.dot(&g), 101.0);
        assert_eq!(a.to_dense(3).as_slice(), &[1.0, 0.0, 1.0]);
        assert!(a.contains(2) && !a.contains(1));
    }
}
