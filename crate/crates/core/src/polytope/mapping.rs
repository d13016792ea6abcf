//! The affine injective map from a reduced polytope `Q` back into `P`.
//!
//! Each coordinate of `P` is either fixed to 0 or 1, or a copy of one
//! coordinate of `Q`. Several `P` coordinates may copy the same `Q`
//! coordinate (contracted DAG chains), which is why the map is stored per
//! `P` coordinate together with the preimage lists.

use crate::atom::Atom;
use crate::error::{FwError, Result};
use crate::linalg::{ColMatrix, DenseVector};
use crate::objective::QuadraticObjective;

use super::FEAS_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordTag {
    Fixed(bool),
    Linked(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingDescriptor {
    tags: Vec<CoordTag>,
    preimage: Vec<Vec<usize>>,
    fixed_ones: Vec<usize>,
}

impl MappingDescriptor {
    /// Build from per-`P`-coordinate tags. Every `Q` coordinate in
    /// `0..q_dim` must be linked from at least one `P` coordinate.
    pub fn new(tags: Vec<CoordTag>, q_dim: usize) -> Self {
        let mut preimage = vec![Vec::new(); q_dim];
        let mut fixed_ones = Vec::new();
        for (p, tag) in tags.iter().enumerate() {
            match *tag {
                CoordTag::Linked(q) => preimage[q].push(p),
                CoordTag::Fixed(true) => fixed_ones.push(p),
                CoordTag::Fixed(false) => {}
            }
        }
        assert!(
            preimage.iter().all(|ps| !ps.is_empty()),
            "every reduced coordinate needs a representative"
        );
        Self {
            tags,
            preimage,
            fixed_ones,
        }
    }

    pub fn p_dim(&self) -> usize {
        self.tags.len()
    }

    pub fn q_dim(&self) -> usize {
        self.preimage.len()
    }

    pub fn tags(&self) -> &[CoordTag] {
        &self.tags
    }

    /// The designated `P` coordinate read when restricting `Q` coordinate `q`.
    pub fn representative(&self, q: usize) -> usize {
        self.preimage[q][0]
    }

    pub fn preimage(&self, q: usize) -> &[usize] {
        &self.preimage[q]
    }

    pub fn is_identity(&self) -> bool {
        self.p_dim() == self.q_dim() && self.tags.iter().enumerate().all(|(p, t)| *t == CoordTag::Linked(p))
    }

    pub fn lift_point(&self, xq: &DenseVector) -> DenseVector {
        assert_eq!(xq.len(), self.q_dim(), "lift_point: dimension");
        let values = self
            .tags
            .iter()
            .map(|t| match *t {
                CoordTag::Fixed(b) => f64::from(u8::from(b)),
                CoordTag::Linked(q) => xq[q],
            })
            .collect();
        DenseVector::from_vec(values)
    }

    /// Inverse of [`lift_point`](Self::lift_point) on the image of the map.
    pub fn restrict_point(&self, xp: &DenseVector) -> Result<DenseVector> {
        assert_eq!(xp.len(), self.p_dim(), "restrict_point: dimension");
        let xq: Vec<f64> = (0..self.q_dim()).map(|q| xp[self.representative(q)]).collect();
        for (p, tag) in self.tags.iter().enumerate() {
            let required = match *tag {
                CoordTag::Fixed(b) => f64::from(u8::from(b)),
                CoordTag::Linked(q) => xq[q],
            };
            if (xp[p] - required).abs() > FEAS_TOL {
                return Err(FwError::RestrictFailed {
                    coord: p,
                    value: xp[p],
                    required,
                });
            }
        }
        Ok(DenseVector::from_vec(xq))
    }

    pub fn lift_atom(&self, atom: &Atom) -> Atom {
        let mut ones = self.fixed_ones.clone();
        for &q in atom.ones() {
            ones.extend_from_slice(&self.preimage[q]);
        }
        Atom::from_coords(ones)
    }

    /// The atom of `Q` mapping onto `atom`, if one exists.
    pub fn restrict_atom(&self, atom: &Atom) -> Option<Atom> {
        let mut qs = Vec::with_capacity(atom.len());
        for &p in atom.ones() {
            match self.tags[p] {
                CoordTag::Fixed(false) => return None,
                CoordTag::Fixed(true) => {}
                CoordTag::Linked(q) => qs.push(q),
            }
        }
        let candidate = Atom::from_coords(qs);
        (self.lift_atom(&candidate) == *atom).then_some(candidate)
    }

    /// Gradient of `f ∘ L` from the gradient of `f`: `g̃_q = Σ_{p→q} g_p`.
    pub fn pull_back_gradient(&self, gp: &DenseVector) -> DenseVector {
        assert_eq!(gp.len(), self.p_dim(), "pull_back_gradient: dimension");
        let g = self.preimage.iter().map(|ps| ps.iter().map(|&p| gp[p]).sum()).collect();
        DenseVector::from_vec(g)
    }

    /// Materialize `f̃ = f ∘ L` as a quadratic in `Q` coordinates.
    pub fn restrict_objective(&self, obj: &QuadraticObjective) -> QuadraticObjective {
        assert_eq!(obj.dim(), self.p_dim(), "restrict_objective: dimension");
        match obj {
            QuadraticObjective::LeastSquares { a, b } => {
                let m = a.rows();
                let mut aq = ColMatrix::zeros(m, self.q_dim());
                for (q, ps) in self.preimage.iter().enumerate() {
                    let col = aq.col_mut(q);
                    for &p in ps {
                        col.iter_mut().zip(a.col(p)).for_each(|(c, v)| *c += v);
                    }
                }
                let mut bq = b.clone();
                for &p in &self.fixed_ones {
                    bq.iter_mut().zip(a.col(p)).for_each(|(c, v)| *c -= v);
                }
                QuadraticObjective::LeastSquares { a: aq, b: bq }
            }
            QuadraticObjective::General { a, b, constant } => {
                // x = c + Mx̃:  ½x̃ᵀMᵀAMx̃ + (Mᵀ(Ac + b))ᵀx̃ + ½cᵀAc + bᵀc + constant
                let n = self.p_dim();
                let nq = self.q_dim();
                let mut c = vec![0.0; n];
                for &p in &self.fixed_ones {
                    c[p] = 1.0;
                }
                let ac = a.mul_vec(&c);
                let mut am = ColMatrix::zeros(n, nq);
                for (q, ps) in self.preimage.iter().enumerate() {
                    let col = am.col_mut(q);
                    for &p in ps {
                        col.iter_mut().zip(a.col(p)).for_each(|(c, v)| *c += v);
                    }
                }
                let mut aq = ColMatrix::zeros(nq, nq);
                for j in 0..nq {
                    let col = am.col(j);
                    for (i, ps) in self.preimage.iter().enumerate() {
                        let v: f64 = ps.iter().map(|&p| col[p]).sum();
                        aq.set(i, j, v);
                    }
                }
                let bq = self
                    .preimage
                    .iter()
                    .map(|ps| ps.iter().map(|&p| ac[p] + b[p]).sum())
                    .collect();
                let offset: f64 = self.fixed_ones.iter().map(|&p| 0.5 * ac[p] + b[p]).sum();
                QuadraticObjective::General {
                    a: aq,
                    b: bq,
                    constant: constant + offset,
                }
            }
        }
    }

    /// Work units for materializing the restricted objective.
    pub fn restrict_cost(&self, obj: &QuadraticObjective) -> u64 {
        match obj {
            QuadraticObjective::LeastSquares { a, .. } => (a.rows() * self.p_dim()) as u64,
            QuadraticObjective::General { .. } => (self.p_dim() * (self.p_dim() + self.q_dim())) as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CoordTag::*;

    fn sample() -> MappingDescriptor {
        // P has 5 coordinates: p0 fixed 0, p1,p2 both copy q0, p3 fixed 1, p4 copies q1
        MappingDescriptor::new(vec![Fixed(false), Linked(0), Linked(0), Fixed(true), Linked(1)], 2)
    }

    #[test]
    fn point_round_trip() {
        let m = sample();
        let xq: DenseVector = vec![0.25, 0.75].into();
        let xp = m.lift_point(&xq);
        assert_eq!(xp.as_slice(), &[0.0, 0.25, 0.25, 1.0, 0.75]);
        assert_eq!(m.restrict_point(&xp).unwrap(), xq);
    }

    #[test]
    fn restrict_rejects_fixed_violation() {
        let m = sample();
        let xp: DenseVector = vec![0.1, 0.25, 0.25, 1.0, 0.75].into();
        assert!(matches!(
            m.restrict_point(&xp),
            Err(FwError::RestrictFailed { coord: 0, .. })
        ));
    }

    #[test]
    fn atoms_map_or_drop() {
        let m = sample();
        let a = Atom::from_coords(vec![1, 2, 3]);
        let q = m.restrict_atom(&a).unwrap();
        assert_eq!(q, Atom::unit(0));
        assert_eq!(m.lift_atom(&q), a);
        // uses a coordinate fixed at zero
        assert!(m.restrict_atom(&Atom::from_coords(vec![0, 3, 4])).is_none());
        // splits a linked pair
        assert!(m.restrict_atom(&Atom::from_coords(vec![1, 3])).is_none());
        // misses the fixed one
        assert!(m.restrict_atom(&Atom::from_coords(vec![4])).is_none());
    }

    #[test]
    fn restricted_objectives_agree_with_composition() {
        let m = sample();
        let a = ColMatrix::from_rows(&[vec![1.0, 2.0, 0.5, -1.0, 3.0], vec![0.0, 1.0, 1.5, 2.0, -0.5]]);
        let ls = QuadraticObjective::least_squares(a.clone(), vec![0.3, -0.2]);
        // symmetric PSD: AᵀA
        let mut h = ColMatrix::zeros(5, 5);
        for i in 0..5 {
            for j in 0..5 {
                h.set(i, j, (0..2).map(|k| a.get(k, i) * a.get(k, j)).sum());
            }
        }
        let gen = QuadraticObjective::general(h, vec![0.1, -0.4, 0.2, 0.7, -0.3]);
        for obj in [ls, gen] {
            let r = m.restrict_objective(&obj);
            for xq in [[0.0, 1.0], [0.3, 0.7], [2.0, -1.0]] {
                let xq: DenseVector = xq.to_vec().into();
                let xp = m.lift_point(&xq);
                let (fp, gp) = obj.value_and_gradient(&xp);
                let (fq, gq) = r.value_and_gradient(&xq);
                assert!((fp - fq).abs() <= 1e-12 * (1.0 + fp.abs()));
                let pulled = m.pull_back_gradient(&gp);
                assert!(pulled.max_abs_diff(&gq) <= 1e-12);
            }
        }
    }
}
