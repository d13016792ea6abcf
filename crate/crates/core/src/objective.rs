//! Quadratic objectives with closed-form exact line search.

use crate::error::{FwError, Result};
use crate::linalg::{dot, ColMatrix, DenseVector};

/// A smooth convex quadratic.
///
/// * `LeastSquares`: `f(x) = ‖Ax − b‖²` with `A` of size `m × n`.
/// * `General`: `f(x) = ½xᵀAx + bᵀx + constant` with `A` symmetric PSD.
///   The constant is zero for user input and absorbs the offset produced when
///   an objective is restricted to a sub-polytope with fixed coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticObjective {
    LeastSquares { a: ColMatrix, b: Vec<f64> },
    General { a: ColMatrix, b: Vec<f64>, constant: f64 },
}

/// Result of an exact line search on the segment `[x, u]`.
#[derive(Debug, Clone)]
pub struct SegmentSearch {
    pub gamma: f64,
    pub y: DenseVector,
    /// `f(x) − f(y)`, evaluated in closed form.
    pub delta_f: f64,
}

impl QuadraticObjective {
    pub fn least_squares(a: ColMatrix, b: Vec<f64>) -> Self {
        assert_eq!(a.rows(), b.len(), "least squares: b length");
        Self::LeastSquares { a, b }
    }

    pub fn general(a: ColMatrix, b: Vec<f64>) -> Self {
        assert_eq!(a.rows(), a.cols(), "general quadratic: A must be square");
        assert_eq!(a.cols(), b.len(), "general quadratic: b length");
        Self::General { a, b, constant: 0.0 }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::LeastSquares { a, .. } | Self::General { a, .. } => a.cols(),
        }
    }

    fn check(&self, x: &DenseVector) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(FwError::Dimension {
                expected: self.dim(),
                got: x.len(),
            })
        }
    }

    pub fn value(&self, x: &DenseVector) -> f64 {
        assert_eq!(x.len(), self.dim(), "objective: dimension");
        match self {
            Self::LeastSquares { a, b } => {
                let mut r = a.mul_vec(x.as_slice());
                r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= bi);
                dot(&r, &r)
            }
            Self::General { a, b, constant } => {
                let ax = a.mul_vec(x.as_slice());
                0.5 * dot(&ax, x.as_slice()) + dot(b, x.as_slice()) + constant
            }
        }
    }

    pub fn gradient(&self, x: &DenseVector) -> DenseVector {
        self.value_and_gradient(x).1
    }

    pub fn value_and_gradient(&self, x: &DenseVector) -> (f64, DenseVector) {
        assert_eq!(x.len(), self.dim(), "objective: dimension");
        match self {
            Self::LeastSquares { a, b } => {
                let mut r = a.mul_vec(x.as_slice());
                r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= bi);
                let mut g = a.mul_t_vec(&r);
                g.iter_mut().for_each(|gi| *gi *= 2.0);
                (dot(&r, &r), DenseVector::from_vec(g))
            }
            Self::General { a, b, constant } => {
                let ax = a.mul_vec(x.as_slice());
                let value = 0.5 * dot(&ax, x.as_slice()) + dot(b, x.as_slice()) + constant;
                let g = ax.iter().zip(b).map(|(v, bi)| v + bi).collect();
                (value, DenseVector::from_vec(g))
            }
        }
    }

    /// Second-order term `f(x + p) − f(x) − ⟨∇f(x), p⟩`, independent of `x`.
    pub fn quadratic_term(&self, p: &DenseVector) -> f64 {
        match self {
            Self::LeastSquares { a, .. } => {
                let ap = a.mul_vec(p.as_slice());
                dot(&ap, &ap)
            }
            Self::General { a, .. } => {
                let ap = a.mul_vec(p.as_slice());
                0.5 * dot(&ap, p.as_slice())
            }
        }
    }

    /// Work units for one product with a vector of `nnz` nonzeros.
    pub fn matvec_cost(&self, nnz: usize) -> u64 {
        match self {
            Self::LeastSquares { a, .. } | Self::General { a, .. } => (a.rows() * nnz) as u64,
        }
    }

    /// Work units for a gradient evaluation at a point with `nnz` nonzeros.
    pub fn gradient_cost(&self, nnz: usize) -> u64 {
        match self {
            Self::LeastSquares { a, .. } => (a.rows() * (nnz + a.cols())) as u64,
            Self::General { a, .. } => (a.rows() * nnz + a.cols()) as u64,
        }
    }

    /// Exact minimization of `f` over `[x, u]` given `g = ∇f(x)`.
    pub fn segment_search(&self, x: &DenseVector, g: &DenseVector, u: &DenseVector) -> SegmentSearch {
        let p = u.sub(x);
        let slope = g.dot(&p);
        let q = self.quadratic_term(&p);
        let gamma = segment_gamma(slope, q);
        let y = if gamma == 0.0 {
            x.clone()
        } else if gamma == 1.0 {
            u.clone()
        } else {
            x.add_scaled(gamma, &p)
        };
        let delta_f = (-(gamma * slope + gamma * gamma * q)).max(0.0);
        SegmentSearch { gamma, y, delta_f }
    }

    /// `(ξ*, f(x) − f(x + ξ*d))` for the unconstrained minimizer over `ξ ≥ 0`.
    pub fn ray_search(&self, g: &DenseVector, d: &DenseVector) -> Result<(f64, f64)> {
        let slope = g.dot(d);
        if slope >= 0.0 || d.norm_sq() == 0.0 {
            return Ok((0.0, 0.0));
        }
        let q = self.quadratic_term(d);
        if q <= 0.0 {
            return Err(FwError::FlatDescent);
        }
        let xi = -slope / (2.0 * q);
        Ok((xi, slope * slope / (4.0 * q)))
    }
}

fn segment_gamma(slope: f64, q: f64) -> f64 {
    if slope >= 0.0 {
        return 0.0;
    }
    if q <= 0.0 {
        return 1.0;
    }
    (-slope / (2.0 * q)).clamp(0.0, 1.0)
}

/// Exact line search on the segment between `x` and `u`: returns the step
/// `γ ∈ [0,1]` and `y = x + γ(u − x)`. A zero-length segment returns `(0, x)`.
pub fn line_search_segment(obj: &QuadraticObjective, x: &DenseVector, u: &DenseVector) -> Result<(f64, DenseVector)> {
    obj.check(x)?;
    obj.check(u)?;
    if x == u {
        return Ok((0.0, x.clone()));
    }
    let g = obj.gradient(x);
    let s = obj.segment_search(x, &g, u);
    Ok((s.gamma, s.y))
}

/// Exact line search along the ray `x + ξd`, `ξ ≥ 0`.
pub fn line_search_ray(obj: &QuadraticObjective, x: &DenseVector, d: &DenseVector) -> Result<(f64, f64)> {
    obj.check(x)?;
    obj.check(d)?;
    let g = obj.gradient(x);
    obj.ray_search(&g, d)
}
