//! Dense vectors and a column-major matrix.
//!
//! Column-major storage keeps `Aᵀr` a sequence of contiguous dot products and
//! lets `A·x` skip zero coordinates of `x`, which dominate iterates that live
//! on low-dimensional faces.

use std::ops::{Index, IndexMut};

/// A point, gradient or direction in `ℝⁿ`. The length never changes after
/// construction; binary operations assert matching lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn dot(&self, other: &DenseVector) -> f64 {
        assert_eq!(self.len(), other.len(), "dot: length mismatch");
        dot(&self.0, &other.0)
    }

    /// `self − other`.
    pub fn sub(&self, other: &DenseVector) -> DenseVector {
        assert_eq!(self.len(), other.len(), "sub: length mismatch");
        DenseVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self + t·dir`.
    pub fn add_scaled(&self, t: f64, dir: &DenseVector) -> DenseVector {
        let mut out = self.clone();
        out.axpy(t, dir);
        out
    }

    /// In-place `self += t·dir`.
    pub fn axpy(&mut self, t: f64, dir: &DenseVector) {
        assert_eq!(self.len(), dir.len(), "axpy: length mismatch");
        for (a, d) in self.0.iter_mut().zip(&dir.0) {
            *a += t * d;
        }
    }

    pub fn scale(&mut self, t: f64) {
        self.0.iter_mut().for_each(|a| *a *= t);
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn max_abs_diff(&self, other: &DenseVector) -> f64 {
        assert_eq!(self.len(), other.len(), "max_abs_diff: length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Indices of coordinates strictly above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i] > tol).collect()
    }

    pub fn count_zeros(&self, tol: f64) -> usize {
        self.0.iter().filter(|&&v| v <= tol).count()
    }

    /// Snap coordinates with `|v| ≤ tol` to exactly zero.
    pub fn snap_zeros(&mut self, tol: f64) {
        for v in &mut self.0 {
            if v.abs() <= tol {
                *v = 0.0;
            }
        }
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the compiler vectorize without fast-math
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Column-major `rows × cols` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ColMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ColMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    /// Build from row-major nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// `A·x`, skipping zero entries of `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "mul_vec: length mismatch");
        let mut out = vec![0.0; self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (o, a) in out.iter_mut().zip(self.col(j)) {
                    *o += a * xj;
                }
            }
        }
        out
    }

    /// `Aᵀ·r`.
    pub fn mul_t_vec(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.rows, "mul_t_vec: length mismatch");
        (0..self.cols).map(|j| dot(self.col(j), r)).collect()
    }
}
