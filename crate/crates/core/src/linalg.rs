//! Small dense matrices: just enough linear algebra for ellipsoids of a few dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{ReactError, Result};
use crate::scalar::Scalar;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(ReactError::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let dim = diag.len();
        let mut data = vec![T::zero(); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            data[i * dim + i] = d;
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.dim).map(<[T]>::to_vec).collect()
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// v' M v
    pub fn quad_form(&self, v: &[T]) -> T {
        crate::scalar::dot(v, &self.mul_vec(v))
    }

    /// Sub-matrix on the given row/column indices.
    pub fn select(&self, idx: &[usize]) -> Self {
        let dim = idx.len();
        let mut data = Vec::with_capacity(dim * dim);
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        Cholesky::new(self)
    }
}

/// Lower-triangular factor L with M = L L'.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    lower: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn new(m: &Matrix<T>) -> Result<Self> {
        let n = m.dim;
        let mut lower = Matrix {
            dim: n,
            data: vec![T::zero(); n * n],
        };
        for j in 0..n {
            let mut d = m.get(j, j);
            for k in 0..j {
                d = d - lower.get(j, k) * lower.get(j, k);
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(ReactError::NotPositiveDefinite);
            }
            let d = d.sqrt();
            lower.set(j, j, d);
            for i in (j + 1)..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s = s - lower.get(i, k) * lower.get(j, k);
                }
                lower.set(i, j, s / d);
            }
        }
        Ok(Self { lower })
    }

    /// Solves M x = b.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lower.dim;
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - l.get(i, k) * y[k];
            }
            y[i] = s / l.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - l.get(k, i) * y[k];
            }
            y[i] = s / l.get(i, i);
        }
        y
    }

    pub fn inverse(&self) -> Matrix<T> {
        let n = self.lower.dim;
        let mut out = Matrix {
            dim: n,
            data: vec![T::zero(); n * n],
        };
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            for (i, v) in col.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        // symmetrize away round-off
        for i in 0..n {
            for j in 0..i {
                let avg = (out.get(i, j) + out.get(j, i)) * T::lit(0.5);
                out.set(i, j, avg);
                out.set(j, i, avg);
            }
        }
        out
    }
}
