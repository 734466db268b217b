//! Small dense matrices and a cyclic Jacobi eigensolver for the symmetric
//! case. Sizes here are at most a few dozen rows, so clarity wins over
//! blocking or SIMD.

use std::ops::{Index, IndexMut};

use crate::error::ControlError;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)] * v[j])
            })
            .collect()
    }

    /// Largest |a_ij − a_ji|.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Upper bound on the spectral radius: max absolute row sum.
    pub fn gershgorin_bound(&self) -> T {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |a, j| a + self[(i, j)].abs()))
            .fold(T::zero(), T::max)
    }

    fn off_diagonal_norm(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    s += self[(i, j)] * self[(i, j)];
                }
            }
        }
        s.sqrt()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// Cyclic Jacobi: sweep over every off-diagonal pair and rotate it to zero
/// until the off-diagonal Frobenius norm drops below `tol` (relative to the
/// matrix norm when that is larger than one).
pub fn symmetric_eigenvalues<T: Scalar>(m: &Matrix<T>, tol: T) -> Result<Vec<T>, ControlError> {
    let n = m.rows();
    if n != m.cols() {
        return Err(ControlError::NotSymmetric);
    }
    let scale = m.gershgorin_bound().max(T::one());
    if m.asymmetry() > T::lit(1e-9) * scale {
        return Err(ControlError::NotSymmetric);
    }
    let mut a = m.clone();
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        if a.off_diagonal_norm() <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(ev)
}
