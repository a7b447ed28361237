use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

use super::DenseMatrix;

/// LU factorisation with partial pivoting, `P A = L U`.
pub struct Lu<T> {
    n: usize,
    lu: Vec<Complex<T>>,
    perm: Vec<usize>,
    /// Smallest pivot modulus relative to the largest; a cheap conditioning hint.
    pub pivot_ratio: T,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { context: "lu", expected: a.rows(), found: a.cols() });
        }
        let n = a.rows();
        let mut lu = a.data().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let (mut pmin, mut pmax) = (T::infinity(), T::zero());
        for k in 0..n {
            let (mut best, mut bval) = (k, T::zero());
            for i in k..n {
                let v = lu[i * n + k].norm();
                if v > bval {
                    best = i;
                    bval = v;
                }
            }
            if bval == T::zero() {
                return Err(Error::NotConverged(format!("singular matrix at column {k}")));
            }
            pmin = pmin.min(bval);
            pmax = pmax.max(bval);
            if best != k {
                for j in 0..n {
                    lu.swap(k * n + j, best * n + j);
                }
                perm.swap(k, best);
            }
            let piv = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / piv;
                lu[i * n + k] = f;
                if f.re == T::zero() && f.im == T::zero() {
                    continue;
                }
                let (head, tail) = lu.split_at_mut(i * n);
                let krow = &head[k * n + k + 1..k * n + n];
                let irow = &mut tail[k + 1..n];
                for (x, y) in irow.iter_mut().zip(krow) {
                    *x = *x - f * y;
                }
            }
        }
        let pivot_ratio = if n == 0 { T::one() } else { pmin / pmax };
        Ok(Self { n, lu, perm, pivot_ratio })
    }

    pub fn solve_in_place(&self, b: &mut [Complex<T>]) {
        let n = self.n;
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    pub fn inverse(&self) -> DenseMatrix<T> {
        let n = self.n;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut col = vec![czero::<T>(); n];
        for j in 0..n {
            col.iter_mut().for_each(|z| *z = czero());
            col[j] = cone();
            self.solve_in_place(&mut col);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

pub fn inverse<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    Ok(Lu::factor(a)?.inverse())
}
