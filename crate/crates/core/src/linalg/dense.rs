use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{abs2, cone, czero, is_finite_c, Real};

use super::StateVector;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "dense matrix data",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if !data.iter().all(|z| is_finite_c(*z)) {
            return Err(Error::NonFinite("dense matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_diagonal(d: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, z) in d.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| is_finite_c(*z))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "matrix add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "matrix sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        context: &'static str,
        f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { context: "matmul", expected: self.cols, found: other.rows });
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![czero::<T>(); n * m];
        for i in 0..n {
            let orow = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let brow = &other.data[p * m..(p + 1) * m];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(Self { rows: n, cols: m, data: out })
    }

    pub fn matvec(&self, v: &StateVector<T>) -> Result<StateVector<T>> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch { context: "dense matvec", expected: self.cols, found: v.dim() });
        }
        let x = v.amplitudes();
        let out =
            (0..self.rows).map(|i| self.row(i).iter().zip(x).fold(czero::<T>(), |acc, (a, b)| acc + a * b)).collect();
        Ok(StateVector::from_vec_unchecked(out))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)])
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| abs2(*z)).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    /// Largest singular value by power iteration on `A†A`; used for bound checks.
    pub fn spectral_norm_estimate(&self, iters: usize) -> T {
        let n = self.cols;
        if n == 0 {
            return T::zero();
        }
        let mut v: Vec<Complex<T>> =
            (0..n).map(|k| Complex::new(T::one() + T::lit(0.01) * T::from_usize_lossy(k % 7), T::zero())).collect();
        let adj = self.adjoint();
        let mut sigma = T::zero();
        for _ in 0..iters {
            let nv = super::state::norm(&v);
            if nv == T::zero() {
                return T::zero();
            }
            v.iter_mut().for_each(|z| *z = z.unscale(nv));
            let w = self.matvec(&StateVector::from_vec_unchecked(v.clone())).expect("square");
            sigma = w.norm();
            v = adj.matvec(&w).expect("square").into_vec();
        }
        sigma
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}
