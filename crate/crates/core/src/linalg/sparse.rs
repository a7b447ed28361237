use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, is_finite_c, Real};

use super::{DenseMatrix, StateVector};

/// Square complex operator in compressed sparse row form.
///
/// Duplicate `(row, col)` entries are summed at construction and exact zeros
/// are dropped, so every stored entry is unique and nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SparseOperator<T> {
    pub fn from_triplets(dim: usize, entries: impl IntoIterator<Item = (usize, usize, Complex<T>)>) -> Result<Self> {
        if dim > u32::MAX as usize {
            return Err(Error::SizeLimit { dim, limit: u32::MAX as usize });
        }
        let mut trip: Vec<(usize, usize, Complex<T>)> = entries.into_iter().collect();
        for &(r, c, v) in &trip {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch { context: "sparse index", expected: dim, found: r.max(c) });
            }
            if !is_finite_c(v) {
                return Err(Error::NonFinite("sparse operator"));
            }
        }
        trip.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(trip.len());
        let mut values: Vec<Complex<T>> = Vec::with_capacity(trip.len());
        let mut k = 0;
        while k < trip.len() {
            let (r, c, mut v) = trip[k];
            k += 1;
            while k < trip.len() && trip[k].0 == r && trip[k].1 == c {
                v = v + trip[k].2;
                k += 1;
            }
            if v.re != T::zero() || v.im != T::zero() {
                col_idx.push(c as u32);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self { dim, row_ptr, col_idx, values })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![cone(); dim])
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, row_ptr: vec![0; dim + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn from_diagonal(d: &[Complex<T>]) -> Self {
        Self::from_triplets(d.len(), d.iter().enumerate().map(|(i, z)| (i, i, *z))).expect("diagonal entries in range")
    }

    pub fn from_dense(m: &DenseMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { context: "sparse from dense", expected: m.rows(), found: m.cols() });
        }
        let n = m.rows();
        Self::from_triplets(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (i, j, m[(i, j)])))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[Complex<T>]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => czero(),
        }
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, v: &StateVector<T>) -> Result<StateVector<T>> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch { context: "sparse matvec", expected: self.dim, found: v.dim() });
        }
        let mut out = vec![czero(); self.dim];
        self.apply_into(v.amplitudes(), &mut out);
        Ok(StateVector::from_vec_unchecked(out))
    }

    /// `y = A x` on raw slices; lengths must equal `dim`.
    #[inline]
    pub fn apply_into(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        assert!(x.len() == self.dim && y.len() == self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            *yi = self.col_idx[a..b].iter().zip(&self.values[a..b]).fold(czero::<T>(), |acc, (&c, v)| {
                // SAFETY: construction rejects column indices outside [0, dim) and x.len() == dim.
                acc + *v * unsafe { *x.get_unchecked(c as usize) }
            });
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                trip.push((self.col_idx[k] as usize, i, self.values[k].conj()));
            }
        }
        Self::from_triplets(self.dim, trip).expect("adjoint of valid operator")
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = *v * c);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { context: "sparse add", expected: self.dim, found: other.dim });
        }
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.col_idx[k] as usize, self.values[k]))
        })
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Sum of entry moduli; an upper bound on the infinity-norm of any row.
    pub fn max_row_abs_sum(&self) -> T {
        (0..self.dim).map(|i| self.row(i).1.iter().map(|z| z.norm()).sum::<T>()).fold(T::zero(), T::max)
    }

    /// Restriction to an invariant subspace spanned by the listed basis states.
    ///
    /// Fails if any stored entry couples a listed state to an unlisted one.
    pub fn restrict(&self, states: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.dim];
        for (k, &s) in states.iter().enumerate() {
            if s >= self.dim {
                return Err(Error::DimensionMismatch { context: "restrict", expected: self.dim, found: s });
            }
            pos[s] = k;
        }
        let mut trip = Vec::new();
        for (k, &s) in states.iter().enumerate() {
            let (cols, vals) = self.row(s);
            for (&c, &v) in cols.iter().zip(vals) {
                let c = c as usize;
                if pos[c] == usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "subspace is not invariant: state {s} couples to {c}"
                    )));
                }
                trip.push((k, pos[c], v));
            }
        }
        // Columns must also stay inside, otherwise A is not block diagonal.
        for i in 0..self.dim {
            if pos[i] != usize::MAX {
                continue;
            }
            let (cols, _) = self.row(i);
            if let Some(&c) = cols.iter().find(|&&c| pos[c as usize] != usize::MAX) {
                return Err(Error::InvalidParameter(format!("subspace is not invariant: state {i} couples to {c}")));
            }
        }
        Self::from_triplets(states.len(), trip)
    }
}
