use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{abs2, czero, is_finite_c, Real};

/// Amplitude vector on a finite Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("state vector of dimension 0".into()));
        }
        if !amps.iter().all(|z| is_finite_c(*z)) {
            return Err(Error::NonFinite("state vector"));
        }
        Ok(Self { amps })
    }

    pub(crate) fn from_vec_unchecked(amps: Vec<Complex<T>>) -> Self {
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { amps: vec![czero(); dim] }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.amps[k] = Complex::new(T::one(), T::zero());
        v
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.amps
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn dot(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { context: "dot", expected: self.dim(), found: other.dim() });
        }
        Ok(dotc(&self.amps, &other.amps))
    }

    pub fn norm(&self) -> T {
        norm(&self.amps)
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { amps: self.amps.iter().map(|z| z * c).collect() }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex<T>, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { context: "axpy", expected: self.dim(), found: other.dim() });
        }
        Ok(Self { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + c * b).collect() })
    }

    pub fn conj(&self) -> Self {
        Self { amps: self.amps.iter().map(|z| z.conj()).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }
}

#[inline]
pub(crate) fn dotc<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let mut acc = czero::<T>();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.conj() * y;
    }
    acc
}

#[inline]
pub(crate) fn norm<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| abs2(*z)).sum::<T>().sqrt()
}
