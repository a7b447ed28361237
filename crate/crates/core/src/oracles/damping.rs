//! Free-fermion solver for the quadratic (Jz = 0) model.
//!
//! After Jordan–Wigner with Majoranas γ⁻_l, γ⁺_l (indices l⁻ = l, l⁺ = N + l,
//! 0-based) the Hamiltonian is H = (i/4) γᵀ h γ with
//! h = [[T, M], [−M, 0]], T_{l,l+1} = 2Jx (l even) or −2Jy (l odd), T antisymmetric,
//! M = diag(2B·l). Each dephasing channel is quadratic, √γ σᶻ_l ∝ (i/4)γᵀ l_l γ with
//! (l_l)_{l⁻,l⁺} = 2√γ. Operators O = (i/4)γᵀ o γ stay quadratic under the adjoint
//! Lindblad flow, which closes on the coefficient matrix:
//! ȯ = h o − o h − Σ_l l_l o l_l − 4γ o, i.e. d vec(o)/dt = X vec(o) with
//! X = h⊗1 − 1⊗hᵀ − Σ l_l⊗l_lᵀ − 4γ 1⊗1 on row-major vec(o).
//!
//! These h and l_l follow the matrices displayed for the damping matrix; they
//! correspond to the textual Majorana definitions with γ⁻ on even sites
//! sign-flipped, which leaves the spectrum and C(t) unchanged.
//!
//! For C(t) = tr(σᶻ_N e^{t𝓛}[σᶻ_N ρ_s]) the observable σᶻ_N has coefficient
//! matrix s with s_{N⁻,N⁺} = 2 = −s_{N⁺,N⁻}, and tr(AB)/2^N = Σ a_ij b_ij / 8
//! for quadratic A, B, so C(t) = Σ s_ij o_ij(t) / 8 with o(0) = s.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{eig_nonsymmetric, DenseMatrix, EigOptions, EigenDecomposition};
use crate::model::ModelParams;
use crate::observables::{rate_from_poles, RelaxationRate, TimeSeries};
use crate::scalar::{czero, Real};

/// Hermitian quadratic form (i/4) γᵀ o γ with antisymmetric o.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaQuadratic<T> {
    pub o: DenseMatrix<T>,
}

impl<T: Real> MajoranaQuadratic<T> {
    pub fn new(o: DenseMatrix<T>) -> Result<Self> {
        if !o.is_square() || !o.rows().is_multiple_of(2) {
            return Err(Error::InvalidParameter("coefficient matrix must be 2N × 2N".into()));
        }
        let asym = o.add(&o.transpose())?.max_abs();
        if asym > T::lit(1e-12) * o.max_abs().max(T::one()) {
            return Err(Error::InvalidParameter(format!("coefficient matrix is not antisymmetric ({asym:.2e})")));
        }
        Ok(Self { o })
    }

    /// Coefficients of σᶻ on spin `site` (0-based) of an `n`-spin chain.
    pub fn sigma_z(site: usize, n: usize) -> Self {
        let mut o = DenseMatrix::zeros(2 * n, 2 * n);
        o[(site, n + site)] = Complex::new(T::lit(2.0), T::zero());
        o[(n + site, site)] = Complex::new(T::lit(-2.0), T::zero());
        Self { o }
    }

    /// tr(A B) / 2^N = Σ a_ij b_ij / 8.
    pub fn normalized_trace_product(&self, other: &Self) -> Complex<T> {
        self.o.data().iter().zip(other.o.data()).fold(czero::<T>(), |s, (a, b)| s + a * b).unscale(T::lit(8.0))
    }
}

#[derive(Clone, Debug)]
pub struct DampingSpectrum<T> {
    pub eigenvalues: Vec<Complex<T>>,
    /// w_n = ⟨s|R_n⟩⟨L_n|s⟩ / 8, so C(t) = Σ w_n e^{λ_n t}.
    pub weights: Vec<Complex<T>>,
    /// |⟨L_n|õ(0)⟩| with unit-norm right vectors (the plotted dot size).
    pub overlap_magnitudes: Vec<T>,
}

impl<T: Real> DampingSpectrum<T> {
    pub fn relaxation_rate(&self, threshold: T) -> Result<RelaxationRate<T>> {
        rate_from_poles(&self.eigenvalues, &self.weights, threshold, T::lit(1e-6))
    }

    pub fn correlator(&self, times: &[T]) -> Result<TimeSeries<T>> {
        let values = times
            .iter()
            .map(|&t| {
                self.eigenvalues.iter().zip(&self.weights).fold(czero::<T>(), |s, (l, w)| s + (l.scale(t)).exp() * w)
            })
            .collect();
        TimeSeries::new(times.to_vec(), values, "damping")
    }
}

#[derive(Clone, Debug)]
pub struct DampingMatrix<T> {
    pub n: usize,
    pub majorana_h: DenseMatrix<T>,
    /// √γ-scaled channel matrices l_l, one per spin.
    pub dissipators: Vec<DenseMatrix<T>>,
    gamma: T,
    /// Decomposition of X restricted to antisymmetric o (dimension N(2N−1)).
    pub eigen: EigenDecomposition<T>,
}

impl<T: Real> DampingMatrix<T> {
    pub fn new(p: &ModelParams<T>) -> Result<Self> {
        p.validate()?;
        if p.jz != T::zero() {
            return Err(Error::Unsupported(
                "the damping matrix needs Jz = 0: only then the model is quadratic in Majoranas \
                 and the evolution of two-point correlators decouples"
                    .into(),
            ));
        }
        let n = p.n_spins;
        let re = |x: T| Complex::new(x, T::zero());
        let two = T::lit(2.0);
        let mut h = DenseMatrix::zeros(2 * n, 2 * n);
        for l in 0..n - 1 {
            let c = if l % 2 == 0 { two * p.jx } else { -two * p.jy };
            h[(l, l + 1)] = re(c);
            h[(l + 1, l)] = re(-c);
        }
        for l in 0..n {
            let m = two * p.b * T::from_usize_lossy(l);
            h[(l, n + l)] = re(m);
            h[(n + l, l)] = re(-m);
        }
        let sg = two * p.gamma.sqrt();
        let dissipators: Vec<DenseMatrix<T>> = (0..n)
            .map(|l| {
                let mut d = DenseMatrix::zeros(2 * n, 2 * n);
                d[(l, n + l)] = re(sg);
                d[(n + l, l)] = re(-sg);
                d
            })
            .collect();
        let xa = antisymmetric_block(n, &h, sg, p.gamma);
        let eigen = eig_nonsymmetric(&xa, EigOptions { dense_limit: usize::MAX })?;
        Ok(Self { n, majorana_h: h, dissipators, gamma: p.gamma, eigen })
    }

    /// The full 4N² × 4N² matrix X (row-major vec convention).
    pub fn x_matrix(&self) -> Result<DenseMatrix<T>> {
        let m = 2 * self.n;
        let dim = m * m;
        if dim > 8192 {
            return Err(Error::SizeLimit { dim, limit: 8192 });
        }
        let sg = T::lit(2.0) * self.gamma.sqrt();
        let h = &self.majorana_h;
        Ok(DenseMatrix::from_fn(dim, dim, |r, c| x_entry(self.n, h, sg, self.gamma, (r / m, r % m), (c / m, c % m))))
    }

    pub fn spectrum(&self) -> Result<DampingSpectrum<T>> {
        let s = MajoranaQuadratic::<T>::sigma_z(self.n - 1, self.n);
        let c0 = s.normalized_trace_product(&s);
        if (c0 - Complex::new(T::one(), T::zero())).norm() > T::lit(1e-12) {
            return Err(Error::NotConverged(format!("C(0) calibration gave {c0}, expected 1")));
        }
        let sv = antisymmetric_coords(&s.o);
        let dim = sv.len();
        let v = self.eigen.right_matrix();
        let w = self.eigen.left_matrix();
        let mut weights = Vec::with_capacity(dim);
        let mut mags = Vec::with_capacity(dim);
        let eighth = T::one() / T::lit(8.0);
        for k in 0..dim {
            let sr = (0..dim).fold(czero::<T>(), |acc, i| acc + sv[i] * v[(i, k)]);
            let ls = (0..dim).fold(czero::<T>(), |acc, i| acc + w[(k, i)] * sv[i]);
            weights.push((sr * ls).scale(eighth));
            mags.push(ls.norm());
        }
        Ok(DampingSpectrum { eigenvalues: self.eigen.eigenvalues.clone(), weights, overlap_magnitudes: mags })
    }
}

/// X[(a,b),(c,d)] of the full damping matrix.
fn x_entry<T: Real>(
    n: usize,
    h: &DenseMatrix<T>,
    sg: T,
    gamma: T,
    (a, b): (usize, usize),
    (c, d): (usize, usize),
) -> Complex<T> {
    let mut v = czero::<T>();
    if b == d {
        v = v + h[(a, c)];
    }
    if a == c {
        v = v - h[(d, b)];
        if b == d {
            v = v - Complex::new(T::lit(4.0) * gamma, T::zero());
        }
    }
    v - diss_term(n, a, b, c, d, sg)
}

/// (Σ_l l_l ⊗ l_lᵀ)[(a,b),(c,d)] = Σ_l (l_l)_{ac} (l_l)_{db}.
fn diss_term<T: Real>(n: usize, a: usize, b: usize, c: usize, d: usize, sg: T) -> Complex<T> {
    let entry = |l: usize, i: usize, j: usize| -> T {
        if i == l && j == n + l {
            sg
        } else if i == n + l && j == l {
            -sg
        } else {
            T::zero()
        }
    };
    let l1 = a % n;
    if a % n != c % n || d % n != b % n || l1 != b % n {
        return czero();
    }
    Complex::new(entry(l1, a, c) * entry(l1, d, b), T::zero())
}

/// Orthonormal coordinates of an antisymmetric matrix in the basis
/// e_ij = (E_ij − E_ji)/√2, i < j.
fn antisymmetric_coords<T: Real>(o: &DenseMatrix<T>) -> Vec<Complex<T>> {
    let m = o.rows();
    let r2 = T::lit(2.0).sqrt();
    let mut v = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            v.push(o[(i, j)].scale(r2));
        }
    }
    v
}

/// X restricted to antisymmetric coefficient matrices, in the e_ij basis.
fn antisymmetric_block<T: Real>(n: usize, h: &DenseMatrix<T>, sg: T, gamma: T) -> DenseMatrix<T> {
    let m = 2 * n;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let x = |a, b, c, d| x_entry(n, h, sg, gamma, (a, b), (c, d));
    let half = T::lit(0.5);
    DenseMatrix::from_fn(pairs.len(), pairs.len(), |r, c| {
        let ((i, j), (k, l)) = (pairs[r], pairs[c]);
        (x(i, j, k, l) - x(i, j, l, k) - x(j, i, k, l) + x(j, i, l, k)).scale(half)
    })
}

pub fn damping_autocorrelator<T: Real>(p: &ModelParams<T>, times: &[T]) -> Result<(TimeSeries<T>, DampingSpectrum<T>)> {
    let dm = DampingMatrix::new(p)?;
    let spec = dm.spectrum()?;
    Ok((spec.correlator(times)?, spec))
}
