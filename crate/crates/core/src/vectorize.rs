//! Density matrices as vectors on a doubled chain of 2N sites.
//!
//! `Permuted` interleaves ket and bra spins (ket of spin s at chain site 2s,
//! bra at 2s+1), so 𝓛̃ couples sites at most two apart. `Naive` stacks all
//! ket spins before all bra spins, i.e. index = i·2^N + j for element ρ_ij.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseOperator, StateVector};
use crate::model::{hamiltonian_terms, ModelParams};
use crate::pauli::{terms_to_sparse, Pauli, PauliTerm};
use crate::scalar::{czero, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VectorizationBasis {
    Permuted,
    Naive,
}

impl VectorizationBasis {
    /// Chain position of the ket copy of spin `s` (0-based) in an `n`-spin model.
    pub fn ket_site(self, s: usize, _n: usize) -> usize {
        match self {
            Self::Permuted => 2 * s,
            Self::Naive => s,
        }
    }

    pub fn bra_site(self, s: usize, n: usize) -> usize {
        match self {
            Self::Permuted => 2 * s + 1,
            Self::Naive => n + s,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Permuted => "permuted",
            Self::Naive => "naive",
        }
    }

    /// Chain index of element ρ_ij.
    pub fn index(self, i: usize, j: usize, n: usize) -> usize {
        match self {
            Self::Naive => (i << n) | j,
            Self::Permuted => {
                let mut idx = 0usize;
                for s in 0..n {
                    let bi = (i >> (n - 1 - s)) & 1;
                    let bj = (j >> (n - 1 - s)) & 1;
                    idx = (idx << 2) | (bi << 1) | bj;
                }
                idx
            }
        }
    }
}

fn spins_of_dim(d: usize) -> Result<usize> {
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("dimension {d} is not a power of two")));
    }
    Ok(d.trailing_zeros() as usize)
}

pub fn vectorize<T: Real>(rho: &DenseMatrix<T>, basis: VectorizationBasis) -> Result<StateVector<T>> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch { context: "vectorize", expected: rho.rows(), found: rho.cols() });
    }
    let d = rho.rows();
    let n = spins_of_dim(d)?;
    let mut v = vec![czero(); d * d];
    for i in 0..d {
        for j in 0..d {
            v[basis.index(i, j, n)] = rho[(i, j)];
        }
    }
    StateVector::new(v)
}

pub fn unvectorize<T: Real>(v: &StateVector<T>, basis: VectorizationBasis) -> Result<DenseMatrix<T>> {
    let n2 = spins_of_dim(v.dim())?;
    if n2 % 2 != 0 {
        return Err(Error::InvalidParameter("vector does not live on a doubled chain".into()));
    }
    let n = n2 / 2;
    let d = 1usize << n;
    let a = v.amplitudes();
    Ok(DenseMatrix::from_fn(d, d, |i, j| a[basis.index(i, j, n)]))
}

/// 𝓛̃ as `shift·I + Σ terms` on the 2N-site chain.
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvillianTerms<T> {
    pub n_spins: usize,
    pub basis: VectorizationBasis,
    pub terms: Vec<PauliTerm<T>>,
    pub shift: Complex<T>,
}

impl<T: Real> LiouvillianTerms<T> {
    pub fn n_sites(&self) -> usize {
        2 * self.n_spins
    }

    pub fn to_sparse(&self) -> Result<SparseOperator<T>> {
        terms_to_sparse(self.n_sites(), &self.terms, self.shift)
    }

    /// Pauli words are Hermitian, so the adjoint only conjugates coefficients.
    pub fn adjoint(&self) -> Self {
        Self {
            n_spins: self.n_spins,
            basis: self.basis,
            terms: self.terms.iter().map(|t| t.with_coeff(t.coeff.conj())).collect(),
            shift: self.shift.conj(),
        }
    }

    /// `alpha·𝓛̃ + beta·I`.
    pub fn affine(&self, alpha: Complex<T>, beta: Complex<T>) -> Self {
        Self {
            n_spins: self.n_spins,
            basis: self.basis,
            terms: self.terms.iter().map(|t| t.with_coeff(t.coeff * alpha)).collect(),
            shift: self.shift * alpha + beta,
        }
    }

    pub fn max_coupling_range(&self) -> usize {
        max_coupling_range(&self.terms)
    }

    /// Σ|c| over words plus |shift|: a bound on the operator norm.
    pub fn coefficient_norm_sum(&self) -> T {
        self.terms.iter().map(|t| t.coeff.norm()).sum::<T>() + self.shift.norm()
    }

    /// Σ|c| over words: a bound on ‖𝓛̃ − shift‖.
    pub fn centered_norm_bound(&self) -> T {
        self.terms.iter().map(|t| t.coeff.norm()).sum::<T>()
    }

    /// One term per line, coefficient first, identity shift last.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} basis, {} sites, {} terms", self.basis.name(), self.n_sites(), self.terms.len());
        for t in &self.terms {
            let _ = writeln!(s, "{t}");
        }
        let _ = writeln!(s, "{}", PauliTerm::identity(self.shift));
        s
    }
}

pub fn max_coupling_range<T: Real>(terms: &[PauliTerm<T>]) -> usize {
    terms.iter().map(|t| t.range()).max().unwrap_or(0)
}

/// 𝓛̃ = −i H_ket + i (Hᵀ)_bra + γ Σ σᶻ_ket σᶻ_bra − γN.
///
/// Each Hamiltonian word appears twice; transposition flips the sign of a
/// word once per σʸ it contains.
pub fn build_transformed_liouvillian<T: Real>(
    p: &ModelParams<T>,
    basis: VectorizationBasis,
) -> Result<LiouvillianTerms<T>> {
    let n = p.n_spins;
    let h = hamiltonian_terms(p)?;
    let mi = Complex::new(T::zero(), -T::one());
    let mut terms = Vec::with_capacity(2 * h.len() + n);
    for t in &h {
        terms.push(PauliTerm::new(t.coeff * mi, t.ops().iter().map(|&(s, q)| (basis.ket_site(s, n), q)))?);
    }
    for t in &h {
        let ny = t.ops().iter().filter(|o| o.1 == Pauli::Y).count();
        let sign = if ny % 2 == 0 { T::one() } else { -T::one() };
        terms.push(PauliTerm::new(
            -(t.coeff * mi).scale(sign),
            t.ops().iter().map(|&(s, q)| (basis.bra_site(s, n), q)),
        )?);
    }
    if p.gamma != T::zero() {
        for s in 0..n {
            terms.push(PauliTerm::new(
                Complex::new(p.gamma, T::zero()),
                [(basis.ket_site(s, n), Pauli::Z), (basis.bra_site(s, n), Pauli::Z)],
            )?);
        }
    }
    let shift = Complex::new(-p.gamma * T::from_usize_lossy(n), T::zero());
    Ok(LiouvillianTerms { n_spins: n, basis, terms, shift })
}

/// |ρ̃_s⟩ for ρ_s = I/2^N.
pub fn steady_state_vector<T: Real>(n: usize, basis: VectorizationBasis) -> Result<StateVector<T>> {
    let d = 1usize << n;
    let w = T::one() / T::from_usize_lossy(d);
    let mut v = vec![czero(); d * d];
    for i in 0..d {
        v[basis.index(i, i, n)] = Complex::new(w, T::zero());
    }
    StateVector::new(v)
}

/// `(ψ_L, ψ_R) = (vec σᶻ_N, vec σᶻ_N ρ_s)`, so C(t) = ⟨ψ_L| e^{t𝓛̃} |ψ_R⟩ and C(0) = 1.
pub fn correlator_vectors<T: Real>(n: usize, basis: VectorizationBasis) -> Result<(StateVector<T>, StateVector<T>)> {
    let d = 1usize << n;
    let w = T::one() / T::from_usize_lossy(d);
    let mut l = vec![czero(); d * d];
    let mut r = vec![czero(); d * d];
    for i in 0..d {
        let z = if i & 1 == 0 { T::one() } else { -T::one() };
        let k = basis.index(i, i, n);
        l[k] = Complex::new(z, T::zero());
        r[k] = Complex::new(z * w, T::zero());
    }
    Ok((StateVector::new(l)?, StateVector::new(r)?))
}
