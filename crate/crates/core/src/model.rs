//! Dephasing compass chain with a linear field gradient:
//!
//! H = −Jx Σ σˣ_{2l−1}σˣ_{2l} − Jy Σ σʸ_{2l}σʸ_{2l+1} + Σ B(l−1)σᶻ_l + Jz Σ σᶻ_lσᶻ_{l+1},
//! L_l = √γ σᶻ_l, open boundaries. Sites are 1-based in formulas and 0-based in code.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseOperator};
use crate::pauli::{terms_to_sparse, Pauli, PauliTerm, MAX_SPARSE_SITES};
use crate::scalar::{cone, czero, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub n_spins: usize,
    pub jx: T,
    pub jy: T,
    pub jz: T,
    /// Field gradient B; site l (1-based) feels B(l−1).
    pub b: T,
    pub gamma: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(n_spins: usize, jx: T, jy: T, jz: T, b: T, gamma: T) -> Result<Self> {
        let p = Self { n_spins, jx, jy, jz, b, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins == 0 || !self.n_spins.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "n_spins must be a positive even integer, got {}",
                self.n_spins
            )));
        }
        for (name, v) in [("jx", self.jx), ("jy", self.jy), ("jz", self.jz), ("b", self.b), ("gamma", self.gamma)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        if self.gamma < T::zero() {
            return Err(Error::InvalidParameter("gamma must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_spins
    }
}

/// Pauli decomposition of H on `n_spins` sites.
pub fn hamiltonian_terms<T: Real>(p: &ModelParams<T>) -> Result<Vec<PauliTerm<T>>> {
    p.validate()?;
    let n = p.n_spins;
    let re = |x: T| Complex::new(x, T::zero());
    let mut terms = Vec::new();
    for k in 0..n / 2 {
        if p.jx != T::zero() {
            terms.push(PauliTerm::new(re(-p.jx), [(2 * k, Pauli::X), (2 * k + 1, Pauli::X)])?);
        }
    }
    for k in 0..(n / 2).saturating_sub(1) {
        if p.jy != T::zero() {
            terms.push(PauliTerm::new(re(-p.jy), [(2 * k + 1, Pauli::Y), (2 * k + 2, Pauli::Y)])?);
        }
    }
    for s in 1..n {
        if p.b != T::zero() {
            terms.push(PauliTerm::new(re(p.b * T::from_usize_lossy(s)), [(s, Pauli::Z)])?);
        }
    }
    for s in 0..n - 1 {
        if p.jz != T::zero() {
            terms.push(PauliTerm::new(re(p.jz), [(s, Pauli::Z), (s + 1, Pauli::Z)])?);
        }
    }
    Ok(terms)
}

pub fn build_hamiltonian<T: Real>(p: &ModelParams<T>) -> Result<SparseOperator<T>> {
    let terms = hamiltonian_terms(p)?;
    terms_to_sparse(p.n_spins, &terms, czero())
}

/// Q = Π σᶻ_l.
pub fn parity_operator<T: Real>(n: usize) -> Result<SparseOperator<T>> {
    if n == 0 || n > MAX_SPARSE_SITES {
        return Err(Error::InvalidParameter(format!("parity operator needs 1 <= N <= {MAX_SPARSE_SITES}")));
    }
    let d: Vec<Complex<T>> =
        (0..1usize << n).map(|b| if b.count_ones() % 2 == 0 { cone() } else { -cone::<T>() }).collect();
    Ok(SparseOperator::from_diagonal(&d))
}

/// 𝓛[ρ] = −i[H, ρ] + γ Σ_l (σᶻ_l ρ σᶻ_l − ρ).
///
/// The dephasing part is diagonal in the product basis: element (i, j) picks
/// up −2γ for every site where the bits of i and j differ.
#[derive(Clone, Debug)]
pub struct Liouvillian<T> {
    n_spins: usize,
    h: SparseOperator<T>,
    gamma: T,
}

impl<T: Real> Liouvillian<T> {
    pub fn new(n_spins: usize, h: SparseOperator<T>, gamma: T) -> Result<Self> {
        if h.dim() != 1usize << n_spins {
            return Err(Error::DimensionMismatch {
                context: "Liouvillian Hamiltonian",
                expected: 1 << n_spins,
                found: h.dim(),
            });
        }
        Ok(Self { n_spins, h, gamma })
    }

    pub fn from_params(p: &ModelParams<T>) -> Result<Self> {
        Self::new(p.n_spins, build_hamiltonian(p)?, p.gamma)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn hamiltonian(&self) -> &SparseOperator<T> {
        &self.h
    }

    pub fn apply(&self, rho: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let d = self.h.dim();
        if rho.rows() != d || rho.cols() != d {
            return Err(Error::DimensionMismatch { context: "density matrix", expected: d, found: rho.rows() });
        }
        let mut out = DenseMatrix::zeros(d, d);
        self.apply_into(rho.data(), out.data_mut());
        Ok(out)
    }

    /// Raw row-major version of [`apply`](Self::apply) used by the RK4 loop.
    pub(crate) fn apply_into(&self, rho: &[Complex<T>], out: &mut [Complex<T>]) {
        let d = self.h.dim();
        let mi = Complex::new(T::zero(), -T::one());
        let g2 = self.gamma + self.gamma;
        // H ρ
        for i in 0..d {
            let (cols, vals) = self.h.row(i);
            let orow = &mut out[i * d..(i + 1) * d];
            orow.iter_mut().for_each(|z| *z = czero());
            for (&k, &hv) in cols.iter().zip(vals) {
                let k = k as usize;
                for (o, r) in orow.iter_mut().zip(&rho[k * d..(k + 1) * d]) {
                    *o = *o + hv * r;
                }
            }
        }
        // − ρ H, with (ρH)_{ij} = Σ_k ρ_{ik} H_{kj}
        for k in 0..d {
            let (cols, vals) = self.h.row(k);
            for i in 0..d {
                let r = rho[i * d + k];
                if r.re == T::zero() && r.im == T::zero() {
                    continue;
                }
                for (&j, &hv) in cols.iter().zip(vals) {
                    let j = j as usize;
                    out[i * d + j] = out[i * d + j] - r * hv;
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                let flips = T::from_u32((i ^ j).count_ones()).expect("small integer");
                out[i * d + j] = out[i * d + j] * mi - rho[i * d + j].scale(g2 * flips);
            }
        }
    }
}

pub fn apply_liouvillian<T: Real>(p: &ModelParams<T>, rho: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    Liouvillian::from_params(p)?.apply(rho)
}
