//! Matrix product states and operators on the vectorised chain.

mod mpo;
mod mps;

pub use mpo::{mpo_from_terms, Mpo, MpoTensor, MAX_MPO_RANGE};
pub use mps::{Mps, SiteTensor, Truncation};

use num_complex::Complex;

use crate::error::Result;
use crate::scalar::{cone, Real};

/// Exact MPS of |ρ̃_s⟩ = Π_l (|↑↑⟩ + |↓↓⟩)/2 on the permuted chain of `2n` sites.
pub fn mps_from_terms_product<T: Real>(n_spins: usize) -> Result<Mps<T>> {
    let half = Complex::new(T::lit(0.5), T::zero());
    Mps::paired(&vec![half; n_spins], &vec![T::one(); n_spins])
}

/// `(ψ_L, ψ_R)` as bond-2 MPS on the permuted chain: both are ρ_s-like pair
/// products with the last pair dressed by σᶻ.
pub fn correlator_mps<T: Real>(n_spins: usize) -> Result<(Mps<T>, Mps<T>)> {
    let mut signs = vec![T::one(); n_spins];
    signs[n_spins - 1] = -T::one();
    let l = Mps::paired(&vec![cone(); n_spins], &signs)?;
    let half = Complex::new(T::lit(0.5), T::zero());
    let r = Mps::paired(&vec![half; n_spins], &signs)?;
    Ok((l, r))
}
