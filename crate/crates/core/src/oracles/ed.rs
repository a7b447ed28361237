use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{eig_nonsymmetric, EigOptions, EigenDecomposition};
use crate::model::ModelParams;
use crate::observables::{rate_from_poles, RelaxationRate, TimeSeries};
use crate::scalar::{czero, Real};
use crate::vectorize::{build_transformed_liouvillian, correlator_vectors, VectorizationBasis};

pub const MAX_ED_SPINS: usize = 5;

/// Eigen-decomposition of 𝓛̃ with the correlator weights
/// w_n = ⟨ψ_L|R_n⟩⟨L_n|ψ_R⟩, so C(t) = Σ_n w_n e^{ω_n t}.
#[derive(Clone, Debug)]
pub struct EdSpectrum<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub weights: Vec<Complex<T>>,
    pub decomposition: EigenDecomposition<T>,
}

pub fn ed_spectrum<T: Real>(p: &ModelParams<T>, opts: EigOptions) -> Result<EdSpectrum<T>> {
    p.validate()?;
    let dim = 1usize << (2 * p.n_spins);
    if p.n_spins > MAX_ED_SPINS || dim > opts.dense_limit {
        return Err(Error::SizeLimit { dim, limit: opts.dense_limit.min(1 << (2 * MAX_ED_SPINS)) });
    }
    let basis = VectorizationBasis::Permuted;
    let lt = build_transformed_liouvillian(p, basis)?;
    let dense = lt.to_sparse()?.to_dense();
    let decomposition = eig_nonsymmetric(&dense, opts)?;
    let (l, r) = correlator_vectors::<T>(p.n_spins, basis)?;
    let weights = decomposition.weights(&l, &r)?;
    Ok(EdSpectrum { eigenvalues: decomposition.eigenvalues.clone(), weights, decomposition })
}

impl<T: Real> EdSpectrum<T> {
    pub fn correlator(&self, times: &[T]) -> Result<TimeSeries<T>> {
        let values = times
            .iter()
            .map(|&t| {
                self.eigenvalues.iter().zip(&self.weights).fold(czero::<T>(), |s, (w, c)| s + (w.scale(t)).exp() * c)
            })
            .collect();
        TimeSeries::new(times.to_vec(), values, "ed")
    }

    /// ⟨ψ_L|(ω − 𝓛̃)⁻¹|ψ_R⟩.
    pub fn resolvent(&self, omega: Complex<T>) -> Complex<T> {
        self.eigenvalues.iter().zip(&self.weights).fold(czero::<T>(), |s, (w, c)| s + c / (omega - w))
    }

    pub fn relaxation_rate(&self, threshold: T) -> Result<RelaxationRate<T>> {
        rate_from_poles(&self.eigenvalues, &self.weights, threshold, T::lit(1e-6))
    }
}

pub fn ed_autocorrelator<T: Real>(p: &ModelParams<T>, times: &[T]) -> Result<TimeSeries<T>> {
    ed_spectrum(p, EigOptions::default())?.correlator(times)
}
