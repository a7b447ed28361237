//! Exact solvers used to validate the NHKPM pipeline.

mod damping;
mod ed;
mod rk4;

pub use damping::{damping_autocorrelator, DampingMatrix, DampingSpectrum, MajoranaQuadratic};
pub use ed::{ed_autocorrelator, ed_spectrum, EdSpectrum, MAX_ED_SPINS};
pub use rk4::{rk4_autocorrelator, Rk4Run, MAX_RK4_SPINS};
