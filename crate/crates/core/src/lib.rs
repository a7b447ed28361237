//! Spectra and dynamics of dephasing Lindblad spin chains via the
//! non-Hermitian kernel polynomial method, with exact oracles for validation.

// `!(x > 0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the recurrences and tensor contractions they implement.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod nhkpm;
pub mod observables;
pub mod oracles;
pub mod pauli;
pub mod scalar;
pub mod tn;
pub mod vectorize;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C32 = num_complex::Complex<f32>;
pub type C64 = num_complex::Complex<f64>;
pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
pub type StateVector64 = linalg::StateVector<f64>;
pub type SparseOperator64 = linalg::SparseOperator<f64>;
pub type ModelParams64 = model::ModelParams<f64>;
pub type Mps64 = tn::Mps<f64>;
pub type SpectralMap64 = nhkpm::SpectralMap<f64>;
pub type TimeSeries64 = observables::TimeSeries<f64>;
