//! Complex dense and sparse primitives used by every other layer.

mod dense;
mod eig;
mod lu;
mod qr;
mod sparse;
mod state;
mod svd;

pub use dense::DenseMatrix;
pub use eig::{eig_nonsymmetric, eigenvalues, EigOptions, EigenDecomposition};
pub use lu::{inverse, Lu};
pub use qr::{thin_qr, ThinQr};
pub use sparse::SparseOperator;
pub use state::StateVector;
pub use svd::{svd, Svd};

pub const DEFAULT_DENSE_LIMIT: usize = 4096;
