//! Pauli words on a chain of spin-1/2 sites.
//!
//! Site 0 is the most significant bit of a basis index, and bit value 0 is
//! spin up (σᶻ = +1).

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::SparseOperator;
use crate::scalar::{ci, cone, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// 2×2 matrix, `m[out][in]`.
    pub fn matrix<T: Real>(self) -> [[Complex<T>; 2]; 2] {
        let (o, l, i) = (Complex::new(T::zero(), T::zero()), cone::<T>(), ci::<T>());
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `coeff · Π_k P_k(site_k)`; identities are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm<T> {
    pub coeff: Complex<T>,
    ops: Vec<(usize, Pauli)>,
}

impl<T: Real> PauliTerm<T> {
    pub fn new(coeff: Complex<T>, ops: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut ops: Vec<(usize, Pauli)> = ops.into_iter().filter(|(_, p)| *p != Pauli::I).collect();
        ops.sort_by_key(|(s, _)| *s);
        if ops.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter("Pauli word repeats a site".into()));
        }
        Ok(Self { coeff, ops })
    }

    pub fn identity(coeff: Complex<T>) -> Self {
        Self { coeff, ops: Vec::new() }
    }

    pub fn ops(&self) -> &[(usize, Pauli)] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn first_site(&self) -> Option<usize> {
        self.ops.first().map(|o| o.0)
    }

    pub fn last_site(&self) -> Option<usize> {
        self.ops.last().map(|o| o.0)
    }

    /// Largest site distance inside the word (0 for one-site and identity words).
    pub fn range(&self) -> usize {
        match (self.first_site(), self.last_site()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    pub fn op_at(&self, site: usize) -> Pauli {
        self.ops.iter().find(|o| o.0 == site).map_or(Pauli::I, |o| o.1)
    }

    pub fn with_coeff(&self, coeff: Complex<T>) -> Self {
        Self { coeff, ops: self.ops.clone() }
    }

    /// `(x_mask, z_mask, number of Y)` in the bit convention of this module.
    pub fn masks(&self, n_sites: usize) -> (u64, u64, u32) {
        let (mut x, mut z, mut ny) = (0u64, 0u64, 0u32);
        for &(s, p) in &self.ops {
            let bit = 1u64 << (n_sites - 1 - s);
            match p {
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
                Pauli::I => {}
            }
        }
        (x, z, ny)
    }
}

impl<T: Real> fmt::Display for PauliTerm<T> {
    /// `(re, im) X1 X3`, sites printed 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+.12e}, {:+.12e})", self.coeff.re, self.coeff.im)?;
        if self.ops.is_empty() {
            write!(f, " I")?;
        }
        for &(s, p) in &self.ops {
            write!(f, " {}{}", p.label(), s + 1)?;
        }
        Ok(())
    }
}

/// `i^k` for k mod 4.
pub(crate) fn i_pow<T: Real>(k: u32) -> Complex<T> {
    match k % 4 {
        0 => cone(),
        1 => ci(),
        2 => -cone::<T>(),
        _ => -ci::<T>(),
    }
}

pub const MAX_SPARSE_SITES: usize = 26;

/// Assembles `shift·I + Σ terms` on `n_sites` sites.
pub fn terms_to_sparse<T: Real>(
    n_sites: usize,
    terms: &[PauliTerm<T>],
    shift: Complex<T>,
) -> Result<SparseOperator<T>> {
    if n_sites > MAX_SPARSE_SITES {
        return Err(Error::SizeLimit { dim: n_sites, limit: MAX_SPARSE_SITES });
    }
    for t in terms {
        if t.last_site().is_some_and(|s| s >= n_sites) {
            return Err(Error::DimensionMismatch {
                context: "Pauli term site",
                expected: n_sites,
                found: t.last_site().unwrap_or(0),
            });
        }
    }
    let dim = 1usize << n_sites;
    let words: Vec<(u64, u64, Complex<T>)> = terms
        .iter()
        .map(|t| {
            let (x, z, ny) = t.masks(n_sites);
            (x, z, t.coeff * i_pow::<T>(ny))
        })
        .collect();
    let mut trip = Vec::with_capacity(dim * (words.len() + 1));
    for b in 0..dim as u64 {
        trip.push((b as usize, b as usize, shift));
        for &(x, z, c) in &words {
            let sign = if (b & z).count_ones() % 2 == 0 { c } else { -c };
            trip.push(((b ^ x) as usize, b as usize, sign));
        }
    }
    SparseOperator::from_triplets(dim, trip)
}
