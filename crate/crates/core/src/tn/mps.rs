use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{svd, thin_qr, DenseMatrix, StateVector};
use crate::scalar::{abs2, cone, czero, Real};

use super::mpo::Mpo;

/// Rank-3 site tensor `A[l][p][r]` with physical dimension 2.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor<T> {
    pub dl: usize,
    pub dr: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> SiteTensor<T> {
    pub fn zeros(dl: usize, dr: usize) -> Self {
        Self { dl, dr, data: vec![czero(); dl * 2 * dr] }
    }

    #[inline]
    pub fn at(&self, l: usize, p: usize, r: usize) -> Complex<T> {
        self.data[(l * 2 + p) * self.dr + r]
    }

    #[inline]
    pub fn at_mut(&mut self, l: usize, p: usize, r: usize) -> &mut Complex<T> {
        &mut self.data[(l * 2 + p) * self.dr + r]
    }

    /// Rows (l, p), columns r.
    fn as_left_matrix(&self) -> DenseMatrix<T> {
        DenseMatrix::from_row_major(self.dl * 2, self.dr, self.data.clone()).expect("shape")
    }

    /// Rows l, columns (p, r).
    fn as_right_matrix(&self) -> DenseMatrix<T> {
        DenseMatrix::from_row_major(self.dl, 2 * self.dr, self.data.clone()).expect("shape")
    }

    fn frobenius2(&self) -> T {
        self.data.iter().map(|z| abs2(*z)).sum()
    }
}

/// Truncation settings for compression sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation<T> {
    pub max_bond: usize,
    /// Relative cutoff ε: discarded squared weight per bond ≤ ε² of the total.
    pub cutoff: T,
    /// Bond dimension above which an uncompressed intermediate is refused.
    pub budget: usize,
}

impl<T: Real> Truncation<T> {
    pub fn lossless() -> Self {
        Self { max_bond: usize::MAX, cutoff: T::zero(), budget: 1 << 14 }
    }
}

impl<T: Real> Default for Truncation<T> {
    fn default() -> Self {
        Self { max_bond: 128, cutoff: T::lit(1e-8), budget: 1 << 14 }
    }
}

/// Matrix product state on a chain of spin-1/2 sites, with the state equal to
/// `prefactor · Σ A¹…Aⁿ`. Site 0 is the most significant bit of the dense index.
#[derive(Clone, Debug, PartialEq)]
pub struct Mps<T> {
    tensors: Vec<SiteTensor<T>>,
    prefactor: Complex<T>,
    center: Option<usize>,
}

impl<T: Real> Mps<T> {
    pub fn from_tensors(tensors: Vec<SiteTensor<T>>, prefactor: Complex<T>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::InvalidParameter("MPS needs at least one site".into()));
        }
        if tensors[0].dl != 1 || tensors[tensors.len() - 1].dr != 1 {
            return Err(Error::InvalidParameter("MPS boundary bonds must have dimension 1".into()));
        }
        for w in tensors.windows(2) {
            if w[0].dr != w[1].dl {
                return Err(Error::DimensionMismatch { context: "MPS bond", expected: w[0].dr, found: w[1].dl });
            }
        }
        for t in &tensors {
            if t.data.len() != t.dl * 2 * t.dr {
                return Err(Error::InvalidParameter("site tensor data has the wrong length".into()));
            }
        }
        Ok(Self { tensors, prefactor, center: None })
    }

    /// Computational basis product state; `bits[s]` = 0 for spin up.
    pub fn product_state(bits: &[u8]) -> Self {
        let tensors = bits
            .iter()
            .map(|&b| {
                let mut t = SiteTensor::zeros(1, 1);
                *t.at_mut(0, (b & 1) as usize, 0) = cone();
                t
            })
            .collect();
        Self { tensors, prefactor: cone(), center: None }
    }

    /// Π over adjacent pairs (2k, 2k+1) of `weight·(|↑↑⟩ + |↓↓⟩)`; with weight ½ this is
    /// the vectorised steady state I/2^N, with weight ±½ on σᶻ-dressed pairs it gives
    /// the correlator vectors. `signs[k]` multiplies the |↓↓⟩ amplitude of pair k.
    pub fn paired(weights: &[Complex<T>], signs: &[T]) -> Result<Self> {
        if weights.len() != signs.len() || weights.is_empty() {
            return Err(Error::InvalidParameter("pair weights and signs must match".into()));
        }
        let mut tensors = Vec::with_capacity(2 * weights.len());
        for (w, s) in weights.iter().zip(signs) {
            let mut a = SiteTensor::zeros(1, 2);
            *a.at_mut(0, 0, 0) = cone();
            *a.at_mut(0, 1, 1) = cone();
            let mut b = SiteTensor::zeros(2, 1);
            *b.at_mut(0, 0, 0) = *w;
            *b.at_mut(1, 1, 0) = w.scale(*s);
            tensors.push(a);
            tensors.push(b);
        }
        Self::from_tensors(tensors, cone())
    }

    /// Exact MPS of a dense vector by successive SVDs (no truncation).
    pub fn from_dense(v: &StateVector<T>) -> Result<Self> {
        let d = v.dim();
        if !d.is_power_of_two() || d < 2 {
            return Err(Error::InvalidParameter("dense vector length must be 2^n, n >= 1".into()));
        }
        let n = d.trailing_zeros() as usize;
        let mut tensors = Vec::with_capacity(n);
        let mut rest = DenseMatrix::from_row_major(1, d, v.amplitudes().to_vec())?;
        for _ in 0..n - 1 {
            let dl = rest.rows();
            let cols = rest.cols() / 2;
            let m = DenseMatrix::from_row_major(dl * 2, cols, rest.data().to_vec())?;
            let f = svd(&m)?;
            let (k, _) = f.truncation_rank(usize::MAX, T::zero());
            let mut a = SiteTensor::zeros(dl, k);
            for row in 0..dl * 2 {
                for r in 0..k {
                    a.data[row * k + r] = f.u[(row, r)];
                }
            }
            tensors.push(a);
            rest = DenseMatrix::from_fn(k, cols, |r, c| f.v[(c, r)].conj().scale(f.s[r]));
        }
        let dl = rest.rows();
        let mut last = SiteTensor::zeros(dl, 1);
        last.data.copy_from_slice(rest.data());
        tensors.push(last);
        Self::from_tensors(tensors, cone())
    }

    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn tensors(&self) -> &[SiteTensor<T>] {
        &self.tensors
    }

    pub fn prefactor(&self) -> Complex<T> {
        self.prefactor
    }

    pub fn canonical_center(&self) -> Option<usize> {
        self.center
    }

    /// Bond dimensions including both boundary bonds.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut b = vec![1];
        b.extend(self.tensors.iter().map(|t| t.dr));
        b
    }

    pub fn max_bond(&self) -> usize {
        self.tensors.iter().map(|t| t.dr).max().unwrap_or(1)
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { prefactor: self.prefactor * c, ..self.clone() }
    }

    pub fn to_dense(&self) -> StateVector<T> {
        let mut acc: Vec<Complex<T>> = vec![self.prefactor];
        let mut bond = 1usize;
        for t in &self.tensors {
            let states = acc.len() / bond;
            let mut next = vec![czero(); states * 2 * t.dr];
            for s in 0..states {
                for l in 0..bond {
                    let c = acc[s * bond + l];
                    if c.re == T::zero() && c.im == T::zero() {
                        continue;
                    }
                    for p in 0..2 {
                        for r in 0..t.dr {
                            let idx = ((s * 2 + p) * t.dr) + r;
                            next[idx] = next[idx] + c * t.at(l, p, r);
                        }
                    }
                }
            }
            acc = next;
            bond = t.dr;
        }
        StateVector::from_vec_unchecked(acc)
    }

    /// ⟨self|other⟩ by left-to-right transfer-matrix contraction.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_sites() != other.n_sites() {
            return Err(Error::DimensionMismatch {
                context: "MPS inner product",
                expected: self.n_sites(),
                found: other.n_sites(),
            });
        }
        let mut env = vec![cone::<T>()];
        for (a, b) in self.tensors.iter().zip(&other.tensors) {
            // tmp[la][p][rb] = Σ_lb env[la][lb] B[lb][p][rb]
            let mut tmp = vec![czero::<T>(); a.dl * 2 * b.dr];
            for la in 0..a.dl {
                for lb in 0..b.dl {
                    let e = env[la * b.dl + lb];
                    if e.re == T::zero() && e.im == T::zero() {
                        continue;
                    }
                    for p in 0..2 {
                        for rb in 0..b.dr {
                            tmp[(la * 2 + p) * b.dr + rb] = tmp[(la * 2 + p) * b.dr + rb] + e * b.at(lb, p, rb);
                        }
                    }
                }
            }
            let mut next = vec![czero::<T>(); a.dr * b.dr];
            for la in 0..a.dl {
                for p in 0..2 {
                    for ra in 0..a.dr {
                        let ac = a.at(la, p, ra).conj();
                        if ac.re == T::zero() && ac.im == T::zero() {
                            continue;
                        }
                        for rb in 0..b.dr {
                            next[ra * b.dr + rb] = next[ra * b.dr + rb] + ac * tmp[(la * 2 + p) * b.dr + rb];
                        }
                    }
                }
            }
            env = next;
        }
        Ok(self.prefactor.conj() * other.prefactor * env[0])
    }

    pub fn norm(&self) -> T {
        self.inner(self).map(|z| z.re.max(T::zero()).sqrt()).unwrap_or(T::zero())
    }

    /// Mixed-canonical form around `center` (QR sweeps, lossless).
    pub fn canonicalize(&mut self, center: usize) {
        let n = self.n_sites();
        let center = center.min(n - 1);
        for k in 0..center {
            self.shift_left_qr(k);
        }
        for k in (center + 1..n).rev() {
            self.shift_right_qr(k);
        }
        self.center = Some(center);
    }

    /// Makes site k left-isometric, pushing R into site k+1.
    fn shift_left_qr(&mut self, k: usize) {
        let a = &self.tensors[k];
        let qr = thin_qr(&a.as_left_matrix());
        let kk = qr.q.cols();
        let mut q = SiteTensor::zeros(a.dl, kk);
        q.data.copy_from_slice(qr.q.data());
        let nxt = &self.tensors[k + 1];
        let mut b = SiteTensor::zeros(kk, nxt.dr);
        for i in 0..kk {
            for j in 0..nxt.dl {
                let rv = qr.r[(i, j)];
                if rv.re == T::zero() && rv.im == T::zero() {
                    continue;
                }
                for pr in 0..2 * nxt.dr {
                    b.data[i * 2 * nxt.dr + pr] = b.data[i * 2 * nxt.dr + pr] + rv * nxt.data[j * 2 * nxt.dr + pr];
                }
            }
        }
        self.tensors[k] = q;
        self.tensors[k + 1] = b;
    }

    /// Makes site k right-isometric, pushing the factor into site k−1.
    fn shift_right_qr(&mut self, k: usize) {
        let a = &self.tensors[k];
        let m = a.as_right_matrix();
        let qr = thin_qr(&m.adjoint());
        // m = R† Q†
        let kk = qr.q.cols();
        let mut q = SiteTensor::zeros(kk, a.dr);
        for i in 0..kk {
            for c in 0..2 * a.dr {
                q.data[i * 2 * a.dr + c] = qr.q[(c, i)].conj();
            }
        }
        let prev = &self.tensors[k - 1];
        let mut b = SiteTensor::zeros(prev.dl, kk);
        for row in 0..prev.dl * 2 {
            for j in 0..prev.dr {
                let pv = prev.data[row * prev.dr + j];
                if pv.re == T::zero() && pv.im == T::zero() {
                    continue;
                }
                for i in 0..kk {
                    b.data[row * kk + i] = b.data[row * kk + i] + pv * qr.r[(i, j)].conj();
                }
            }
        }
        self.tensors[k] = q;
        self.tensors[k - 1] = b;
    }

    /// Left-isometry defect ‖A†A − I‖_max of site k as a (l,p)×r matrix.
    pub fn left_isometry_error(&self, k: usize) -> T {
        let m = self.tensors[k].as_left_matrix();
        m.adjoint().matmul(&m).expect("shape").max_abs_diff(&DenseMatrix::identity(m.cols()))
    }

    pub fn right_isometry_error(&self, k: usize) -> T {
        let m = self.tensors[k].as_right_matrix();
        m.matmul(&m.adjoint()).expect("shape").max_abs_diff(&DenseMatrix::identity(m.rows()))
    }

    /// QR sweep to the right, truncating SVD sweep back to the left. Returns an
    /// estimate of the 2-norm error, Σ_bonds √(discarded weight).
    pub fn compress(&mut self, trunc: &Truncation<T>) -> Result<T> {
        let n = self.n_sites();
        for k in 0..n - 1 {
            self.shift_left_qr(k);
        }
        let mut err = T::zero();
        for k in (1..n).rev() {
            let a = &self.tensors[k];
            let f = svd(&a.as_right_matrix())?;
            let (kept, discarded) = f.truncation_rank(trunc.max_bond, trunc.cutoff);
            err = err + discarded.max(T::zero()).sqrt();
            let mut q = SiteTensor::zeros(kept, a.dr);
            for i in 0..kept {
                for c in 0..2 * a.dr {
                    q.data[i * 2 * a.dr + c] = f.v[(c, i)].conj();
                }
            }
            let prev = &self.tensors[k - 1];
            let mut b = SiteTensor::zeros(prev.dl, kept);
            for row in 0..prev.dl * 2 {
                for j in 0..prev.dr {
                    let pv = prev.data[row * prev.dr + j];
                    if pv.re == T::zero() && pv.im == T::zero() {
                        continue;
                    }
                    for i in 0..kept {
                        b.data[row * kept + i] = b.data[row * kept + i] + pv * f.u[(j, i)].scale(f.s[i]);
                    }
                }
            }
            self.tensors[k] = q;
            self.tensors[k - 1] = b;
        }
        let abs_err = err * self.prefactor.norm();
        let nrm = self.tensors[0].frobenius2().sqrt();
        if nrm > T::zero() {
            self.tensors[0].data.iter_mut().for_each(|z| *z = z.unscale(nrm));
            self.prefactor = self.prefactor.scale(nrm);
        } else {
            self.prefactor = czero();
        }
        self.center = Some(0);
        Ok(abs_err)
    }

    /// Σ_k c_k |ψ_k⟩ by direct sum of tensors followed by compression.
    pub fn linear_combination(parts: &[(Complex<T>, &Mps<T>)], trunc: &Truncation<T>) -> Result<(Self, T)> {
        let first = parts.first().ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let n = first.1.n_sites();
        if parts.iter().any(|p| p.1.n_sites() != n) {
            return Err(Error::DimensionMismatch { context: "MPS sum", expected: n, found: 0 });
        }
        if n == 1 {
            let mut t = SiteTensor::zeros(1, 1);
            for (c, m) in parts {
                let f = *c * m.prefactor;
                for (o, x) in t.data.iter_mut().zip(&m.tensors[0].data) {
                    *o = *o + f * x;
                }
            }
            return Ok((Self { tensors: vec![t], prefactor: cone(), center: Some(0) }, T::zero()));
        }
        let mut tensors = Vec::with_capacity(n);
        for k in 0..n {
            let dl: usize = if k == 0 { 1 } else { parts.iter().map(|p| p.1.tensors[k].dl).sum() };
            let dr: usize = if k == n - 1 { 1 } else { parts.iter().map(|p| p.1.tensors[k].dr).sum() };
            if dr > trunc.budget {
                return Err(Error::Resource { site: k, bond: dr, budget: trunc.budget });
            }
            let mut t = SiteTensor::zeros(dl, dr);
            let (mut ol, mut or) = (0usize, 0usize);
            for (c, m) in parts {
                let a = &m.tensors[k];
                let f = if k == 0 { *c * m.prefactor } else { cone() };
                for l in 0..a.dl {
                    for p in 0..2 {
                        for r in 0..a.dr {
                            let (li, ri) = (if k == 0 { 0 } else { ol + l }, if k == n - 1 { 0 } else { or + r });
                            *t.at_mut(li, p, ri) = t.at(li, p, ri) + f * a.at(l, p, r);
                        }
                    }
                }
                ol += a.dl;
                or += a.dr;
            }
            tensors.push(t);
        }
        let mut out = Self { tensors, prefactor: cone(), center: None };
        let err = out.compress(trunc)?;
        Ok((out, err))
    }

    /// W·ψ contracted exactly, then compressed.
    pub fn apply_mpo(&self, mpo: &Mpo<T>, trunc: &Truncation<T>) -> Result<(Self, T)> {
        let mut out = self.apply_mpo_exact(mpo, trunc.budget)?;
        let err = out.compress(trunc)?;
        Ok((out, err))
    }

    /// Exact W·ψ with bond dimensions multiplied; no compression.
    pub fn apply_mpo_exact(&self, mpo: &Mpo<T>, budget: usize) -> Result<Self> {
        if mpo.n_sites() != self.n_sites() {
            return Err(Error::DimensionMismatch {
                context: "MPO application",
                expected: mpo.n_sites(),
                found: self.n_sites(),
            });
        }
        let mut tensors = Vec::with_capacity(self.n_sites());
        for (k, (w, a)) in mpo.tensors().iter().zip(&self.tensors).enumerate() {
            let (dl, dr) = (w.wl * a.dl, w.wr * a.dr);
            if dr > budget {
                return Err(Error::Resource { site: k, bond: dr, budget });
            }
            let mut t = SiteTensor::zeros(dl, dr);
            for wl in 0..w.wl {
                for o in 0..2 {
                    for i in 0..2 {
                        for wr in 0..w.wr {
                            let wv = w.at(wl, o, i, wr);
                            if wv.re == T::zero() && wv.im == T::zero() {
                                continue;
                            }
                            for al in 0..a.dl {
                                for ar in 0..a.dr {
                                    let idx = ((wl * a.dl + al) * 2 + o) * dr + wr * a.dr + ar;
                                    t.data[idx] = t.data[idx] + wv * a.at(al, i, ar);
                                }
                            }
                        }
                    }
                }
            }
            tensors.push(t);
        }
        Ok(Self { tensors, prefactor: self.prefactor, center: None })
    }
}
