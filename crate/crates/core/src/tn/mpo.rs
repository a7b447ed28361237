use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::pauli::Pauli;
use crate::scalar::{cone, czero, Real};
use crate::vectorize::LiouvillianTerms;

/// Rank-4 site tensor `W[l][out][in][r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MpoTensor<T> {
    pub wl: usize,
    pub wr: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> MpoTensor<T> {
    pub fn zeros(wl: usize, wr: usize) -> Self {
        Self { wl, wr, data: vec![czero(); wl * 4 * wr] }
    }

    #[inline]
    pub fn at(&self, l: usize, o: usize, i: usize, r: usize) -> Complex<T> {
        self.data[((l * 2 + o) * 2 + i) * self.wr + r]
    }

    fn add_op(&mut self, l: usize, r: usize, c: Complex<T>, p: Pauli) {
        let m = p.matrix::<T>();
        for o in 0..2 {
            for i in 0..2 {
                let idx = ((l * 2 + o) * 2 + i) * self.wr + r;
                self.data[idx] = self.data[idx] + c * m[o][i];
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mpo<T> {
    tensors: Vec<MpoTensor<T>>,
}

pub const MAX_MPO_RANGE: usize = 2;

impl<T: Real> Mpo<T> {
    pub fn n_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn tensors(&self) -> &[MpoTensor<T>] {
        &self.tensors
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        let mut b = vec![1];
        b.extend(self.tensors.iter().map(|t| t.wr));
        b
    }

    pub fn identity(n_sites: usize) -> Self {
        let tensors = (0..n_sites)
            .map(|_| {
                let mut t = MpoTensor::zeros(1, 1);
                t.add_op(0, 0, cone(), Pauli::I);
                t
            })
            .collect();
        Self { tensors }
    }

    /// Dense 2^n × 2^n matrix, for small-chain checks.
    pub fn to_dense(&self) -> DenseMatrix<T> {
        // acc[(out, in)][bond]
        let mut acc: Vec<Complex<T>> = vec![cone()];
        let (mut dim, mut bond) = (1usize, 1usize);
        for w in &self.tensors {
            let nd = dim * 2;
            let mut next = vec![czero::<T>(); nd * nd * w.wr];
            for a in 0..dim {
                for b in 0..dim {
                    for l in 0..bond {
                        let c = acc[(a * dim + b) * bond + l];
                        if c.re == T::zero() && c.im == T::zero() {
                            continue;
                        }
                        for o in 0..2 {
                            for i in 0..2 {
                                for r in 0..w.wr {
                                    let idx = ((a * 2 + o) * nd + (b * 2 + i)) * w.wr + r;
                                    next[idx] = next[idx] + c * w.at(l, o, i, r);
                                }
                            }
                        }
                    }
                }
            }
            acc = next;
            dim = nd;
            bond = w.wr;
        }
        DenseMatrix::from_row_major(dim, dim, acc).expect("shape")
    }
}

/// Exact MPO of `shift·I + Σ terms` from a finite-state automaton.
///
/// Bond channels: 0 = nothing placed yet, 1 = term complete, then one channel
/// per term that straddles the bond. Each word's coefficient sits on its first
/// operator. A pure shift gives a bond-1 MPO.
pub fn mpo_from_terms<T: Real>(lt: &LiouvillianTerms<T>) -> Result<Mpo<T>> {
    let n = lt.n_sites();
    let range = lt.max_coupling_range();
    if range > MAX_MPO_RANGE {
        return Err(Error::RangeTooLong { range, max: MAX_MPO_RANGE });
    }
    let words: Vec<_> = lt.terms.iter().filter(|t| !t.is_identity()).collect();
    let extra_shift: Complex<T> = lt.terms.iter().filter(|t| t.is_identity()).fold(lt.shift, |s, t| s + t.coeff);
    if words.iter().any(|t| t.last_site().is_some_and(|s| s >= n)) {
        return Err(Error::DimensionMismatch { context: "MPO term site", expected: n, found: n + 1 });
    }
    if words.is_empty() {
        let mut m = Mpo::identity(n);
        m.tensors[0].data.iter_mut().for_each(|z| *z = *z * extra_shift);
        return Ok(m);
    }
    if n == 1 {
        let mut t = MpoTensor::zeros(1, 1);
        t.add_op(0, 0, extra_shift, Pauli::I);
        for w in &words {
            t.add_op(0, 0, w.coeff, w.op_at(0));
        }
        return Ok(Mpo { tensors: vec![t] });
    }

    // channel[b] lists the words crossing bond b (between sites b and b+1).
    let mut channel: Vec<Vec<usize>> = vec![Vec::new(); n - 1];
    for (wi, w) in words.iter().enumerate() {
        let (a, z) = (w.first_site().unwrap_or(0), w.last_site().unwrap_or(0));
        for b in a..z {
            channel[b].push(wi);
        }
    }
    let width = |b: usize| 2 + channel[b].len();
    let chan_index = |b: usize, wi: usize| 2 + channel[b].iter().position(|&x| x == wi).expect("crossing word");

    let mut tensors = Vec::with_capacity(n);
    for k in 0..n {
        let wl = if k == 0 { 1 } else { width(k - 1) };
        let wr = if k == n - 1 { 1 } else { width(k) };
        // Map logical states onto bond indices at the boundaries.
        let ready_l = Some(0);
        let done_l = if k == 0 { None } else { Some(1) };
        let ready_r = if k == n - 1 { None } else { Some(0) };
        let done_r = if k == n - 1 { Some(0) } else { Some(1) };
        let mut t = MpoTensor::zeros(wl, wr);
        if let (Some(l), Some(r)) = (ready_l, ready_r) {
            t.add_op(l, r, cone(), Pauli::I);
        }
        if let (Some(l), Some(r)) = (done_l, done_r) {
            t.add_op(l, r, cone(), Pauli::I);
        }
        if k == 0 {
            if let (Some(l), Some(r)) = (ready_l, done_r) {
                t.add_op(l, r, extra_shift, Pauli::I);
            }
        }
        for (wi, w) in words.iter().enumerate() {
            let (a, z) = (w.first_site().unwrap_or(0), w.last_site().unwrap_or(0));
            if k < a || k > z {
                continue;
            }
            let op = w.op_at(k);
            let l = if k == a { ready_l } else { Some(chan_index(k - 1, wi)) };
            let r = if k == z { done_r } else { Some(chan_index(k, wi)) };
            let c = if k == a { w.coeff } else { cone() };
            if let (Some(l), Some(r)) = (l, r) {
                t.add_op(l, r, c, op);
            }
        }
        tensors.push(t);
    }
    Ok(Mpo { tensors })
}
