use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{abs2, cone, czero, Real};

use super::DenseMatrix;

/// Thin singular value decomposition `A = U diag(s) V†`, with `s` nonincreasing.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: DenseMatrix<T>,
    pub s: Vec<T>,
    pub v: DenseMatrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        self.reconstruct_rank(self.s.len())
    }

    pub fn reconstruct_rank(&self, k: usize) -> DenseMatrix<T> {
        let (m, n) = (self.u.rows(), self.v.rows());
        DenseMatrix::from_fn(m, n, |i, j| {
            (0..k.min(self.s.len()))
                .fold(czero(), |acc, r| acc + self.u[(i, r)] * self.v[(j, r)].conj().scale(self.s[r]))
        })
    }

    /// Number of singular values kept under the truncation rule: the smallest
    /// rank whose discarded squared weight is at most `cutoff²` times the total,
    /// capped at `max_rank`. Returns `(rank, discarded squared weight)`.
    pub fn truncation_rank(&self, max_rank: usize, cutoff: T) -> (usize, T) {
        let total: T = self.s.iter().map(|&x| x * x).sum();
        let floor = T::epsilon() * T::lit(16.0) * self.s.first().copied().unwrap_or(T::zero());
        let mut k = self.s.len();
        let mut tail = T::zero();
        while k > 0 {
            let sk = self.s[k - 1];
            let next = tail + sk * sk;
            if next <= cutoff * cutoff * total || sk <= floor {
                tail = next;
                k -= 1;
            } else {
                break;
            }
        }
        k = k.max(1).min(self.s.len());
        if k > max_rank {
            k = max_rank.max(1);
        }
        let discarded: T = self.s[k..].iter().map(|&x| x * x).sum();
        (k, discarded)
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(a: &DenseMatrix<T>) -> Result<Svd<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    if a.rows() < a.cols() {
        let t = jacobi(&a.adjoint())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    jacobi(a)
}

fn jacobi<T: Real>(a: &DenseMatrix<T>) -> Result<Svd<T>> {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<Complex<T>>> =
        (0..n).map(|j| (0..n).map(|i| if i == j { cone() } else { czero() }).collect()).collect();
    let tol = T::epsilon() * T::from_usize_lossy(m.max(1));
    // Columns below this squared norm end up as singular values under the
    // completion threshold below, so rotating them only chases roundoff.
    let fro2: T = a.data().iter().map(|z| abs2(*z)).sum();
    let negligible = T::epsilon() * T::epsilon() * fro2;
    let mut converged = false;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: T = cols[p].iter().map(|z| abs2(*z)).sum();
                let beta: T = cols[q].iter().map(|z| abs2(*z)).sum();
                let gamma = cols[p].iter().zip(&cols[q]).fold(czero::<T>(), |s, (x, y)| s + x.conj() * y);
                let g = gamma.norm();
                if g == T::zero() || alpha.min(beta) <= negligible || g <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (g + g);
                let sgn = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, phase, c, s);
                rotate(&mut vcols, p, q, phase, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged("Jacobi SVD sweeps".into()));
    }

    let mut order: Vec<(T, usize)> =
        cols.iter().enumerate().map(|(j, c)| (c.iter().map(|z| abs2(*z)).sum::<T>().sqrt(), j)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));

    let smax = order.first().map(|x| x.0).unwrap_or(T::zero());
    let tiny = smax * T::epsilon() * T::from_usize_lossy(m.max(n));
    let mut u = DenseMatrix::zeros(m, n);
    let mut v = DenseMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut ucols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for (r, &(sv, j)) in order.iter().enumerate() {
        let col = if sv > tiny && sv > T::zero() {
            cols[j].iter().map(|z| z.unscale(sv)).collect()
        } else {
            complete_basis(&ucols, m)
        };
        for i in 0..m {
            u[(i, r)] = col[i];
        }
        ucols.push(col);
        for i in 0..n {
            v[(i, r)] = vcols[j][i];
        }
        s.push(sv);
    }
    Ok(Svd { u, s, v })
}

#[inline]
fn rotate<T: Real>(cols: &mut [Vec<Complex<T>>], p: usize, q: usize, phase: Complex<T>, c: T, s: T) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let b = *y * phase;
        let xp = *x;
        *x = xp.scale(c) - b.scale(s);
        *y = xp.scale(s) + b.scale(c);
    }
}

/// A unit vector orthogonal to all of `basis` (Gram–Schmidt on canonical vectors).
fn complete_basis<T: Real>(basis: &[Vec<Complex<T>>], m: usize) -> Vec<Complex<T>> {
    let mut best: Option<(T, Vec<Complex<T>>)> = None;
    for k in 0..m {
        let mut e = vec![czero::<T>(); m];
        e[k] = cone();
        for _ in 0..2 {
            for b in basis {
                let proj = b.iter().zip(&e).fold(czero::<T>(), |s, (x, y)| s + x.conj() * y);
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei = *ei - bi * proj;
                }
            }
        }
        let nrm: T = e.iter().map(|z| abs2(*z)).sum::<T>().sqrt();
        if nrm > T::lit(0.5) {
            return e.into_iter().map(|z| z.unscale(nrm)).collect();
        }
        if best.as_ref().is_none_or(|b| nrm > b.0) {
            best = Some((nrm, e));
        }
    }
    let (nrm, e) = best.expect("m > 0");
    e.into_iter().map(|z| z.unscale(nrm)).collect()
}
