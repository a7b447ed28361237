use num_complex::Complex;

use crate::scalar::{abs2, cone, czero, Real};

use super::DenseMatrix;

/// Thin QR: `A = Q R` with `Q` of shape m×k having orthonormal columns and
/// `R` of shape k×n upper trapezoidal, k = min(m, n).
pub struct ThinQr<T> {
    pub q: DenseMatrix<T>,
    pub r: DenseMatrix<T>,
}

/// Householder reflector `I − 2 v v†` sending `x` to a multiple of `e_0`.
/// Returns `None` when `x` is already zero.
pub(crate) fn householder<T: Real>(x: &[Complex<T>]) -> Option<(Vec<Complex<T>>, Complex<T>)> {
    let nx = x.iter().map(|z| abs2(*z)).sum::<T>().sqrt();
    if nx == T::zero() {
        return None;
    }
    let x0 = x[0];
    let phase = if x0.norm() == T::zero() { cone() } else { x0 / x0.norm() };
    let alpha = -phase * nx;
    let mut v = x.to_vec();
    v[0] = v[0] - alpha;
    let nv = v.iter().map(|z| abs2(*z)).sum::<T>().sqrt();
    if nv == T::zero() {
        return None;
    }
    v.iter_mut().for_each(|z| *z = z.unscale(nv));
    Some((v, alpha))
}

pub fn thin_qr<T: Real>(a: &DenseMatrix<T>) -> ThinQr<T> {
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    let mut w = a.clone();
    let mut refl: Vec<Option<Vec<Complex<T>>>> = Vec::with_capacity(k);
    for j in 0..k {
        let x: Vec<Complex<T>> = (j..m).map(|i| w[(i, j)]).collect();
        match householder(&x) {
            Some((v, _)) => {
                for c in j..n {
                    let mut s = czero::<T>();
                    for (t, vi) in v.iter().enumerate() {
                        s = s + vi.conj() * w[(j + t, c)];
                    }
                    let s2 = s + s;
                    for (t, vi) in v.iter().enumerate() {
                        w[(j + t, c)] = w[(j + t, c)] - vi * s2;
                    }
                }
                refl.push(Some(v));
            }
            None => refl.push(None),
        }
    }
    let r = DenseMatrix::from_fn(k, n, |i, j| if j >= i { w[(i, j)] } else { czero() });
    let mut q = DenseMatrix::from_fn(m, k, |i, j| if i == j { cone() } else { czero() });
    for j in (0..k).rev() {
        if let Some(v) = &refl[j] {
            for c in 0..k {
                let mut s = czero::<T>();
                for (t, vi) in v.iter().enumerate() {
                    s = s + vi.conj() * q[(j + t, c)];
                }
                let s2 = s + s;
                for (t, vi) in v.iter().enumerate() {
                    q[(j + t, c)] = q[(j + t, c)] - vi * s2;
                }
            }
        }
    }
    ThinQr { q, r }
}
