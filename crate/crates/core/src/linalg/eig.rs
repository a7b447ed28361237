use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{abs2, cone, czero, Real};

use super::lu::Lu;
use super::qr::householder;
use super::{DenseMatrix, StateVector, DEFAULT_DENSE_LIMIT};

#[derive(Clone, Copy, Debug)]
pub struct EigOptions {
    pub dense_limit: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { dense_limit: DEFAULT_DENSE_LIMIT }
    }
}

/// Eigenvalues with biorthonormal right and left eigenvectors.
///
/// Right vectors have unit 2-norm; left vectors satisfy ⟨L_m|R_n⟩ = δ_mn.
/// Left vectors are the rows of V⁻¹, which biorthogonalises degenerate
/// clusters (such as the pair of steady states) without any pairing heuristic.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub eigenvalues: Vec<Complex<T>>,
    right: DenseMatrix<T>,
    left_rows: DenseMatrix<T>,
    /// ‖V‖_F ‖V⁻¹‖_F / n, equal to 1 for a normal matrix.
    pub condition: T,
    /// ‖V Λ V⁻¹ − A‖_F / max(‖A‖_F, 1).
    pub reconstruction_residual: T,
    pub warnings: Vec<String>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn right_vector(&self, n: usize) -> StateVector<T> {
        StateVector::from_vec_unchecked(self.right.column(n))
    }

    /// The ket |L_n⟩ whose bra ⟨L_n| is row `n` of V⁻¹.
    pub fn left_vector(&self, n: usize) -> StateVector<T> {
        StateVector::from_vec_unchecked(self.left_rows.row(n).iter().map(|z| z.conj()).collect())
    }

    pub fn right_matrix(&self) -> &DenseMatrix<T> {
        &self.right
    }

    /// V⁻¹, whose rows are the left eigenvectors as bras.
    pub fn left_matrix(&self) -> &DenseMatrix<T> {
        &self.left_rows
    }

    /// Projections ⟨l|R_n⟩⟨L_n|r⟩ for every eigenpair.
    pub fn weights(&self, l: &StateVector<T>, r: &StateVector<T>) -> Result<Vec<Complex<T>>> {
        let n = self.dim();
        if l.dim() != n || r.dim() != n {
            return Err(Error::DimensionMismatch {
                context: "eigen weights",
                expected: n,
                found: l.dim().min(r.dim()),
            });
        }
        let (la, ra) = (l.amplitudes(), r.amplitudes());
        Ok((0..n)
            .map(|k| {
                let lr = (0..n).fold(czero::<T>(), |s, i| s + la[i].conj() * self.right[(i, k)]);
                let wr = self.left_rows.row(k).iter().zip(ra).fold(czero::<T>(), |s, (a, b)| s + a * b);
                lr * wr
            })
            .collect())
    }

    pub fn biorthogonality_error(&self) -> T {
        let p = self.left_rows.matmul(&self.right).expect("square");
        p.max_abs_diff(&DenseMatrix::identity(self.dim()))
    }
}

/// Full nonsymmetric eigendecomposition (Hessenberg reduction + shifted QR).
pub fn eig_nonsymmetric<T: Real>(a: &DenseMatrix<T>, opts: EigOptions) -> Result<EigenDecomposition<T>> {
    check_input(a, opts)?;
    let n = a.rows();
    let (t, z) = schur(a, true)?;
    let z = z.expect("vectors requested");
    let eigenvalues: Vec<Complex<T>> = (0..n).map(|i| t[(i, i)]).collect();

    let y = triangular_eigenvectors(&t);
    let mut right = z.matmul(&y)?;
    for k in 0..n {
        let nrm = (0..n).map(|i| abs2(right[(i, k)])).sum::<T>().sqrt();
        if nrm > T::zero() {
            for i in 0..n {
                right[(i, k)] = right[(i, k)].unscale(nrm);
            }
        }
    }

    let mut warnings = Vec::new();
    let lu = Lu::factor(&right)
        .map_err(|_| Error::NotConverged("eigenvector matrix is singular (defective input)".into()))?;
    let left_rows = lu.inverse();
    let condition = right.frobenius_norm() * left_rows.frobenius_norm() / T::from_usize_lossy(n.max(1));
    if condition > T::lit(1e8) {
        warnings.push(format!("eigenvector condition estimate {condition:.3e}; input may be near-defective"));
    }

    let mut vl = right.clone();
    for k in 0..n {
        for i in 0..n {
            vl[(i, k)] = vl[(i, k)] * eigenvalues[k];
        }
    }
    let recon = vl.matmul(&left_rows)?;
    let reconstruction_residual = recon.sub(a)?.frobenius_norm() / a.frobenius_norm().max(T::one());
    let tol = T::epsilon().sqrt() * T::lit(1e-1);
    if reconstruction_residual > tol {
        warnings.push(format!("reconstruction residual {reconstruction_residual:.3e} exceeds {tol:.1e}"));
    }

    Ok(EigenDecomposition { eigenvalues, right, left_rows, condition, reconstruction_residual, warnings })
}

/// Eigenvalues only; skips vector accumulation.
pub fn eigenvalues<T: Real>(a: &DenseMatrix<T>, opts: EigOptions) -> Result<Vec<Complex<T>>> {
    check_input(a, opts)?;
    let (t, _) = schur(a, false)?;
    Ok((0..a.rows()).map(|i| t[(i, i)]).collect())
}

fn check_input<T: Real>(a: &DenseMatrix<T>, opts: EigOptions) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { context: "eig", expected: a.rows(), found: a.cols() });
    }
    if a.rows() > opts.dense_limit {
        return Err(Error::SizeLimit { dim: a.rows(), limit: opts.dense_limit });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("eigen input"));
    }
    Ok(())
}

/// Complex Schur form `A = Z T Z†`.
fn schur<T: Real>(a: &DenseMatrix<T>, want_z: bool) -> Result<(DenseMatrix<T>, Option<DenseMatrix<T>>)> {
    let n = a.rows();
    let mut h = a.clone();
    let mut z = if want_z { Some(DenseMatrix::identity(n)) } else { None };

    // Householder reduction to upper Hessenberg form.
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some((v, _)) = householder(&x) else { continue };
        let off = k + 1;
        for j in k..n {
            let mut s = czero::<T>();
            for (t, vi) in v.iter().enumerate() {
                s = s + vi.conj() * h[(off + t, j)];
            }
            let s2 = s + s;
            for (t, vi) in v.iter().enumerate() {
                h[(off + t, j)] = h[(off + t, j)] - vi * s2;
            }
        }
        let right = |m: &mut DenseMatrix<T>| {
            for i in 0..n {
                let mut s = czero::<T>();
                for (t, vi) in v.iter().enumerate() {
                    s = s + m[(i, off + t)] * vi;
                }
                let s2 = s + s;
                for (t, vi) in v.iter().enumerate() {
                    m[(i, off + t)] = m[(i, off + t)] - s2 * vi.conj();
                }
            }
        };
        right(&mut h);
        if let Some(zm) = z.as_mut() {
            right(zm);
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }

    let eps = T::epsilon();
    let hnorm = h.frobenius_norm().max(T::min_positive_value());
    let max_iter = 30 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n.saturating_sub(1);
    let mut rot: Vec<(T, Complex<T>)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = abs1(h[(l - 1, l - 1)]) + abs1(h[(l, l)]);
            if s == T::zero() {
                s = hnorm;
            }
            if abs1(h[(l, l - 1)]) <= eps * s {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NotConverged(format!("QR iteration exceeded {max_iter} steps")));
        }

        let mu = if its.is_multiple_of(10) {
            h[(hi, hi)] + Complex::new(T::lit(0.75) * h[(hi, hi - 1)].norm(), T::zero())
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in l..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rot.push((c, s));
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x.scale(c) + s * y;
                h[(k + 1, j)] = -s.conj() * x + y.scale(c);
            }
            h[(k + 1, k)] = czero();
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = rot[idx];
            let top = (k + 2).min(hi);
            apply_right(&mut h, 0, top + 1, k, c, s);
            if let Some(zm) = z.as_mut() {
                apply_right(zm, 0, n, k, c, s);
            }
        }
        for i in l..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = czero();
        }
    }
    Ok((h, z))
}

#[inline]
fn apply_right<T: Real>(m: &mut DenseMatrix<T>, r0: usize, r1: usize, k: usize, c: T, s: Complex<T>) {
    for i in r0..r1 {
        let (x, y) = (m[(i, k)], m[(i, k + 1)]);
        m[(i, k)] = x.scale(c) + y * s.conj();
        m[(i, k + 1)] = -x * s + y.scale(c);
    }
}

#[inline]
fn abs1<T: Real>(z: Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// Rotation `[[c, s], [−s̄, c]]` annihilating `b` against `a`.
#[inline]
fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == T::zero() {
        return (T::one(), czero());
    }
    if na == T::zero() {
        return (T::zero(), b.conj().unscale(nb));
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj().unscale(r))
}

fn wilkinson<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let m = (a - d).scale(half);
    let disc = (m * m + b * c).sqrt();
    let mid = (a + d).scale(half);
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Columns are eigenvectors of the upper-triangular `t`.
fn triangular_eigenvectors<T: Real>(t: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = t.rows();
    let tnorm = t.frobenius_norm();
    let smin = (T::epsilon() * tnorm).max(T::min_positive_value() * T::lit(1e10));
    let big = T::lit(1e10);
    let mut y = DenseMatrix::zeros(n, n);
    let mut x = vec![czero::<T>(); n];
    for k in 0..n {
        let lam = t[(k, k)];
        x.iter_mut().for_each(|v| *v = czero());
        x[k] = cone();
        for i in (0..k).rev() {
            let mut s = czero::<T>();
            for j in i + 1..=k {
                s = s + t[(i, j)] * x[j];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < smin {
                d = Complex::new(smin, T::zero());
            }
            x[i] = -s / d;
            let xi = x[i].norm();
            if xi > big {
                for v in x[i..=k].iter_mut() {
                    *v = v.unscale(xi);
                }
            }
        }
        for i in 0..=k {
            y[(i, k)] = x[i];
        }
    }
    y
}
