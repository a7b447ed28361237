//! Independent brute-force oracles shared by the integration tests. Nothing
//! here goes through the library's Pauli-word or vectorisation code.
#![allow(dead_code)]

use nhkpm::linalg::{DenseMatrix, StateVector};
use nhkpm::model::ModelParams;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn random_matrix(rows: usize, cols: usize, r: &mut ChaCha8Rng) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(rows, cols, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

pub fn random_vector(dim: usize, r: &mut ChaCha8Rng) -> StateVector<f64> {
    StateVector::new((0..dim).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()).unwrap()
}

pub fn random_params(n: usize, r: &mut ChaCha8Rng) -> ModelParams<f64> {
    ModelParams::new(
        n,
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-0.5..0.5),
        r.gen_range(0.0..1.0),
    )
    .unwrap()
}

fn m2(a: [[C; 2]; 2]) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(2, 2, |i, j| a[i][j])
}

pub fn sx() -> DenseMatrix<f64> {
    m2([[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]])
}

pub fn sy() -> DenseMatrix<f64> {
    m2([[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]])
}

pub fn sz() -> DenseMatrix<f64> {
    m2([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]])
}

/// `op` on spin `site` (0-based, site 0 leftmost in the Kronecker product).
pub fn embed(op: &DenseMatrix<f64>, site: usize, n: usize) -> DenseMatrix<f64> {
    let id = DenseMatrix::identity(2);
    let mut m = DenseMatrix::identity(1);
    for s in 0..n {
        m = m.kron(if s == site { op } else { &id });
    }
    m
}

fn two_site(op: &DenseMatrix<f64>, a: usize, b: usize, n: usize) -> DenseMatrix<f64> {
    embed(op, a, n).matmul(&embed(op, b, n)).unwrap()
}

/// H by explicit Kronecker products, with 1-based sums written as in the model definition.
pub fn kron_hamiltonian(p: &ModelParams<f64>) -> DenseMatrix<f64> {
    let n = p.n_spins;
    let d = 1 << n;
    let mut h = DenseMatrix::zeros(d, d);
    let add = |h: &mut DenseMatrix<f64>, m: DenseMatrix<f64>, w: f64| {
        *h = h.add(&m.scaled(c(w, 0.))).unwrap();
    };
    for l in 1..=n / 2 {
        add(&mut h, two_site(&sx(), 2 * l - 2, 2 * l - 1, n), -p.jx);
    }
    for l in 1..n / 2 {
        add(&mut h, two_site(&sy(), 2 * l - 1, 2 * l, n), -p.jy);
    }
    for l in 1..=n {
        add(&mut h, embed(&sz(), l - 1, n), p.b * (l - 1) as f64);
    }
    for l in 1..n {
        add(&mut h, two_site(&sz(), l - 1, l, n), p.jz);
    }
    h
}

/// −i[H, ρ] + γ Σ_l (σᶻ_l ρ σᶻ_l − ρ), all dense.
pub fn dense_lindblad(p: &ModelParams<f64>, rho: &DenseMatrix<f64>) -> DenseMatrix<f64> {
    let h = kron_hamiltonian(p);
    let comm = h.matmul(rho).unwrap().sub(&rho.matmul(&h).unwrap()).unwrap();
    let mut out = comm.scaled(c(0., -1.));
    for l in 0..p.n_spins {
        let z = embed(&sz(), l, p.n_spins);
        let d = z.matmul(rho).unwrap().matmul(&z).unwrap().sub(rho).unwrap();
        out = out.add(&d.scaled(c(p.gamma, 0.))).unwrap();
    }
    out
}

/// Superoperator matrix in the row-major stacking vec(ρ)[i·d + j] = ρ_ij,
/// built column by column from `dense_lindblad`.
pub fn superoperator(p: &ModelParams<f64>) -> DenseMatrix<f64> {
    let d = 1 << p.n_spins;
    let mut s = DenseMatrix::zeros(d * d, d * d);
    for col in 0..d * d {
        let mut e = DenseMatrix::zeros(d, d);
        e[(col / d, col % d)] = c(1., 0.);
        let out = dense_lindblad(p, &e);
        for row in 0..d * d {
            s[(row, col)] = out[(row / d, row % d)];
        }
    }
    s
}

/// Multiset comparison: every value in `a` has a distinct partner in `b` within `tol`.
pub fn same_multiset(a: &[C], b: &[C], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let best = (0..b.len())
            .filter(|&k| !used[k])
            .min_by(|&i, &j| (b[i] - x).norm().partial_cmp(&(b[j] - x).norm()).unwrap());
        match best {
            Some(k) if (b[k] - x).norm() <= tol => used[k] = true,
            _ => return false,
        }
    }
    true
}

pub fn hermitian_random(d: usize, r: &mut ChaCha8Rng) -> DenseMatrix<f64> {
    let a = random_matrix(d, d, r);
    a.add(&a.adjoint()).unwrap()
}
