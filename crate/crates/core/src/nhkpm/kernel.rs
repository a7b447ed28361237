use crate::error::{Error, Result};
use crate::scalar::Real;

/// Jackson damping factors g_0..g_{M−1}.
pub fn jackson_coefficients<T: Real>(m: usize) -> Vec<T> {
    let mp1 = T::from_usize_lossy(m + 1);
    let q = T::PI() / mp1;
    let cot = q.cos() / q.sin();
    (0..m)
        .map(|k| {
            let x = q * T::from_usize_lossy(k);
            let mk = T::from_usize_lossy(m + 1 - k);
            (mk * x.cos() + x.sin() * cot) / mp1
        })
        .collect()
}

/// Chebyshev coefficients of the principal-value inverse 1/x on [−1, 1]:
/// 0 for even m, 2(−1)^{(m−1)/2} for odd m.
pub fn pv_inverse_coefficients<T: Real>(m: usize) -> Vec<T> {
    (0..m)
        .map(|k| match k % 4 {
            1 => T::lit(2.0),
            3 => T::lit(-2.0),
            _ => T::zero(),
        })
        .collect()
}

/// Same coefficients by Chebyshev–Gauss quadrature on an even number of
/// nodes (so no node sits on the pole). T_m(x)/x is a polynomial for odd m and
/// odd for even m, so the quadrature is exact up to roundoff.
pub fn pv_inverse_coefficients_quadrature(m: usize) -> Vec<f64> {
    let nodes = m + 2 + (m % 2);
    let nodes = nodes + nodes % 2;
    let kf = nodes as f64;
    (0..m)
        .map(|k| {
            let s: f64 = (0..nodes)
                .map(|j| {
                    let th = std::f64::consts::PI * (j as f64 + 0.5) / kf;
                    (k as f64 * th).cos() / th.cos()
                })
                .sum();
            let norm = if k == 0 { 1.0 } else { 2.0 };
            norm * s / kf
        })
        .collect()
}

/// Startup gate: closed-form a_m against quadrature. Returns the largest deviation.
pub fn verify_pv_coefficients(m: usize) -> Result<f64> {
    let closed = pv_inverse_coefficients::<f64>(m);
    let quad = pv_inverse_coefficients_quadrature(m);
    let dev = closed.iter().zip(&quad).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let tol = 1e-10 * (m.max(1) as f64);
    if dev > tol {
        return Err(Error::NotConverged(format!("principal-value coefficients disagree with quadrature by {dev:.3e}")));
    }
    Ok(dev)
}

/// Kernel-smoothed inverse Σ a_m g_m T_m(e) for a normalised energy e ∈ (−1, 1).
pub fn smoothed_inverse_with<T: Real>(e: T, damping: &[T]) -> T {
    let a = pv_inverse_coefficients::<T>(damping.len());
    let (mut t0, mut t1) = (T::one(), e);
    let mut s = T::zero();
    for (k, (ak, gk)) in a.iter().zip(damping).enumerate() {
        let tk = match k {
            0 => t0,
            1 => t1,
            _ => {
                let t2 = (e + e) * t1 - t0;
                t0 = t1;
                t1 = t2;
                t2
            }
        };
        s = s + *ak * *gk * tk;
    }
    s
}

pub fn smoothed_inverse<T: Real>(e: T, m: usize) -> T {
    smoothed_inverse_with(e, &jackson_coefficients::<T>(m))
}

/// Dawson's integral F(x) = e^{−x²} ∫₀ˣ e^{t²} dt by Rybicki's sampling sum
/// with step 0.2; accurate to roundoff for all real x.
pub fn dawson(x: f64) -> f64 {
    if x < 0.0 {
        return -dawson(-x);
    }
    if x < 1e-4 {
        return x * (1.0 - 2.0 * x * x / 3.0);
    }
    let h = 0.2;
    let mut n0 = (x / h).round() as i64;
    if n0 % 2 == 0 {
        n0 += 1;
    }
    let mut s = 0.0;
    let mut n = n0 - 80;
    while n <= n0 + 80 {
        let d = x - n as f64 * h;
        s += (-d * d).exp() / n as f64;
        n += 2;
    }
    s / std::f64::consts::PI.sqrt()
}

/// Jackson-smoothed 1/E in its Gaussian-limit closed form, (√2/σ)·F(E/(√2σ)).
pub fn dawson_inverse(e: f64, sigma: f64) -> f64 {
    let w = std::f64::consts::SQRT_2 * sigma;
    2.0 / w * dawson(e / w)
}

/// Result of the kernel self-check run by `validate`.
#[derive(Clone, Debug)]
pub struct KernelCheck {
    pub pv_quadrature_deviation: f64,
    /// max over E of |smoothed − Dawson| / |Dawson|.
    pub dawson_relative_deviation: f64,
    pub passed: bool,
}

pub const KERNEL_CHECK_NAME: &str = "kernel.jackson_dawson";

/// Compares the moment-space smoothed inverse built from `damping` with the
/// Dawson closed form at a few normalised energies.
pub fn kernel_check(damping: &[f64]) -> KernelCheck {
    let m = damping.len();
    let pv = verify_pv_coefficients(m).unwrap_or(f64::INFINITY);
    let sigma = std::f64::consts::PI / m as f64;
    let mut dev: f64 = 0.0;
    for &e in &[0.1, 0.25, 0.5] {
        let k = smoothed_inverse_with(e, damping);
        let d = dawson_inverse(e, sigma);
        dev = dev.max(((k - d) / d).abs());
    }
    KernelCheck { pv_quadrature_deviation: pv, dawson_relative_deviation: dev, passed: pv < 1e-8 && dev < 1e-3 }
}
