//! Non-Hermitian kernel polynomial method.
//!
//! For each complex frequency ω the operator ω − 𝓛̃ is embedded in the
//! Hermitian block matrix ℋ = [[0, ω−𝓛̃], [ω*−𝓛̃†, 0]] and the Jackson-smoothed
//! inverse at zero energy gives G(ω) = ⟨ψ_L|(ω−𝓛̃)⁻¹|ψ_R⟩ (with ω_n-size
//! smearing σa). The spectral map is C(ω) = (1/π) ∂_{ω*} G.

mod backend;
mod kernel;

pub use backend::{
    chebyshev_moments_reference, hermitrized_apply, parity_sectors, BlockVector, DenseBackend, KpmBackend, Moments,
    MpsBackend,
};
pub use kernel::{
    dawson, dawson_inverse, jackson_coefficients, kernel_check, pv_inverse_coefficients,
    pv_inverse_coefficients_quadrature, smoothed_inverse, smoothed_inverse_with, verify_pv_coefficients, KernelCheck,
    KERNEL_CHECK_NAME,
};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    Jackson,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KpmParams<T> {
    pub n_moments: usize,
    /// Spectral bound a of ℋ(ω) over the whole grid.
    pub scale: T,
    pub kernel: Kernel,
}

pub const MIN_MOMENTS: usize = 16;

impl<T: Real> KpmParams<T> {
    pub fn new(n_moments: usize, scale: T) -> Result<Self> {
        let p = Self { n_moments, scale, kernel: Kernel::Jackson };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_moments < MIN_MOMENTS {
            return Err(Error::InvalidParameter(format!("n_moments must be >= {MIN_MOMENTS}")));
        }
        if !(self.scale > T::zero()) || !self.scale.is_finite() {
            return Err(Error::InvalidParameter("scale must be positive and finite".into()));
        }
        Ok(())
    }

    /// σ = π/M, the kernel width in normalised energy.
    pub fn sigma(&self) -> T {
        T::PI() / T::from_usize_lossy(self.n_moments)
    }

    /// Smearing radius σ·a in the complex frequency plane.
    pub fn resolution(&self) -> T {
        self.sigma() * self.scale
    }
}

/// μ_m = ⟨L|T_m(ℋ/a)|R⟩ for m < M at one frequency.
pub fn chebyshev_moments<T: Real, B: KpmBackend<T> + ?Sized>(
    backend: &B,
    omega: Complex<T>,
    kpm: &KpmParams<T>,
) -> Result<Moments<T>> {
    kpm.validate()?;
    backend.moments(omega, kpm)
}

/// G = (1/a) Σ_m a_m g_m μ_m.
pub fn greens_at_zero<T: Real>(mu: &[Complex<T>], kpm: &KpmParams<T>) -> Complex<T> {
    greens_with_damping(mu, kpm.scale, &jackson_coefficients::<T>(mu.len()))
}

pub fn greens_with_damping<T: Real>(mu: &[Complex<T>], scale: T, damping: &[T]) -> Complex<T> {
    let a = pv_inverse_coefficients::<T>(mu.len());
    let s = mu.iter().zip(a.iter().zip(damping)).fold(czero::<T>(), |acc, (m, (ak, gk))| acc + m.scale(*ak * *gk));
    s.unscale(scale)
}

/// Rectangular grid of complex frequencies. Node (i_re, i_im) has flat index
/// i_im·n_re + i_re.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyGrid<T> {
    pub re_min: T,
    pub re_max: T,
    pub im_min: T,
    pub im_max: T,
    pub n_re: usize,
    pub n_im: usize,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn new(re_min: T, re_max: T, im_min: T, im_max: T, n_re: usize, n_im: usize) -> Result<Self> {
        let g = Self { re_min, re_max, im_min, im_max, n_re, n_im };
        g.validate()?;
        Ok(g)
    }

    /// Grid with (approximately) equal spacing `h` in both directions.
    pub fn with_spacing(re: (T, T), im: (T, T), h: T) -> Result<Self> {
        let count = |lo: T, hi: T| ((hi - lo) / h).round().to_usize().unwrap_or(0) + 1;
        Self::new(re.0, re.1, im.0, im.1, count(re.0, re.1), count(im.0, im.1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_re < 3 || self.n_im < 3 {
            return Err(Error::InvalidParameter("grid needs at least 3 nodes per axis".into()));
        }
        let ok = |a: T, b: T| a.is_finite() && b.is_finite() && b > a;
        if !ok(self.re_min, self.re_max) || !ok(self.im_min, self.im_max) {
            return Err(Error::InvalidParameter("grid ranges must be finite with max > min".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_re * self.n_im
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> T {
        (self.re_max - self.re_min) / T::from_usize_lossy(self.n_re - 1)
    }

    pub fn dy(&self) -> T {
        (self.im_max - self.im_min) / T::from_usize_lossy(self.n_im - 1)
    }

    pub fn re_at(&self, i: usize) -> T {
        self.re_min + self.dx() * T::from_usize_lossy(i)
    }

    pub fn im_at(&self, j: usize) -> T {
        self.im_min + self.dy() * T::from_usize_lossy(j)
    }

    pub fn node(&self, idx: usize) -> Complex<T> {
        Complex::new(self.re_at(idx % self.n_re), self.im_at(idx / self.n_re))
    }

    pub fn index(&self, i_re: usize, i_im: usize) -> usize {
        i_im * self.n_re + i_re
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        let (i, j) = (idx % self.n_re, idx / self.n_re);
        i > 0 && j > 0 && i + 1 < self.n_re && j + 1 < self.n_im
    }

    /// Largest |ω| over the grid, attained at a corner.
    pub fn max_abs(&self) -> T {
        [
            Complex::new(self.re_min, self.im_min),
            Complex::new(self.re_min, self.im_max),
            Complex::new(self.re_max, self.im_min),
            Complex::new(self.re_max, self.im_max),
        ]
        .iter()
        .map(|z| z.norm())
        .fold(T::zero(), T::max)
    }

    pub fn is_reflection_symmetric(&self) -> bool {
        (self.im_min + self.im_max).abs() <= T::lit(1e-9) * self.dy().max(T::one())
    }

    /// Sub-grid over a rectangle with the requested spacing.
    pub fn refine(&self, re: (T, T), im: (T, T), h: T) -> Result<Self> {
        Self::with_spacing(re, im, h)
    }
}

/// a = 1.1·(max_corner |ω| + bound on ‖𝓛̃‖), a bound on ‖ℋ(ω)‖ over the grid.
pub fn estimate_scale<T: Real>(operator_norm_bound: T, grid: &FrequencyGrid<T>) -> T {
    T::lit(1.1) * (grid.max_abs() + operator_norm_bound)
}

/// 1.1·(max_corner |ω − c| + bound on ‖𝓛̃ − c‖) with the backend's centre c.
pub fn estimate_scale_centered<T: Real, B: KpmBackend<T> + ?Sized>(backend: &B, grid: &FrequencyGrid<T>) -> T {
    let (c, bound) = backend.centered_norm_bound();
    let corners = [
        Complex::new(grid.re_min, grid.im_min),
        Complex::new(grid.re_min, grid.im_max),
        Complex::new(grid.re_max, grid.im_min),
        Complex::new(grid.re_max, grid.im_max),
    ];
    let far = corners.iter().map(|&z| (z - c).norm()).fold(T::zero(), T::max);
    T::lit(1.1) * (far + bound)
}

#[derive(Clone, Debug, Default)]
pub struct MapDiagnostics<T> {
    pub max_truncation: T,
    pub max_bond: usize,
}

/// C(ω) and G(ω) on a grid. Boundary-ring C values are not defined (no
/// one-sided differences) and are stored as zero with `is_interior` false.
#[derive(Clone, Debug)]
pub struct SpectralMap<T> {
    pub grid: FrequencyGrid<T>,
    pub greens: Vec<Complex<T>>,
    pub values: Vec<Complex<T>>,
    pub kpm: KpmParams<T>,
    pub backend: String,
    /// ⟨ψ_L|ψ_R⟩, the weight the map should integrate to.
    pub overlap: Complex<T>,
    pub diagnostics: MapDiagnostics<T>,
}

impl<T: Real> SpectralMap<T> {
    /// Assembles a map from precomputed Green's function samples.
    pub fn from_greens(
        grid: FrequencyGrid<T>,
        greens: Vec<Complex<T>>,
        kpm: KpmParams<T>,
        backend: &str,
        overlap: Complex<T>,
    ) -> Result<Self> {
        if greens.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                context: "greens samples",
                expected: grid.len(),
                found: greens.len(),
            });
        }
        let values = d_dwbar(&grid, &greens);
        Ok(Self {
            grid,
            greens,
            values,
            kpm,
            backend: backend.to_string(),
            overlap,
            diagnostics: MapDiagnostics::default(),
        })
    }

    /// Σ_interior dx·dy·C(ω).
    pub fn total_weight(&self) -> Complex<T> {
        let w = self.grid.dx() * self.grid.dy();
        (0..self.grid.len())
            .filter(|&k| self.grid.is_interior(k))
            .fold(czero::<T>(), |s, k| s + self.values[k])
            .scale(w)
    }

    /// Integrated weight inside a disk around `center`.
    pub fn disk_weight(&self, center: Complex<T>, radius: T) -> Complex<T> {
        let w = self.grid.dx() * self.grid.dy();
        (0..self.grid.len())
            .filter(|&k| self.grid.is_interior(k) && (self.grid.node(k) - center).norm() <= radius)
            .fold(czero::<T>(), |s, k| s + self.values[k])
            .scale(w)
    }

    /// max |C(ω*) − C(ω)*| / max |C| over interior nodes, or `None` if the grid
    /// is not symmetric about the real axis.
    pub fn symmetry_residual(&self) -> Option<T> {
        if !self.grid.is_reflection_symmetric() {
            return None;
        }
        let g = &self.grid;
        let cmax = self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        let mut res = T::zero();
        for j in 1..g.n_im - 1 {
            for i in 1..g.n_re - 1 {
                let a = self.values[g.index(i, j)];
                let b = self.values[g.index(i, g.n_im - 1 - j)];
                res = res.max((b - a.conj()).norm());
            }
        }
        Some(if cmax > T::zero() { res / cmax } else { res })
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }
}

/// (1/π)·½(∂_x + i∂_y) G by central differences; zero on the boundary ring.
fn d_dwbar<T: Real>(grid: &FrequencyGrid<T>, g: &[Complex<T>]) -> Vec<Complex<T>> {
    let (nx, ny) = (grid.n_re, grid.n_im);
    let (dx, dy) = (grid.dx(), grid.dy());
    let f = T::one() / (T::PI() * T::lit(2.0));
    let mut c = vec![czero::<T>(); g.len()];
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let gx = (g[j * nx + i + 1] - g[j * nx + i - 1]).unscale(dx + dx);
            let gy = (g[(j + 1) * nx + i] - g[(j - 1) * nx + i]).unscale(dy + dy);
            c[j * nx + i] = (gx + Complex::new(-gy.im, gy.re)).scale(f);
        }
    }
    c
}

/// Evaluates G at every node (in parallel, assembled by index) and differentiates.
pub fn spectral_map<T: Real, B: KpmBackend<T> + ?Sized>(
    backend: &B,
    grid: &FrequencyGrid<T>,
    kpm: &KpmParams<T>,
) -> Result<SpectralMap<T>> {
    grid.validate()?;
    kpm.validate()?;
    let nodes: Vec<usize> = (0..grid.len()).collect();
    let (greens, diag) = evaluate_nodes(backend, grid, kpm, &nodes)?;
    let mut map = SpectralMap::from_greens(*grid, greens, *kpm, backend.name(), backend.overlap())?;
    map.diagnostics = diag;
    Ok(map)
}

/// Like [`spectral_map`], but evaluates only the upper half of a grid that is
/// symmetric about the real axis and fills the rest from G(ω*) = G(ω)*.
/// That identity holds whenever 𝓛̃ commutes with complex conjugation combined
/// with the ket/bra swap and ψ_L, ψ_R are real and swap-invariant, as for the
/// autocorrelator of this model.
pub fn spectral_map_mirrored<T: Real, B: KpmBackend<T> + ?Sized>(
    backend: &B,
    grid: &FrequencyGrid<T>,
    kpm: &KpmParams<T>,
) -> Result<SpectralMap<T>> {
    grid.validate()?;
    kpm.validate()?;
    if !grid.is_reflection_symmetric() {
        return Err(Error::InvalidParameter("mirrored evaluation needs im_min = -im_max".into()));
    }
    let (nx, ny) = (grid.n_re, grid.n_im);
    let nodes: Vec<usize> = (ny / 2 * nx..grid.len()).collect();
    let (half, diag) = evaluate_nodes(backend, grid, kpm, &nodes)?;
    let mut greens = vec![czero::<T>(); grid.len()];
    for (&k, g) in nodes.iter().zip(half) {
        let (i, j) = (k % nx, k / nx);
        greens[k] = g;
        greens[grid.index(i, ny - 1 - j)] = g.conj();
    }
    let mut map = SpectralMap::from_greens(*grid, greens, *kpm, backend.name(), backend.overlap())?;
    map.diagnostics = diag;
    Ok(map)
}

fn evaluate_nodes<T: Real, B: KpmBackend<T> + ?Sized>(
    backend: &B,
    grid: &FrequencyGrid<T>,
    kpm: &KpmParams<T>,
    nodes: &[usize],
) -> Result<(Vec<Complex<T>>, MapDiagnostics<T>)> {
    let damping = jackson_coefficients::<T>(kpm.n_moments);
    let results: Vec<Result<(Complex<T>, T, usize)>> = nodes
        .par_iter()
        .map(|&idx| {
            let m = backend.moments(grid.node(idx), kpm)?;
            Ok((greens_with_damping(&m.mu, kpm.scale, &damping), m.max_truncation, m.max_bond))
        })
        .collect();
    let mut greens = Vec::with_capacity(nodes.len());
    let mut diag = MapDiagnostics { max_truncation: T::zero(), max_bond: 0 };
    for r in results {
        let (g, t, b) = r?;
        greens.push(g);
        diag.max_truncation = diag.max_truncation.max(t);
        diag.max_bond = diag.max_bond.max(b);
    }
    Ok((greens, diag))
}
