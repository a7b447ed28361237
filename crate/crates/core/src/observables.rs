//! Time-domain and projected observables reconstructed from spectral data.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::nhkpm::{
    estimate_scale_centered, spectral_map, spectral_map_mirrored, FrequencyGrid, KpmBackend, KpmParams, SpectralMap,
};
use crate::scalar::{czero, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries<T> {
    pub times: Vec<T>,
    pub values: Vec<Complex<T>>,
    pub source: String,
    pub warnings: Vec<String>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(times: Vec<T>, values: Vec<Complex<T>>, source: &str) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "time series",
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.first().is_some_and(|t| *t < T::zero()) {
            return Err(Error::InvalidParameter("times must be nonnegative and strictly increasing".into()));
        }
        Ok(Self { times, values, source: source.to_string(), warnings: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// max_t |C_self(t) − C_other(t)| over common samples.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }

    /// max |Im C| / max |C|.
    pub fn imag_ratio(&self) -> T {
        let m = self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        let i = self.values.iter().map(|z| z.im.abs()).fold(T::zero(), T::max);
        if m > T::zero() {
            i / m
        } else {
            T::zero()
        }
    }

    /// Least-squares slope of log|C(t)| over `t ∈ [t0, t1]`.
    pub fn log_slope(&self, t0: T, t1: T) -> Option<T> {
        let pts: Vec<(T, T)> = self
            .times
            .iter()
            .zip(&self.values)
            .filter(|(t, c)| **t >= t0 && **t <= t1 && c.norm() > T::zero())
            .map(|(t, c)| (*t, c.norm().ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = T::from_usize_lossy(pts.len());
        let mt = pts.iter().map(|p| p.0).sum::<T>() / n;
        let my = pts.iter().map(|p| p.1).sum::<T>() / n;
        let sxy: T = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
        let sxx: T = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
        (sxx > T::zero()).then(|| sxy / sxx)
    }
}

/// `n_samples` equally spaced times on [0, t_max]; a single t = 0 when t_max = 0.
pub fn uniform_times<T: Real>(t_max: T, n_samples: usize) -> Vec<T> {
    if t_max == T::zero() || n_samples < 2 {
        return vec![T::zero()];
    }
    let dt = t_max / T::from_usize_lossy(n_samples - 1);
    (0..n_samples).map(|k| dt * T::from_usize_lossy(k)).collect()
}

/// Allowed relative deviation of the integrated map weight from ⟨ψ_L|ψ_R⟩.
pub const COVERAGE_TOLERANCE: f64 = 0.03;

/// C(t) = Σ_interior dx·dy·e^{ωt} C(ω).
pub fn autocorrelator<T: Real>(map: &SpectralMap<T>, times: &[T]) -> Result<TimeSeries<T>> {
    let g = &map.grid;
    let w = g.dx() * g.dy();
    let nodes: Vec<(Complex<T>, Complex<T>)> = (0..g.len())
        .filter(|&k| g.is_interior(k) && map.values[k].norm() > T::zero())
        .map(|k| (g.node(k), map.values[k].scale(w)))
        .collect();
    let values: Vec<Complex<T>> =
        times.iter().map(|&t| nodes.iter().fold(czero::<T>(), |s, (om, c)| s + (om.scale(t)).exp() * c)).collect();
    let mut ts = TimeSeries::new(times.to_vec(), values, "nhkpm")?;
    let total = map.total_weight();
    if map.overlap.norm() > T::zero() {
        let captured = (total / map.overlap).re;
        if (captured - T::one()).abs() > T::lit(COVERAGE_TOLERANCE) {
            ts.warnings.push(format!(
                "grid captures {:.4} of the expected spectral weight; widen the grid",
                captured.as_f64()
            ));
        }
    }
    Ok(ts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedCorrelator<T> {
    pub gammas: Vec<T>,
    pub values: Vec<T>,
    /// max |Im C_P| / max |C_P| before discarding the imaginary part.
    pub imag_residual: T,
    /// Kernel width σ·a in Γ units, or zero when unknown.
    pub resolution: T,
    pub warnings: Vec<String>,
}

impl<T: Real> ProjectedCorrelator<T> {
    pub fn spacing(&self) -> T {
        if self.gammas.len() < 2 {
            T::zero()
        } else {
            self.gammas[1] - self.gammas[0]
        }
    }
}

/// C_P(Γ) = Σ_j C(Γ + i y_j) dy over the interior rows of each interior column.
pub fn project_map<T: Real>(map: &SpectralMap<T>) -> ProjectedCorrelator<T> {
    let g = &map.grid;
    let dy = g.dy();
    let mut gammas = Vec::with_capacity(g.n_re - 2);
    let mut raw = Vec::with_capacity(g.n_re - 2);
    for i in 1..g.n_re - 1 {
        let s = (1..g.n_im - 1).fold(czero::<T>(), |s, j| s + map.values[g.index(i, j)]).scale(dy);
        gammas.push(g.re_at(i));
        raw.push(s);
    }
    let m = raw.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let im = raw.iter().map(|z| z.im.abs()).fold(T::zero(), T::max);
    let mut warnings = Vec::new();
    if !g.is_reflection_symmetric() {
        warnings.push("vertical range is not symmetric about the real axis".into());
    }
    ProjectedCorrelator {
        gammas,
        values: raw.iter().map(|z| z.re).collect(),
        imag_residual: if m > T::zero() { im / m } else { T::zero() },
        resolution: map.kpm.resolution(),
        warnings,
    }
}

/// C_P on the real-axis points `gammas` (uniform spacing), integrating over
/// `n_im` nodes spanning `[im_min, im_max]`.
pub fn projected_correlator<T: Real, B: KpmBackend<T> + ?Sized>(
    backend: &B,
    gammas: &[T],
    im_range: (T, T, usize),
    kpm: &KpmParams<T>,
) -> Result<ProjectedCorrelator<T>> {
    if gammas.len() < 2 {
        return Err(Error::InvalidParameter("need at least two Γ values".into()));
    }
    let h = gammas[1] - gammas[0];
    let uniform = gammas.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= T::lit(1e-9) * h.abs().max(T::one()));
    if !uniform || !(h > T::zero()) {
        return Err(Error::InvalidParameter("Γ values must be increasing with uniform spacing".into()));
    }
    let n = gammas.len();
    let grid = FrequencyGrid::new(gammas[0] - h, gammas[n - 1] + h, im_range.0, im_range.1, n + 2, im_range.2)?;
    let map = if grid.is_reflection_symmetric() {
        spectral_map_mirrored(backend, &grid, kpm)?
    } else {
        spectral_map(backend, &grid, kpm)?
    };
    let mut cp = project_map(&map);
    cp.gammas = gammas.to_vec();
    Ok(cp)
}

/// One Γ-window projection: C_P on `gamma_min..=gamma_max` with step
/// `gamma_step`, integrating Im ω over `[-im_extent, im_extent]` with step
/// `im_step`. The moment count is chosen so that σ·a equals `resolution`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionPass<T> {
    pub gamma_min: T,
    pub gamma_max: T,
    pub gamma_step: T,
    pub im_extent: T,
    pub im_step: T,
    pub resolution: T,
}

impl<T: Real> ProjectionPass<T> {
    pub fn gammas(&self) -> Vec<T> {
        let n = ((self.gamma_max - self.gamma_min) / self.gamma_step).round().to_usize().unwrap_or(0) + 1;
        (0..n).map(|k| self.gamma_min + self.gamma_step * T::from_usize_lossy(k)).collect()
    }

    fn n_im(&self) -> usize {
        ((self.im_extent + self.im_extent) / self.im_step).round().to_usize().unwrap_or(0) + 1
    }

    /// Scale from the centred norm bound over the pass grid, and the matching moment count.
    pub fn kpm<B: KpmBackend<T> + ?Sized>(&self, backend: &B) -> Result<KpmParams<T>> {
        let grid = FrequencyGrid::new(
            self.gamma_min - self.gamma_step,
            self.gamma_max + self.gamma_step,
            -self.im_extent,
            self.im_extent,
            3,
            3,
        )?;
        let a = estimate_scale_centered(backend, &grid);
        let m = (T::PI() * a / self.resolution).ceil().to_usize().unwrap_or(0).max(crate::nhkpm::MIN_MOMENTS);
        KpmParams::new(m, a)
    }

    pub fn run<B: KpmBackend<T> + ?Sized>(&self, backend: &B) -> Result<(ProjectedCorrelator<T>, KpmParams<T>)> {
        let kpm = self.kpm(backend)?;
        let n_im = self.n_im();
        let cp = projected_correlator(backend, &self.gammas(), (-self.im_extent, self.im_extent, n_im), &kpm)?;
        Ok((cp, kpm))
    }
}

#[derive(Clone, Debug)]
pub struct RefinedRate<T> {
    pub coarse: RelaxationRate<T>,
    pub fine: RelaxationRate<T>,
    pub fine_pass: ProjectionPass<T>,
    pub fine_projection: ProjectedCorrelator<T>,
    pub fine_kpm: KpmParams<T>,
}

/// Second-pass settings for [`refined_relaxation_rate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Refinement<T> {
    pub step: T,
    pub resolution: T,
    /// The fine window spans the coarse peak ± this.
    pub half_width: T,
    pub im_step: T,
}

impl<T: Real> Refinement<T> {
    /// Window of 3 coarse widths (at least 5 fine steps) and an Im step of
    /// 1.5 fine widths, where the rectangle rule over a smoothed peak is
    /// accurate to about 1e-4. Merging at coarse resolution only moves a peak
    /// by about one width, so the window always contains the fine peak.
    pub fn around(coarse: &ProjectionPass<T>, step: T, resolution: T) -> Self {
        Self {
            step,
            resolution,
            half_width: (T::lit(3.0) * coarse.resolution).max(T::lit(5.0) * step),
            im_step: coarse.im_step.min(resolution * T::lit(1.5)),
        }
    }
}

/// Coarse pass over `coarse`, then a fine pass on the window around the
/// slowest coarse peak.
pub fn refined_relaxation_rate<T: Real, B: KpmBackend<T> + ?Sized>(
    backend: &B,
    coarse: &ProjectionPass<T>,
    fine: &Refinement<T>,
    opts: &PeakOptions<T>,
) -> Result<RefinedRate<T>> {
    let (cp, _) = coarse.run(backend)?;
    let rough = extract_relaxation_rate(&cp, opts)?;
    let centre = -rough.delta;
    let fine_pass = ProjectionPass {
        gamma_min: centre - fine.half_width,
        gamma_max: (centre + fine.half_width).min(-fine.step),
        gamma_step: fine.step,
        im_extent: coarse.im_extent,
        im_step: fine.im_step,
        resolution: fine.resolution,
    };
    let (fcp, fine_kpm) = fine_pass.run(backend)?;
    let fine = extract_relaxation_rate(&fcp, opts)?;
    Ok(RefinedRate { coarse: rough, fine, fine_pass, fine_projection: fcp, fine_kpm })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateMethod {
    ProjectedPeak,
    Eigenvalues,
}

impl RateMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::ProjectedPeak => "projected_peak",
            Self::Eigenvalues => "eigenvalues",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak<T> {
    pub position: Complex<T>,
    pub weight: Complex<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationRate<T> {
    pub delta: T,
    /// Retained peaks, sorted by decreasing real part.
    pub peaks: Vec<Peak<T>>,
    pub method: RateMethod,
    pub weight_threshold: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakOptions<T> {
    /// Peaks with |weight| below this are treated as quadrature residue.
    pub weight_threshold: T,
    /// Peaks lower than this fraction of the tallest are ignored.
    pub relative_height: T,
}

impl<T: Real> Default for PeakOptions<T> {
    fn default() -> Self {
        Self { weight_threshold: T::lit(1e-3), relative_height: T::lit(0.01) }
    }
}

/// Local maxima of C_P with 3-point quadratic refinement; Δ is |Γ| of the
/// retained peak with the largest Γ.
pub fn extract_relaxation_rate<T: Real>(
    cp: &ProjectedCorrelator<T>,
    opts: &PeakOptions<T>,
) -> Result<RelaxationRate<T>> {
    let y = &cp.values;
    let n = y.len();
    if n < 3 {
        return Err(Error::NoPeak("projected correlator has fewer than 3 points".into()));
    }
    let h = cp.spacing();
    let ymax = y.iter().copied().fold(T::zero(), T::max);
    let maxima: Vec<usize> =
        (1..n - 1).filter(|&k| y[k] > y[k - 1] && y[k] >= y[k + 1] && y[k] >= opts.relative_height * ymax).collect();
    let mut peaks = Vec::new();
    for (idx, &k) in maxima.iter().enumerate() {
        let denom = y[k - 1] - y[k] - y[k] + y[k + 1];
        let shift = if denom < T::zero() { (y[k - 1] - y[k + 1]) / (denom + denom) } else { T::zero() };
        let pos = cp.gammas[k] + h * shift;
        let (lo, hi) = if cp.resolution > T::zero() {
            // The smoothed peak has negative flanks out to about 4σa; integrate
            // ±5σa, stopping halfway to a neighbouring peak.
            let reach = ((T::lit(5.0) * cp.resolution) / h).ceil().to_usize().unwrap_or(0);
            let lo = idx.checked_sub(1).map_or(0, |p| (maxima[p] + k).div_ceil(2)).max(k.saturating_sub(reach));
            let hi = maxima.get(idx + 1).map_or(n - 1, |&q| (k + q) / 2).min(k + reach).min(n - 1);
            (lo, hi)
        } else {
            // Unknown kernel width: integrate between the neighbouring local minima.
            let mut lo = k;
            while lo > 0 && y[lo - 1] <= y[lo] {
                lo -= 1;
            }
            let mut hi = k;
            while hi + 1 < n && y[hi + 1] <= y[hi] {
                hi += 1;
            }
            (lo, hi)
        };
        let w: T = y[lo..=hi].iter().copied().sum::<T>() * h;
        if w.abs() < opts.weight_threshold {
            continue;
        }
        peaks.push(Peak { position: Complex::new(pos, T::zero()), weight: Complex::new(w, T::zero()) });
    }
    finish(peaks, RateMethod::ProjectedPeak, opts.weight_threshold)
}

pub fn extract_relaxation_rate_from_map<T: Real>(
    map: &SpectralMap<T>,
    opts: &PeakOptions<T>,
) -> Result<RelaxationRate<T>> {
    extract_relaxation_rate(&project_map(map), opts)
}

/// Δ from an explicit pole list: eigenvalues closer than `merge_tol` are merged
/// and clusters with |Σ weight| below `threshold` or at ω = 0 are dropped.
pub fn rate_from_poles<T: Real>(
    poles: &[Complex<T>],
    weights: &[Complex<T>],
    threshold: T,
    merge_tol: T,
) -> Result<RelaxationRate<T>> {
    let mut order: Vec<usize> = (0..poles.len()).collect();
    order.sort_by(|&a, &b| poles[b].re.partial_cmp(&poles[a].re).unwrap_or(std::cmp::Ordering::Equal));
    let mut clusters: Vec<(Complex<T>, Complex<T>, usize)> = Vec::new();
    for &k in &order {
        if let Some(c) = clusters.iter_mut().find(|c| (c.0 - poles[k]).norm() <= merge_tol) {
            c.1 = c.1 + weights[k];
            c.2 += 1;
        } else {
            clusters.push((poles[k], weights[k], 1));
        }
    }
    let zero_tol = merge_tol.max(T::lit(1e-8));
    let peaks: Vec<Peak<T>> = clusters
        .into_iter()
        .filter(|c| c.1.norm() >= threshold && c.0.norm() > zero_tol)
        .map(|c| Peak { position: c.0, weight: c.1 })
        .collect();
    finish(peaks, RateMethod::Eigenvalues, threshold)
}

fn finish<T: Real>(mut peaks: Vec<Peak<T>>, method: RateMethod, threshold: T) -> Result<RelaxationRate<T>> {
    peaks.sort_by(|a, b| b.position.re.partial_cmp(&a.position.re).unwrap_or(std::cmp::Ordering::Equal));
    let first = peaks.first().ok_or_else(|| Error::NoPeak("no peak above the weight threshold".into()))?;
    Ok(RelaxationRate { delta: first.position.re.abs(), peaks, method, weight_threshold: threshold })
}
