use std::time::Instant;

use nhkpm::io;
use nhkpm::linalg::{DenseMatrix, EigOptions};
use nhkpm::model::{apply_liouvillian, ModelParams};
use nhkpm::nhkpm::{
    chebyshev_moments_reference, estimate_scale_centered, greens_at_zero, jackson_coefficients, kernel_check,
    parity_sectors, spectral_map, spectral_map_mirrored, DenseBackend, FrequencyGrid, KpmBackend, KpmParams,
    MpsBackend, SpectralMap, KERNEL_CHECK_NAME, MIN_MOMENTS,
};
use nhkpm::observables::{
    autocorrelator, extract_relaxation_rate, project_map, projected_correlator, uniform_times, PeakOptions,
    ProjectedCorrelator, TimeSeries,
};
use nhkpm::oracles::{damping_autocorrelator, ed_spectrum, rk4_autocorrelator, MAX_ED_SPINS};
use nhkpm::tn::correlator_mps;
use nhkpm::vectorize::{build_transformed_liouvillian, correlator_vectors, vectorize, VectorizationBasis};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{BackendKind, RunConfig};
use crate::report::{Check, Diagnostics, Outputs, RunReport};
use crate::{Cli, CliError, Command, OracleKind};

/// Relative threshold on |G(ω*) − G(ω)*| for the spectrum spot-check.
const SYMMETRY_THRESHOLD: f64 = 1e-6;
/// Test hook: when set, `validate` checks deliberately corrupted kernel coefficients.
const CORRUPT_JACKSON_ENV: &str = "NHKPM_TEST_CORRUPT_JACKSON";
const VALIDATE_MOMENTS: usize = 1024;

type Res<T> = Result<T, CliError>;

enum BackendImpl {
    Dense(DenseBackend<f64>),
    Mps(MpsBackend<f64>),
}

struct Backend {
    imp: BackendImpl,
    /// Shift c of 𝓛̃ and Σ|coefficients| of 𝓛̃ − c, identical for both backends.
    center: (Complex64, f64),
}

impl Backend {
    fn build(cfg: &RunConfig, p: &ModelParams<f64>) -> Res<Self> {
        let basis = cfg.basis();
        let lt = build_transformed_liouvillian(p, basis)?;
        let center = (lt.shift, lt.centered_norm_bound());
        let imp = match cfg.backend {
            BackendKind::Dense => {
                let (l, r) = correlator_vectors(p.n_spins, basis)?;
                BackendImpl::Dense(DenseBackend::from_terms(&lt, &l, &r, &parity_sectors(p.n_spins, basis))?)
            }
            BackendKind::Mps => {
                let (l, r) = correlator_mps(p.n_spins)?;
                BackendImpl::Mps(MpsBackend::new(lt, l, r, cfg.truncation())?)
            }
        };
        Ok(Self { imp, center })
    }

    fn get(&self) -> &dyn KpmBackend<f64> {
        match &self.imp {
            BackendImpl::Dense(b) => b,
            BackendImpl::Mps(b) => b,
        }
    }
}

struct Run<'a> {
    cli: &'a Cli,
    cfg: &'a RunConfig,
    out: Outputs,
    diag: Diagnostics,
    checks: Vec<Check>,
    warnings: Vec<String>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Res<()> {
        Ok(self.out.write(name, bytes)?)
    }

    fn check(&mut self, name: &str, value: f64, tolerance: f64, detail: String) {
        let passed = value.is_finite() && value < tolerance;
        self.checks.push(Check { name: name.into(), passed, value, tolerance, detail });
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Spectrum => "spectrum".into(),
        Command::Dynamics { .. } => "dynamics".into(),
        Command::Project => "project".into(),
        Command::ZenoScan => "zeno-scan".into(),
        Command::Oracle { which } => format!("oracle {}", oracle_name(*which)),
        Command::Validate => "validate".into(),
    }
}

fn oracle_name(o: OracleKind) -> &'static str {
    match o {
        OracleKind::Ed => "ed",
        OracleKind::Rk4 => "rk4",
        OracleKind::Damping => "damping",
    }
}

/// Runs one command and always writes its report, also on failure.
pub fn run(cli: &Cli, cfg: &RunConfig, workers: usize) -> Res<()> {
    let start = Instant::now();
    let mut run = Run {
        cli,
        cfg,
        out: Outputs::new(&cfg.output_dir)?,
        diag: Diagnostics::default(),
        checks: Vec::new(),
        warnings: Vec::new(),
    };
    if cli.dump_terms {
        let p = cfg.params()?;
        eprint!("{}", build_transformed_liouvillian(&p, cfg.basis())?.dump());
    }
    let result = match &cli.command {
        Command::Spectrum => spectrum(&mut run),
        Command::Dynamics { oracle } => dynamics(&mut run, *oracle),
        Command::Project => project(&mut run),
        Command::ZenoScan => zeno_scan(&mut run),
        Command::Oracle { which } => oracle(&mut run, *which),
        Command::Validate => validate(&mut run),
    };
    let result = result.and_then(|()| {
        let failed: Vec<&str> = run.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invariant(format!("failed checks: {}", failed.join(", "))))
        }
    });
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    let report = RunReport {
        command: command_name(&cli.command),
        schema_version: cfg.schema_version,
        backend: match cfg.backend {
            BackendKind::Dense => "dense".into(),
            BackendKind::Mps => "mps".into(),
        },
        workers,
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.clone(),
        diagnostics: run.diag,
        checks: run.checks,
        warnings: run.warnings,
        files: Vec::new(),
        error: result.as_ref().err().map(|e| e.message().to_string()),
    };
    let path = run.out.finish(report)?;
    eprintln!("report: {}", path.display());
    result
}

fn csv<F: FnOnce(&mut Vec<u8>) -> nhkpm::Result<()>>(f: F) -> Res<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// 1.1·(max corner |ω − c| + ‖𝓛̃ − c‖ bound) from the term list, so that both
/// backends get the same default scale and their outputs compare directly.
fn kpm_for(cfg: &RunConfig, be: &Backend, grid: &FrequencyGrid<f64>, n_moments: usize) -> Res<KpmParams<f64>> {
    let scale = cfg.kpm.scale.unwrap_or_else(|| {
        let (c, bound) = be.center;
        let corners = [
            (grid.re_min, grid.im_min),
            (grid.re_min, grid.im_max),
            (grid.re_max, grid.im_min),
            (grid.re_max, grid.im_max),
        ];
        let far = corners.iter().map(|&(x, y)| (Complex64::new(x, y) - c).norm()).fold(0.0, f64::max);
        1.1 * (far + bound)
    });
    Ok(KpmParams::new(n_moments, scale)?)
}

fn map_on(
    cfg: &RunConfig,
    be: &dyn KpmBackend<f64>,
    grid: &FrequencyGrid<f64>,
    kpm: &KpmParams<f64>,
) -> Res<SpectralMap<f64>> {
    Ok(if cfg.kpm.mirror && grid.is_reflection_symmetric() {
        spectral_map_mirrored(be, grid, kpm)?
    } else {
        spectral_map(be, grid, kpm)?
    })
}

/// Map on the configured grid with diagnostics and the conjugation spot-check.
fn main_map(run: &mut Run, be: &Backend) -> Res<SpectralMap<f64>> {
    let grid = run.cfg.frequency_grid()?;
    let kpm = kpm_for(run.cfg, be, &grid, run.cfg.kpm.n_moments)?;
    let map = map_on(run.cfg, be.get(), &grid, &kpm)?;
    record_map(run, &map);
    symmetry_spot_check(run, be.get(), &map)?;
    Ok(map)
}

fn record_map(run: &mut Run, map: &SpectralMap<f64>) {
    run.diag.n_moments = Some(map.kpm.n_moments);
    run.diag.scale = Some(map.kpm.scale);
    run.diag.resolution = Some(map.kpm.resolution());
    run.diag.max_truncation = Some(map.diagnostics.max_truncation);
    run.diag.max_bond = Some(map.diagnostics.max_bond);
    if map.overlap.norm() > 0.0 {
        let captured = (map.total_weight() / map.overlap).re;
        run.diag.captured_weight = Some(captured);
        if (captured - 1.0).abs() > nhkpm::observables::COVERAGE_TOLERANCE {
            run.warnings.push(format!("grid captures {captured:.4} of the expected spectral weight; widen the grid"));
        }
    }
    let h = map.grid.dx().max(map.grid.dy());
    // Beyond 1.5σa the rectangle rule no longer resolves a smoothed pole.
    if h > 1.5 * map.kpm.resolution() {
        run.warnings.push(format!(
            "grid spacing {h:.4} exceeds 1.5 kernel widths (σa = {:.4}); refine the grid or lower n_moments",
            map.kpm.resolution()
        ));
    }
}

/// Evaluates G directly at up to four nodes and compares with the map value
/// at the mirrored node. A mirrored map is checked against fresh evaluations
/// in the half it filled by conjugation.
fn symmetry_spot_check(run: &mut Run, be: &dyn KpmBackend<f64>, map: &SpectralMap<f64>) -> Res<()> {
    let g = &map.grid;
    if !g.is_reflection_symmetric() {
        run.warnings.push("grid is not symmetric about the real axis; conjugation check skipped".into());
        return Ok(());
    }
    let (nx, ny) = (g.n_re, g.n_im);
    let nodes: Vec<(usize, usize)> = (1..=4).map(|k| (k * (nx - 1) / 5, (k * (ny / 2)) / 5)).collect();
    let direct: Vec<nhkpm::Result<Complex64>> = nodes
        .par_iter()
        .map(|&(i, j)| be.moments(g.node(g.index(i, j)), &map.kpm).map(|m| greens_at_zero(&m.mu, &map.kpm)))
        .collect();
    let gmax = map.greens.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut res: f64 = 0.0;
    for (&(i, j), d) in nodes.iter().zip(direct) {
        let mirror = map.greens[g.index(i, ny - 1 - j)];
        res = res.max((d? - mirror.conj()).norm());
    }
    let rel = if gmax > 0.0 { res / gmax } else { res };
    run.diag.symmetry_residual = Some(rel);
    run.check(
        "symmetry.conjugation",
        rel,
        SYMMETRY_THRESHOLD,
        "max |G(ω) − G(ω*)*| / max |G| at 4 sampled nodes".into(),
    );
    Ok(())
}

/// Second map on the `--refine` window at the same node count, with M raised
/// so that σa keeps its ratio to the grid spacing.
fn refined_map(run: &mut Run, be: &Backend, main: &SpectralMap<f64>) -> Res<Option<SpectralMap<f64>>> {
    let Some([r0, r1, i0, i1]) = run.cli.refine else { return Ok(None) };
    let grid = FrequencyGrid::new(r0, r1, i0, i1, main.grid.n_re, main.grid.n_im)?;
    let spacing = |g: &FrequencyGrid<f64>| g.dx().max(g.dy());
    let resolution = main.kpm.resolution() * spacing(&grid) / spacing(&main.grid);
    let probe = kpm_for(run.cfg, be, &grid, MIN_MOMENTS)?;
    let m = ((std::f64::consts::PI * probe.scale / resolution).ceil() as usize).max(MIN_MOMENTS);
    let kpm = KpmParams::new(m, probe.scale)?;
    run.diag.refined_n_moments = Some(m);
    Ok(Some(map_on(run.cfg, be.get(), &grid, &kpm)?))
}

/// Projection pass on the `--refine` window: the same number of Γ points,
/// σa shrunk with the Γ step, and an Im step of at most 1.5σa so the column
/// sums stay accurate.
fn refined_projection(run: &mut Run, be: &Backend, main: &SpectralMap<f64>) -> Res<Option<ProjectedCorrelator<f64>>> {
    let Some([r0, r1, i0, i1]) = run.cli.refine else { return Ok(None) };
    let n = main.grid.n_re - 2;
    let step = (r1 - r0) / (n - 1) as f64;
    let resolution = main.kpm.resolution() * step / main.grid.dx();
    let n_im = (((i1 - i0) / (1.5 * resolution).min(main.grid.dy())).ceil() as usize + 1).max(3);
    let window = FrequencyGrid::new(r0 - step, r1 + step, i0, i1, n + 2, n_im)?;
    let probe = kpm_for(run.cfg, be, &window, MIN_MOMENTS)?;
    let m = ((std::f64::consts::PI * probe.scale / resolution).ceil() as usize).max(MIN_MOMENTS);
    let kpm = KpmParams::new(m, probe.scale)?;
    run.diag.refined_n_moments = Some(m);
    let gammas: Vec<f64> = (0..n).map(|k| r0 + step * k as f64).collect();
    Ok(Some(projected_correlator(be.get(), &gammas, (i0, i1, n_im), &kpm)?))
}

fn bond_profile(run: &mut Run, be: &Backend, grid: &FrequencyGrid<f64>, kpm: &KpmParams<f64>) -> Res<()> {
    if let BackendImpl::Mps(mps) = &be.imp {
        let mut rec = mps.clone();
        rec.record_bonds = true;
        let node = grid.node(grid.index(grid.n_re / 2, grid.n_im / 2));
        let m = rec.moments(node, kpm)?;
        let bytes = csv(|w| io::write_bond_profile(&m.bond_profile, w))?;
        run.write("bond_profile.csv", &bytes)?;
    }
    Ok(())
}

fn spectrum(run: &mut Run) -> Res<()> {
    let p = run.cfg.params()?;
    let be = Backend::build(run.cfg, &p)?;
    let map = main_map(run, &be)?;
    run.write("spectrum.csv", &csv(|w| io::write_spectral_map(&map, w))?)?;
    if run.cli.svg {
        let (svg, vmax) = io::spectral_map_svg(&map);
        run.diag.svg_scale_max = Some(vmax);
        run.write("spectrum.svg", svg.as_bytes())?;
    }
    if let Some(fine) = refined_map(run, &be, &map)? {
        run.write("spectrum_refined.csv", &csv(|w| io::write_spectral_map(&fine, w))?)?;
    }
    bond_profile(run, &be, &map.grid, &map.kpm)
}

/// Runs RK4 with a step that divides the sample spacing and keeps every sample.
fn rk4_on(cfg: &RunConfig, p: &ModelParams<f64>, times: &[f64]) -> Res<TimeSeries<f64>> {
    let t_max = *times.last().unwrap_or(&0.0);
    if times.len() < 2 || t_max == 0.0 {
        return Ok(rk4_autocorrelator(p, cfg.rk4.step, 0.0)?.series);
    }
    let dt = times[1] - times[0];
    let sub = (dt / cfg.rk4.step).ceil().max(1.0) as usize;
    // Slightly enlarged so that the oracle's ceil(horizon / h) lands on the exact count.
    let run = rk4_autocorrelator(p, dt / sub as f64 * (1.0 + 1e-9), t_max)?;
    if run.series.len() != (times.len() - 1) * sub + 1 {
        return Err(CliError::Invariant(format!(
            "RK4 produced {} steps, expected {}",
            run.series.len(),
            (times.len() - 1) * sub + 1
        )));
    }
    let values = run.series.values.iter().step_by(sub).copied().collect();
    Ok(TimeSeries::new(times.to_vec(), values, "rk4")?)
}

fn oracle_series(run: &mut Run, p: &ModelParams<f64>, which: OracleKind, times: &[f64]) -> Res<TimeSeries<f64>> {
    match which {
        OracleKind::Ed => Ok(ed_spectrum(p, EigOptions::default())?.correlator(times)?),
        OracleKind::Rk4 => rk4_on(run.cfg, p, times),
        OracleKind::Damping => {
            let (ts, spec) = damping_autocorrelator(p, times)?;
            run.write("damping_spectrum.csv", &csv(|w| io::write_damping_spectrum(&spec, w))?)?;
            let rate = spec.relaxation_rate(1e-3)?;
            run.diag.delta = Some(rate.delta);
            Ok(ts)
        }
    }
}

fn dynamics(run: &mut Run, overlay: Option<OracleKind>) -> Res<()> {
    let p = run.cfg.params()?;
    let be = Backend::build(run.cfg, &p)?;
    let map = main_map(run, &be)?;
    let times = uniform_times(run.cfg.times.t_max, run.cfg.times.n_samples);
    let ts = autocorrelator(&map, &times)?;
    let ratio = ts.imag_ratio();
    if ratio > 1e-3 {
        run.warnings.push(format!("C(t) has a relative imaginary part of {ratio:.2e}"));
    }
    let bytes = match overlay {
        None => csv(|w| io::write_time_series(&ts, w))?,
        Some(which) => {
            let reference = oracle_series(run, &p, which, &times)?;
            let dev = ts.max_abs_diff(&reference);
            run.diag.oracle_deviation = Some(dev);
            let name = oracle_name(which);
            let mut s = format!("t,re_C,im_C,re_C_{name},im_C_{name}\n");
            for ((t, a), b) in times.iter().zip(&ts.values).zip(&reference.values) {
                s.push_str(&format!("{t},{},{},{},{}\n", a.re, a.im, b.re, b.im));
            }
            s.into_bytes()
        }
    };
    run.write("ct.csv", &bytes)
}

/// Δ, or a message that names the likely cause when C_P peaks at the grid edge.
fn rate_or_reason(cp: &ProjectedCorrelator<f64>) -> Result<f64, String> {
    extract_relaxation_rate(cp, &PeakOptions::default()).map(|r| r.delta).map_err(|e| {
        let first = cp.values.first().copied().unwrap_or(0.0);
        if cp.values.iter().all(|&v| v <= first) {
            format!("{e}; C_P is largest at Γ = {}, lower re_min", cp.gammas[0])
        } else {
            e.to_string()
        }
    })
}

fn record_rate(run: &mut Run, cp: &ProjectedCorrelator<f64>) {
    run.warnings.extend(cp.warnings.iter().cloned());
    match rate_or_reason(cp) {
        Ok(delta) => run.diag.delta = Some(delta),
        Err(e) => run.warnings.push(e),
    }
}

fn project(run: &mut Run) -> Res<()> {
    let p = run.cfg.params()?;
    let be = Backend::build(run.cfg, &p)?;
    let map = main_map(run, &be)?;
    let cp = project_map(&map);
    record_rate(run, &cp);
    run.write("projected.csv", &csv(|w| io::write_projected(&cp, w))?)?;
    if let Some(fcp) = refined_projection(run, &be, &map)? {
        match rate_or_reason(&fcp) {
            Ok(delta) => run.diag.delta = Some(delta),
            Err(e) => run.warnings.push(format!("refined window: {e}")),
        }
        run.write("projected_refined.csv", &csv(|w| io::write_projected(&fcp, w))?)?;
    }
    Ok(())
}

fn zeno_scan(run: &mut Run) -> Res<()> {
    let Some(gammas) = run.cfg.gammas() else {
        return Err(CliError::Config("zeno-scan needs a [gamma_scan] section".into()));
    };
    if gammas.len() == 1 {
        let mut cfg = run.cfg.clone();
        cfg.model.gamma = gammas[0];
        let mut single = Run {
            cli: run.cli,
            cfg: &cfg,
            out: Outputs::new(&cfg.output_dir)?,
            diag: Diagnostics::default(),
            checks: Vec::new(),
            warnings: Vec::new(),
        };
        let r = project(&mut single);
        run.out.files.append(&mut single.out.files);
        run.diag = single.diag;
        run.checks.append(&mut single.checks);
        run.warnings.append(&mut single.warnings);
        return r;
    }
    let grid = run.cfg.frequency_grid()?;
    let cfg = run.cfg;
    let scans: Vec<Res<(ProjectedCorrelator<f64>, KpmParams<f64>)>> = gammas
        .par_iter()
        .map(|&g| {
            let p = cfg.params_with_gamma(g)?;
            let be = Backend::build(cfg, &p)?;
            let kpm = kpm_for(cfg, &be, &grid, cfg.kpm.n_moments)?;
            Ok((project_map(&map_on(cfg, be.get(), &grid, &kpm)?), kpm))
        })
        .collect();
    let mut rows = String::from("gamma,gamma_axis,value\n");
    let mut deltas = String::from("gamma,delta\n");
    for (&g, scan) in gammas.iter().zip(scans) {
        let (cp, kpm) = scan?;
        run.diag.n_moments = Some(kpm.n_moments);
        run.diag.scale = Some(run.diag.scale.map_or(kpm.scale, |a: f64| a.max(kpm.scale)));
        run.diag.resolution = Some(run.diag.resolution.map_or(kpm.resolution(), |r: f64| r.max(kpm.resolution())));
        for (x, v) in cp.gammas.iter().zip(&cp.values) {
            rows.push_str(&format!("{g},{x},{v}\n"));
        }
        match rate_or_reason(&cp) {
            Ok(delta) => deltas.push_str(&format!("{g},{delta}\n")),
            Err(e) => {
                run.warnings.push(format!("γ = {g}: {e}"));
                deltas.push_str(&format!("{g},NaN\n"));
            }
        }
    }
    run.write("cp_scan.csv", rows.as_bytes())?;
    run.write("delta_vs_gamma.csv", deltas.as_bytes())
}

fn oracle(run: &mut Run, which: OracleKind) -> Res<()> {
    let p = run.cfg.params()?;
    let times = uniform_times(run.cfg.times.t_max, run.cfg.times.n_samples);
    let ts = oracle_series(run, &p, which, &times)?;
    if which == OracleKind::Ed {
        let rate = ed_spectrum(&p, EigOptions::default())?.relaxation_rate(1e-3)?;
        run.diag.delta = Some(rate.delta);
    }
    let name = format!("ct_{}.csv", oracle_name(which));
    run.write(&name, &csv(|w| io::write_time_series(&ts, w))?)
}

/// Deterministic dense test matrix with O(1) entries.
fn probe_matrix(d: usize, seed: f64) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(d, d, |i, j| {
        let (x, y) = (i as f64, j as f64);
        Complex64::new((1.3 * x + 2.1 * y + seed).sin(), (0.9 * x - 1.7 * y + 0.5 * seed).cos())
    })
}

fn validate(run: &mut Run) -> Res<()> {
    let cfg = run.cfg;
    let p = cfg.params()?;
    let n = p.n_spins;

    let mut damping = jackson_coefficients::<f64>(VALIDATE_MOMENTS);
    if std::env::var_os(CORRUPT_JACKSON_ENV).is_some_and(|v| !v.is_empty() && v != "0") {
        damping[3] *= 1.5;
        run.warnings.push(format!("{CORRUPT_JACKSON_ENV} is set: kernel coefficients deliberately corrupted"));
    }
    let k = kernel_check(&damping);
    run.check(
        KERNEL_CHECK_NAME,
        k.dawson_relative_deviation.max(k.pv_quadrature_deviation * 1e5),
        1e-3,
        format!(
            "M = {VALIDATE_MOMENTS}: smoothed vs Dawson rel dev {:.2e} (< 1e-3), PV coefficients vs quadrature {:.2e} (< 1e-8)",
            k.dawson_relative_deviation, k.pv_quadrature_deviation
        ),
    );

    if n > MAX_ED_SPINS {
        run.warnings.push(format!(
            "N = {n} > {MAX_ED_SPINS}: only the kernel check runs; the full suite needs N ≤ {MAX_ED_SPINS}"
        ));
        return Ok(());
    }
    let d = 1usize << n;

    let mut tr: f64 = 0.0;
    let mut eq: f64 = 0.0;
    for s in 0..4 {
        let rho = probe_matrix(d, s as f64);
        let want = apply_liouvillian(&p, &rho)?;
        tr = tr.max(want.trace().norm());
        for basis in [VectorizationBasis::Permuted, VectorizationBasis::Naive] {
            let l = build_transformed_liouvillian(&p, basis)?.to_sparse()?;
            let got = l.matvec(&vectorize(&rho, basis)?)?;
            eq = eq.max(got.max_abs_diff(&vectorize(&want, basis)?));
        }
    }
    run.check("model.trace_preservation", tr, 1e-12, "max |tr 𝓛[ρ]| over 4 probe matrices".into());
    run.check("vectorize.equivalence", eq, 1e-12, "max |𝓛̃ vec ρ − vec 𝓛[ρ]|, both bases, 4 probe matrices".into());

    let basis = cfg.basis();
    let lt = build_transformed_liouvillian(&p, basis)?;
    let (l, r) = correlator_vectors(n, basis)?;
    let be = DenseBackend::from_terms(&lt, &l, &r, &parity_sectors(n, basis))?;
    let g = &cfg.grid;
    let im = g.im_min.abs().max(g.im_max.abs());
    let grid = FrequencyGrid::new(g.re_min, g.re_max, -im, im, 9, 9)?;
    let kpm = KpmParams::new(cfg.kpm.n_moments.min(256), estimate_scale_centered(&be, &grid))?;
    let sym = spectral_map(&be, &grid, &kpm)?.symmetry_residual().unwrap_or(f64::INFINITY);
    run.check("symmetry.conjugation", sym, 1e-6, format!("unmirrored 9 × 9 map, M = {}", kpm.n_moments));

    let op = lt.to_sparse()?;
    let mut even: f64 = 0.0;
    for w in [Complex64::new(grid.re_at(3), grid.im_at(6)), Complex64::new(grid.re_at(6), grid.im_at(1))] {
        let mu = chebyshev_moments_reference(w, &op, &l, &r, &kpm)?;
        let mx = mu.iter().map(|z| z.norm()).fold(0.0, f64::max);
        even = mu.iter().step_by(2).map(|z| z.norm() / mx).fold(even, f64::max);
    }
    run.check("nhkpm.even_moments", even, 1e-10, "max |μ_2k| / max |μ| from the unsplit recursion at 2 nodes".into());

    let horizon = cfg.times.t_max.min(5.0);
    let rk = rk4_autocorrelator(&p, cfg.rk4.step, horizon)?;
    let ed = ed_spectrum(&p, EigOptions::default())?;
    let dev = rk.series.max_abs_diff(&ed.correlator(&rk.series.times)?);
    run.check("oracle.ed_vs_rk4", dev, 1e-6, format!("max_t |C_RK4 − C_ED| on [0, {horizon}], h = {}", rk.step));
    run.check("oracle.rk4_trace_drift", rk.trace_drift, 1e-9, "max_n |tr y_n − tr y_0|".into());
    if p.jz == 0.0 {
        let times = uniform_times(cfg.times.t_max, cfg.times.n_samples);
        let (dm, _) = damping_autocorrelator(&p, &times)?;
        let dev = dm.max_abs_diff(&ed.correlator(&times)?);
        run.check("oracle.damping_vs_ed", dev, 1e-8, format!("max_t |C_damping − C_ED| on [0, {}]", cfg.times.t_max));
    } else {
        run.warnings.push("Jz ≠ 0: damping-matrix cross-check skipped (quadratic models only)".into());
    }
    run.diag.delta = Some(ed.relaxation_rate(1e-3)?.delta);
    Ok(())
}
