mod common;

use common::{c, random_params, rng};
use nhkpm::linalg::{eigenvalues, EigOptions};
use nhkpm::model::ModelParams;
use nhkpm::observables::uniform_times;
use nhkpm::oracles::{damping_autocorrelator, ed_spectrum, rk4_autocorrelator, DampingMatrix, MajoranaQuadratic};
use nhkpm::Error;

fn params(n: usize, jx: f64, jy: f64, jz: f64, b: f64, g: f64) -> ModelParams<f64> {
    ModelParams::new(n, jx, jy, jz, b, g).unwrap()
}

#[test]
fn ed_calibration() {
    for n in [2, 4] {
        let ed = ed_spectrum(&params(n, 0.75, 0.5, 0.3, 0.13, 0.2), EigOptions::default()).unwrap();
        let c0 = ed.correlator(&[0.0]).unwrap().values[0];
        assert!((c0 - c(1., 0.)).norm() < 1e-10, "N = {n}: C(0) = {c0}");
    }
}

#[test]
fn ed_size_limit() {
    assert!(matches!(
        ed_spectrum(&params(6, 1.0, 1.0, 0.0, 0.0, 0.1), EigOptions::default()),
        Err(Error::SizeLimit { .. })
    ));
}

#[test]
fn ed_and_rk4_agree() {
    for p in [params(4, 0.75, 0.5, 0.0, 0.25, 0.2), params(4, 0.75, 0.5, 0.6, 0.0, 0.4)] {
        let run = rk4_autocorrelator(&p, 1e-3, 5.0).unwrap();
        let ed = ed_spectrum(&p, EigOptions::default()).unwrap().correlator(&run.series.times).unwrap();
        let dev = run.series.max_abs_diff(&ed);
        assert!(dev < 1e-6, "max deviation {dev}");
        assert!(run.trace_drift < 1e-9 && run.hermiticity_drift < 1e-9);
    }
}

#[test]
fn rk4_is_fourth_order() {
    // Odd N is outside the model; N = 2 and 4 bracket it.
    for p in [params(2, 0.75, 0.5, 0.0, 0.25, 0.2), params(4, 0.75, 0.5, 0.3, 0.13, 0.3)] {
        let horizon = 4.0;
        let exact = ed_spectrum(&p, EigOptions::default()).unwrap();
        let err = |h: f64| {
            let run = rk4_autocorrelator(&p, h, horizon).unwrap();
            run.series.max_abs_diff(&exact.correlator(&run.series.times).unwrap())
        };
        let ratio = err(0.1) / err(0.05);
        assert!((12.0..=20.0).contains(&ratio), "N = {}: ratio {ratio}", p.n_spins);
    }
}

#[test]
fn rk4_step_divides_horizon() {
    let run = rk4_autocorrelator(&params(2, 0.75, 0.5, 0.0, 0.0, 0.2), 0.3, 1.0).unwrap();
    assert_eq!(run.series.len(), 5);
    assert!((run.step - 0.25).abs() < 1e-15);
    assert!((run.series.times.last().unwrap() - 1.0).abs() < 1e-14);
    let zero = rk4_autocorrelator(&params(2, 0.75, 0.5, 0.0, 0.0, 0.2), 0.1, 0.0).unwrap();
    assert_eq!(zero.series.len(), 1);
    assert!(rk4_autocorrelator(&params(2, 0.75, 0.5, 0.0, 0.0, 0.2), 0.0, 1.0).is_err());
    assert!(rk4_autocorrelator(&params(8, 0.75, 0.5, 0.0, 0.0, 0.2), 0.1, 1.0).is_err());
}

#[test]
fn closed_dynamics_is_bounded() {
    let p = params(4, 0.75, 0.5, 0.0, 0.13, 0.0);
    let run = rk4_autocorrelator(&p, 0.01, 10.0).unwrap();
    assert!(run.series.values.iter().all(|z| z.norm() <= 1.0 + 1e-9));
    assert!(run.trace_drift < 1e-9 && run.hermiticity_drift < 1e-9);
    let ed = ed_spectrum(&p, EigOptions::default()).unwrap();
    assert!(ed.eigenvalues.iter().all(|z| z.re.abs() < 1e-9));
}

#[test]
fn drifts_stay_small() {
    let mut r = rng(51);
    for _ in 0..5 {
        let p = random_params(4, &mut r);
        let run = rk4_autocorrelator(&p, 0.01, 3.0).unwrap();
        assert!(run.trace_drift < 1e-9, "{}", run.trace_drift);
        assert!(run.hermiticity_drift < 1e-9);
        assert!(run.series.imag_ratio() < 1e-9);
    }
}

#[test]
fn damping_matches_ed() {
    let mut r = rng(52);
    let mut cases = vec![
        params(4, 0.75, 0.5, 0.0, 0.0, 0.2),
        params(4, 0.75, 0.5, 0.0, 0.25, 0.2),
        params(2, 0.3, 0.9, 0.0, 0.4, 0.7),
    ];
    for _ in 0..3 {
        let mut p = random_params(4, &mut r);
        p.jz = 0.0;
        cases.push(p);
    }
    let times = uniform_times(20.0, 201);
    for p in cases {
        let (damp, spec) = damping_autocorrelator(&p, &times).unwrap();
        let ed = ed_spectrum(&p, EigOptions::default()).unwrap().correlator(&times).unwrap();
        let dev = damp.max_abs_diff(&ed);
        assert!(dev < 1e-8, "{p:?}: {dev}");
        assert!((damp.values[0] - c(1., 0.)).norm() < 1e-10);
        let total: num_complex::Complex64 = spec.weights.iter().sum();
        assert!((total - c(1., 0.)).norm() < 1e-10);
    }
}

#[test]
fn damping_rate_matches_ed_rate() {
    for b in [0.0, 0.13, 0.25] {
        let p = params(4, 0.75, 0.5, 0.0, b, 0.2);
        let dm = DampingMatrix::new(&p).unwrap().spectrum().unwrap().relaxation_rate(1e-3).unwrap();
        let ed = ed_spectrum(&p, EigOptions::default()).unwrap().relaxation_rate(1e-3).unwrap();
        assert!((dm.delta - ed.delta).abs() < 1e-8, "B = {b}: {} vs {}", dm.delta, ed.delta);
    }
}

#[test]
fn damping_spectrum_in_left_half_plane() {
    let mut r = rng(53);
    for n in [2, 4, 6, 10] {
        let mut p = random_params(n, &mut r);
        p.jz = 0.0;
        let dm = DampingMatrix::new(&p).unwrap();
        assert!(dm.eigen.eigenvalues.iter().all(|z| z.re <= 1e-10));
        if n <= 4 {
            // The antisymmetric block carries part of the full spectrum.
            let full = eigenvalues(&dm.x_matrix().unwrap(), EigOptions { dense_limit: usize::MAX }).unwrap();
            assert!(full.iter().all(|z| z.re <= 1e-10));
            for z in &dm.eigen.eigenvalues {
                assert!(full.iter().any(|w| (w - z).norm() < 1e-7));
            }
        }
    }
    let closed = DampingMatrix::new(&params(6, 0.75, 0.5, 0.0, 0.1, 0.0)).unwrap();
    assert!(closed.eigen.eigenvalues.iter().all(|z| z.re.abs() < 1e-10));
}

#[test]
fn damping_needs_quadratic_model() {
    match DampingMatrix::new(&params(4, 0.75, 0.5, 0.6, 0.0, 0.2)) {
        Err(Error::Unsupported(msg)) => assert!(msg.contains("Jz = 0")),
        other => panic!("expected Unsupported, got {other:?}"),
    }
}

#[test]
fn majorana_trace_normalization() {
    for n in [2, 4, 8] {
        let s = MajoranaQuadratic::<f64>::sigma_z(n - 1, n);
        assert!((s.normalized_trace_product(&s) - c(1., 0.)).norm() < 1e-15);
        let other = MajoranaQuadratic::<f64>::sigma_z(0, n);
        assert!(s.normalized_trace_product(&other).norm() < 1e-15);
    }
    let mut sym = MajoranaQuadratic::<f64>::sigma_z(0, 2).o;
    sym[(2, 0)] = c(2., 0.);
    assert!(MajoranaQuadratic::new(sym).is_err());
}

#[test]
fn overlap_magnitudes_cover_weights() {
    let p = params(8, 0.75, 0.5, 0.0, 0.02, 0.2);
    let spec = DampingMatrix::new(&p).unwrap().spectrum().unwrap();
    assert_eq!(spec.overlap_magnitudes.len(), spec.eigenvalues.len());
    assert!(spec.overlap_magnitudes.iter().all(|m| m.is_finite() && *m >= 0.0));
    let rate = spec.relaxation_rate(1e-3).unwrap();
    assert!(rate.delta > 0.0);
}
