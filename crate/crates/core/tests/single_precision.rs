use nhkpm::model::ModelParams;
use nhkpm::nhkpm::{
    chebyshev_moments, estimate_scale_centered, parity_sectors, DenseBackend, FrequencyGrid, KpmParams,
};
use nhkpm::vectorize::{build_transformed_liouvillian, correlator_vectors, VectorizationBasis::Permuted};
use nhkpm::C32;

fn moments<T: nhkpm::Real>(m: usize) -> Vec<num_complex::Complex<T>> {
    let p = ModelParams::new(2, T::lit(0.75), T::lit(0.5), T::zero(), T::lit(0.13), T::lit(0.2)).unwrap();
    let lt = build_transformed_liouvillian(&p, Permuted).unwrap();
    let (l, r) = correlator_vectors(2, Permuted).unwrap();
    let be = DenseBackend::from_terms(&lt, &l, &r, &parity_sectors(2, Permuted)).unwrap();
    let grid = FrequencyGrid::new(T::lit(-1.0), T::lit(0.2), T::lit(-2.0), T::lit(2.0), 3, 3).unwrap();
    let kpm = KpmParams::new(m, estimate_scale_centered(&be, &grid)).unwrap();
    chebyshev_moments(&be, num_complex::Complex::new(T::lit(-0.4), T::lit(1.0)), &kpm).unwrap().mu
}

#[test]
fn f32_moments_track_f64() {
    let single: Vec<C32> = moments::<f32>(64);
    let double = moments::<f64>(64);
    for (s, d) in single.iter().zip(&double) {
        assert!((s.re as f64 - d.re).abs() < 1e-4 && (s.im as f64 - d.im).abs() < 1e-4);
    }
}
