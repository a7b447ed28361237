use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Liouvillian, ModelParams};
use crate::observables::TimeSeries;
use crate::scalar::{abs2, czero, Real};

pub const MAX_RK4_SPINS: usize = 7;

#[derive(Clone, Debug)]
pub struct Rk4Run<T> {
    pub series: TimeSeries<T>,
    /// max_n |tr y_n − tr y_0|.
    pub trace_drift: T,
    /// max_n ‖y_n − y_n†‖_max.
    pub hermiticity_drift: T,
    pub step: T,
}

/// Integrates dy/dt = 𝓛[y] from y(0) = σᶻ_N ρ_s with classic RK4 and records
/// C(t_n) = tr(σᶻ_N y_n) at every step. The step is adjusted to divide the
/// horizon evenly.
pub fn rk4_autocorrelator<T: Real>(p: &ModelParams<T>, h: T, horizon: T) -> Result<Rk4Run<T>> {
    p.validate()?;
    if !(h > T::zero()) || !(horizon >= T::zero()) {
        return Err(Error::InvalidParameter("RK4 needs h > 0 and horizon >= 0".into()));
    }
    if p.n_spins > MAX_RK4_SPINS {
        return Err(Error::SizeLimit { dim: p.dim(), limit: 1 << MAX_RK4_SPINS });
    }
    let lv = Liouvillian::from_params(p)?;
    let d = p.dim();
    let steps = (horizon / h).ceil().to_usize().unwrap_or(0);
    let dt = if steps == 0 { h } else { horizon / T::from_usize_lossy(steps) };
    let zsign = |i: usize| if i & 1 == 0 { T::one() } else { -T::one() };
    let w = T::one() / T::from_usize_lossy(d);

    let mut y = vec![czero::<T>(); d * d];
    for i in 0..d {
        y[i * d + i] = Complex::new(zsign(i) * w, T::zero());
    }
    let trace = |y: &[Complex<T>]| (0..d).fold(czero::<T>(), |s, i| s + y[i * d + i]);
    let corr = |y: &[Complex<T>]| (0..d).fold(czero::<T>(), |s, i| s + y[i * d + i].scale(zsign(i)));
    let fro = |y: &[Complex<T>]| y.iter().map(|z| abs2(*z)).sum::<T>().sqrt();
    let tr0 = trace(&y);
    let n0 = fro(&y);

    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    values.push(corr(&y));
    let (mut trace_drift, mut herm_drift) = (T::zero(), T::zero());
    let (mut k1, mut k2, mut k3, mut k4) =
        (vec![czero(); d * d], vec![czero(); d * d], vec![czero(); d * d], vec![czero(); d * d]);
    let mut tmp = vec![czero::<T>(); d * d];
    let half = dt * T::lit(0.5);
    let sixth = dt / T::lit(6.0);
    for n in 1..=steps {
        lv.apply_into(&y, &mut k1);
        for i in 0..d * d {
            tmp[i] = y[i] + k1[i].scale(half);
        }
        lv.apply_into(&tmp, &mut k2);
        for i in 0..d * d {
            tmp[i] = y[i] + k2[i].scale(half);
        }
        lv.apply_into(&tmp, &mut k3);
        for i in 0..d * d {
            tmp[i] = y[i] + k3[i].scale(dt);
        }
        lv.apply_into(&tmp, &mut k4);
        for i in 0..d * d {
            y[i] = y[i] + (k1[i] + k2[i].scale(T::lit(2.0)) + k3[i].scale(T::lit(2.0)) + k4[i]).scale(sixth);
        }
        let nrm = fro(&y);
        if !nrm.is_finite() || nrm > T::lit(10.0) * n0 {
            return Err(Error::Unstable { h: dt.as_f64(), norm: nrm.as_f64(), suggested: dt.as_f64() / 4.0 });
        }
        trace_drift = trace_drift.max((trace(&y) - tr0).norm());
        for i in 0..d {
            for j in i + 1..d {
                herm_drift = herm_drift.max((y[i * d + j] - y[j * d + i].conj()).norm());
            }
            herm_drift = herm_drift.max(y[i * d + i].im.abs());
        }
        times.push(dt * T::from_usize_lossy(n));
        values.push(corr(&y));
    }
    Ok(Rk4Run { series: TimeSeries::new(times, values, "rk4")?, trace_drift, hermiticity_drift: herm_drift, step: dt })
}
