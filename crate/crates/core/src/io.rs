//! CSV and SVG writers. Numbers use Rust's shortest round-trip formatting, so
//! identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::nhkpm::SpectralMap;
use crate::observables::{ProjectedCorrelator, TimeSeries};
use crate::oracles::DampingSpectrum;
use crate::scalar::Real;

pub const SPECTRAL_MAP_HEADER: &str = "re_omega,im_omega,re_G,im_G,re_C,im_C";
pub const TIME_SERIES_HEADER: &str = "t,re_C,im_C";
pub const PROJECTED_HEADER: &str = "gamma_axis,value";
pub const DAMPING_SPECTRUM_HEADER: &str = "re_lambda,im_lambda,overlap_weight";
pub const BOND_PROFILE_HEADER: &str = "step,site,bond";

/// One row per node, imaginary index outer, real index inner. C is `NaN` on
/// the boundary ring where the central difference is undefined.
pub fn write_spectral_map<T: Real, W: Write>(map: &SpectralMap<T>, mut w: W) -> Result<()> {
    writeln!(w, "{SPECTRAL_MAP_HEADER}")?;
    let g = &map.grid;
    for k in 0..g.len() {
        let z = g.node(k);
        let gr = map.greens[k];
        let (cr, ci) = if g.is_interior(k) {
            (map.values[k].re.as_f64(), map.values[k].im.as_f64())
        } else {
            (f64::NAN, f64::NAN)
        };
        writeln!(w, "{},{},{},{},{},{}", z.re.as_f64(), z.im.as_f64(), gr.re.as_f64(), gr.im.as_f64(), cr, ci)?;
    }
    Ok(())
}

pub fn write_time_series<T: Real, W: Write>(ts: &TimeSeries<T>, mut w: W) -> Result<()> {
    writeln!(w, "{TIME_SERIES_HEADER}")?;
    for (t, c) in ts.times.iter().zip(&ts.values) {
        writeln!(w, "{},{},{}", t.as_f64(), c.re.as_f64(), c.im.as_f64())?;
    }
    Ok(())
}

pub fn write_projected<T: Real, W: Write>(cp: &ProjectedCorrelator<T>, mut w: W) -> Result<()> {
    writeln!(w, "{PROJECTED_HEADER}")?;
    for (g, v) in cp.gammas.iter().zip(&cp.values) {
        writeln!(w, "{},{}", g.as_f64(), v.as_f64())?;
    }
    Ok(())
}

/// `overlap_weight` is the raw magnitude |⟨L_n|õ(0)⟩|, not its square.
pub fn write_damping_spectrum<T: Real, W: Write>(spec: &DampingSpectrum<T>, mut w: W) -> Result<()> {
    writeln!(w, "{DAMPING_SPECTRUM_HEADER}")?;
    for (l, m) in spec.eigenvalues.iter().zip(&spec.overlap_magnitudes) {
        writeln!(w, "{},{},{}", l.re.as_f64(), l.im.as_f64(), m.as_f64())?;
    }
    Ok(())
}

/// `profile[step]` lists the bond dimensions of one recursion vector, boundaries included.
pub fn write_bond_profile<W: Write>(profile: &[Vec<usize>], mut w: W) -> Result<()> {
    writeln!(w, "{BOND_PROFILE_HEADER}")?;
    for (step, bonds) in profile.iter().enumerate() {
        for (site, b) in bonds.iter().enumerate() {
            writeln!(w, "{step},{site},{b}")?;
        }
    }
    Ok(())
}

/// Heatmap of |C(ω)| on the interior nodes with a linear grey-to-red scale
/// from 0 to the map maximum. Returns the SVG text and the scale maximum.
pub fn spectral_map_svg<T: Real>(map: &SpectralMap<T>) -> (String, f64) {
    let g = &map.grid;
    let (nx, ny) = (g.n_re - 2, g.n_im - 2);
    let cell = 4usize;
    let vmax = (0..g.len()).filter(|&k| g.is_interior(k)).map(|k| map.values[k].norm().as_f64()).fold(0.0, f64::max);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        nx * cell,
        ny * cell,
        nx * cell,
        ny * cell
    );
    let _ = writeln!(
        s,
        "<desc>|C(omega)|, Re omega in [{}, {}], Im omega in [{}, {}], linear scale 0..{}</desc>",
        g.re_min.as_f64(),
        g.re_max.as_f64(),
        g.im_min.as_f64(),
        g.im_max.as_f64(),
        vmax
    );
    for j in 1..g.n_im - 1 {
        for i in 1..g.n_re - 1 {
            let v = map.values[g.index(i, j)].norm().as_f64();
            let t = if vmax > 0.0 { (v / vmax).clamp(0.0, 1.0) } else { 0.0 };
            let (r, gr, b) = (255.0 * t, 255.0 * (1.0 - t) * 0.9, 255.0 * (1.0 - t) * 0.9);
            // Row 0 of the image is the largest Im ω.
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="rgb({},{},{})"/>"#,
                (i - 1) * cell,
                (g.n_im - 2 - j) * cell,
                r.round() as u8,
                gr.round() as u8,
                b.round() as u8
            );
        }
    }
    s.push_str("</svg>\n");
    (s, vmax)
}
