//! Boxcar multilooked coherence estimation between one date and the
//! reference date, computed on the background (scatterer-subtracted)
//! components.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stack::RealImage;

/// Floor applied to windowed mean intensities so ratio terms stay defined.
const R_FLOOR: f64 = 1e-30;

/// Per-pixel coherence and reflectivity estimates for one (date, reference)
/// pair. `gamma[k]` estimates the normalized cross-correlation
/// `E[(z_i - d_i)(z_ref - d_ref)^*] / sqrt(r_i r_ref)` at pixel k, so
/// `|gamma| <= 1` by Cauchy-Schwarz.
#[derive(Debug, Clone)]
pub struct CoherenceMaps {
    pub gamma: Vec<Complex64>,
    pub r_i: RealImage,
    pub r_ref: RealImage,
}

impl CoherenceMaps {
    /// Oracle maps with a constant coherence and unit reflectivities.
    pub fn uniform(h: usize, w: usize, gamma: Complex64) -> Self {
        CoherenceMaps {
            gamma: vec![gamma; h * w],
            r_i: RealImage::constant(h, w, 1.0),
            r_ref: RealImage::constant(h, w, 1.0),
        }
    }
}

/// Windowed (boxcar) coherence and intensity estimates around every pixel.
/// The window is clamped at image borders.
pub fn estimate_coherence_pair(
    z_i: &[Complex64],
    z_ref: &[Complex64],
    d_i: &[Complex64],
    d_ref: &[Complex64],
    h: usize,
    w: usize,
    window: usize,
) -> Result<CoherenceMaps> {
    if z_i.len() != h * w || z_ref.len() != h * w || d_i.len() != h * w || d_ref.len() != h * w {
        return Err(Error::ShapeMismatch("coherence estimation planes differ in size".into()));
    }
    if window < 3 || window % 2 == 0 {
        return Err(Error::Config(format!("coherence window {window} must be odd and >= 3")));
    }
    let n = h * w;
    let mut cross = vec![Complex64::new(0.0, 0.0); n];
    let mut pow_i = vec![0.0f64; n];
    let mut pow_ref = vec![0.0f64; n];
    for k in 0..n {
        let bi = z_i[k] - d_i[k];
        let br = z_ref[k] - d_ref[k];
        cross[k] = bi * br.conj();
        pow_i[k] = bi.norm_sqr();
        pow_ref[k] = br.norm_sqr();
    }
    let cross_re: Vec<f64> = cross.iter().map(|c| c.re).collect();
    let cross_im: Vec<f64> = cross.iter().map(|c| c.im).collect();
    let sat_re = integral_image(&cross_re, h, w);
    let sat_im = integral_image(&cross_im, h, w);
    let sat_i = integral_image(&pow_i, h, w);
    let sat_ref = integral_image(&pow_ref, h, w);

    let half = window / 2;
    let mut gamma = vec![Complex64::new(0.0, 0.0); n];
    let mut r_i = vec![0.0f64; n];
    let mut r_ref = vec![0.0f64; n];
    for y in 0..h {
        let y0 = y.saturating_sub(half);
        let y1 = (y + half).min(h - 1);
        for x in 0..w {
            let x0 = x.saturating_sub(half);
            let x1 = (x + half).min(w - 1);
            let count = ((y1 - y0 + 1) * (x1 - x0 + 1)) as f64;
            let k = y * w + x;
            let si = window_sum(&sat_i, w, y0, x0, y1, x1);
            let sr = window_sum(&sat_ref, w, y0, x0, y1, x1);
            let num = Complex64::new(
                window_sum(&sat_re, w, y0, x0, y1, x1),
                window_sum(&sat_im, w, y0, x0, y1, x1),
            );
            let den = (si * sr).sqrt();
            gamma[k] = if den > 0.0 {
                let g = num / den;
                // Cauchy-Schwarz bounds |g| by 1; shave rounding overshoot
                if g.norm() > 1.0 {
                    g / g.norm()
                } else {
                    g
                }
            } else {
                Complex64::new(0.0, 0.0)
            };
            r_i[k] = (si / count).max(R_FLOOR);
            r_ref[k] = (sr / count).max(R_FLOOR);
        }
    }
    Ok(CoherenceMaps {
        gamma,
        r_i: RealImage::from_vec(h, w, r_i)?,
        r_ref: RealImage::from_vec(h, w, r_ref)?,
    })
}

/// Summed-area table with one row/column of zero padding.
fn integral_image(vals: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut sat = vec![0.0f64; (h + 1) * (w + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += vals[y * w + x];
            sat[(y + 1) * (w + 1) + (x + 1)] = sat[y * (w + 1) + (x + 1)] + row;
        }
    }
    sat
}

#[inline]
fn window_sum(sat: &[f64], w: usize, y0: usize, x0: usize, y1: usize, x1: usize) -> f64 {
    let stride = w + 1;
    sat[(y1 + 1) * stride + (x1 + 1)] - sat[y0 * stride + (x1 + 1)] - sat[(y1 + 1) * stride + x0]
        + sat[y0 * stride + x0]
}
