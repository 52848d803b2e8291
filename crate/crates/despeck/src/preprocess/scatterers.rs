//! Dominant-scatterer detection: intensity quantile gate + strict 3x3 local
//! maximum. A stand-in for subpixellic detectors; externally computed maps
//! can be passed through the whitening parameters instead.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Return a sparse scatterer map: the complex pixel value where the pixel
/// intensity strictly exceeds the requested intensity quantile *and* is a
/// strict local maximum in its 3x3 neighborhood; zero elsewhere. Ties (flat
/// neighborhoods) never qualify.
pub fn detect_dominant_scatterers(
    plane: &[Complex64],
    h: usize,
    w: usize,
    quantile: f64,
) -> Result<Vec<Complex64>> {
    assert_eq!(plane.len(), h * w);
    if !(0.0 < quantile && quantile < 1.0) {
        return Err(Error::Config(format!("scatterer quantile {quantile} outside (0, 1)")));
    }
    let n = h * w;
    let mut intens: Vec<f64> = plane.iter().map(|c| c.norm_sqr()).collect();
    let mut sorted = intens.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((quantile * n as f64).floor() as usize).min(n - 1);
    let threshold = sorted[idx];

    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for y in 0..h {
        for x in 0..w {
            let k = y * w + x;
            let v = intens[k];
            if v <= threshold {
                continue;
            }
            let mut local_max = true;
            'nb: for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dy == 0 && dx == 0 {
                        continue;
                    }
                    let ny = y as i64 + dy;
                    let nx = x as i64 + dx;
                    if ny < 0 || nx < 0 || ny as usize >= h || nx as usize >= w {
                        continue;
                    }
                    if intens[ny as usize * w + nx as usize] >= v {
                        local_max = false;
                        break 'nb;
                    }
                }
            }
            if local_max {
                out[k] = plane[k];
            }
        }
    }
    intens.clear();
    Ok(out)
}
