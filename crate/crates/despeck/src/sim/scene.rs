//! Scene construction helpers: piecewise-constant reflectivity maps with
//! per-date changes, smooth random phase screens, and example scatterer
//! patterns.

use num_complex::Complex64;

use crate::rng::RngHandle;
use crate::spectral::{dft2_forward, dft2_inverse, signed_freq};
use crate::stack::RealImage;

/// Piecewise-constant scene built from square cells, with a fraction of the
/// cells relabeled at every non-reference date to emulate scene evolution.
///
/// Returns one reflectivity plane per date; date 0 is the base labeling.
pub fn piecewise_classes(
    h: usize,
    w: usize,
    dates: usize,
    class_values: &[f64],
    cell: usize,
    change_fraction: f64,
    handle: RngHandle,
) -> Vec<RealImage> {
    assert!(!class_values.is_empty() && cell >= 1 && dates >= 1);
    let cy = h.div_ceil(cell);
    let cx = w.div_ceil(cell);
    let mut rng = handle.derive(0).stream();
    let base: Vec<usize> = (0..cy * cx).map(|_| rng.next_below(class_values.len() as u64) as usize).collect();

    let mut out = Vec::with_capacity(dates);
    for date in 0..dates {
        let labels: Vec<usize> = if date == 0 {
            base.clone()
        } else {
            let mut cell_rng = handle.derive(1 + date as u64).stream();
            base.iter()
                .map(|&lab| {
                    if (cell_rng.next_f64()) < change_fraction && class_values.len() > 1 {
                        // move to a different class
                        let step = 1 + cell_rng.next_below(class_values.len() as u64 - 1) as usize;
                        (lab + step) % class_values.len()
                    } else {
                        lab
                    }
                })
                .collect()
        };
        out.push(RealImage::from_fn(h, w, |y, x| {
            class_values[labels[(y / cell) * cx + x / cell]]
        }));
    }
    out
}

/// Smooth random phase screen: white Gaussian noise low-passed with a
/// Gaussian spectral envelope of the given correlation length (pixels),
/// scaled to the requested RMS amplitude (radians).
pub fn smooth_phase_screen(h: usize, w: usize, rms: f64, corr_len: f64, handle: RngHandle) -> RealImage {
    let mut rng = handle.stream();
    let noise: Vec<Complex64> = (0..h * w).map(|_| Complex64::new(rng.next_gaussian(), 0.0)).collect();
    let mut spec = dft2_forward(&noise, h, w);
    for v in 0..h {
        for u in 0..w {
            let fy = signed_freq(v, h) as f64 / h as f64;
            let fx = signed_freq(u, w) as f64 / w as f64;
            let damp = (-(2.0 * std::f64::consts::PI * corr_len).powi(2) * (fx * fx + fy * fy) / 2.0).exp();
            spec[v * w + u] *= damp;
        }
    }
    let field = dft2_inverse(&spec, h, w);
    let vals: Vec<f64> = field.iter().map(|c| c.re).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
    let scale = if var > 0.0 { rms / var.sqrt() } else { 0.0 };
    RealImage::from_vec(h, w, vals.iter().map(|v| (v - mean) * scale).collect()).expect("finite field")
}

/// Example dominant-scatterer pattern: `count` isolated bright points with
/// the given complex amplitude magnitude and random phases.
pub fn point_scatterers(h: usize, w: usize, count: usize, magnitude: f64, handle: RngHandle) -> Vec<Complex64> {
    let mut rng = handle.stream();
    let mut plane = vec![Complex64::new(0.0, 0.0); h * w];
    let mut placed = 0usize;
    let mut guard = 0usize;
    while placed < count && guard < 100 * count.max(1) {
        guard += 1;
        let y = 2 + rng.next_below(h.saturating_sub(4).max(1) as u64) as usize;
        let x = 2 + rng.next_below(w.saturating_sub(4).max(1) as u64) as usize;
        let k = y * w + x;
        // keep points isolated so each is a strict local maximum
        let mut free = true;
        'scan: for dy in -2i64..=2 {
            for dx in -2i64..=2 {
                let ny = y as i64 + dy;
                let nx = x as i64 + dx;
                if ny >= 0 && nx >= 0 && (ny as usize) < h && (nx as usize) < w
                    && plane[ny as usize * w + nx as usize].norm() > 0.0
                {
                    free = false;
                    break 'scan;
                }
            }
        }
        if free {
            let ph = std::f64::consts::TAU * rng.next_f64();
            plane[k] = Complex64::new(magnitude * ph.cos(), magnitude * ph.sin());
            placed += 1;
        }
    }
    plane
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_changes_touch_expected_fraction() {
        let planes = piecewise_classes(64, 64, 4, &[1.0, 3.0, 10.0], 8, 0.2, RngHandle::new(5, 0));
        assert_eq!(planes.len(), 4);
        for p in &planes {
            assert!(p.data().iter().all(|&v| v > 0.0));
        }
        let base = &planes[0];
        for date in 1..4 {
            let changed = planes[date]
                .data()
                .iter()
                .zip(base.data())
                .filter(|(a, b)| a != b)
                .count() as f64
                / (64.0 * 64.0);
            assert!(changed > 0.05 && changed < 0.4, "changed fraction {changed}");
        }
    }

    #[test]
    fn piecewise_is_deterministic() {
        let a = piecewise_classes(32, 32, 3, &[1.0, 2.0], 4, 0.2, RngHandle::new(9, 9));
        let b = piecewise_classes(32, 32, 3, &[1.0, 2.0], 4, 0.2, RngHandle::new(9, 9));
        assert_eq!(a, b);
    }

    #[test]
    fn phase_screen_has_requested_rms() {
        let p = smooth_phase_screen(64, 64, 0.5, 8.0, RngHandle::new(3, 1));
        let var = p.data().iter().map(|v| v * v).sum::<f64>() / p.len() as f64;
        assert!((var.sqrt() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn scatterers_are_isolated() {
        let plane = point_scatterers(32, 32, 5, 10.0, RngHandle::new(7, 0));
        let nonzero = plane.iter().filter(|c| c.norm() > 0.0).count();
        assert_eq!(nonzero, 5);
    }
}
