//! Spectrum recentering at the reference date.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::SpectralShift;
use crate::spectral::dft2_forward;
use crate::stack::{ComplexStack, Layout};

/// Estimate the spectral centroid of one plane as the phase of the first
/// circular moment of the averaged power spectrum, per axis.
///
/// The circular moment makes the estimate equivariant: shifting the spectrum
/// by `delta` moves the estimate by `delta` (mod 1), with no wrap-around
/// bias at the band edges.
pub fn estimate_spectral_shift(plane: &[Complex64], h: usize, w: usize) -> Result<SpectralShift> {
    if h < 8 || w < 8 {
        return Err(Error::ShapeMismatch(format!("spectral shift estimation needs H,W >= 8, got {h}x{w}")));
    }
    let spec = dft2_forward(plane, h, w);
    let mut mx = vec![0.0f64; w];
    let mut my = vec![0.0f64; h];
    let mut total = 0.0;
    for v in 0..h {
        for u in 0..w {
            let p = spec[v * w + u].norm_sqr();
            mx[u] += p;
            my[v] += p;
            total += p;
        }
    }
    if total <= 0.0 {
        return Err(Error::DegenerateSpectrum);
    }
    let fx = circular_centroid(&mx);
    let fy = circular_centroid(&my);
    Ok(SpectralShift::new(fx, fy, 0.0))
}

fn circular_centroid(power: &[f64]) -> f64 {
    let n = power.len() as f64;
    let mut moment = Complex64::new(0.0, 0.0);
    for (u, &p) in power.iter().enumerate() {
        let ang = std::f64::consts::TAU * u as f64 / n;
        moment += p * Complex64::new(ang.cos(), ang.sin());
    }
    if moment.norm() == 0.0 {
        return 0.0;
    }
    moment.arg() / std::f64::consts::TAU
}

/// Multiply every date by the conjugate ramp of the given shift, moving the
/// spectral centroid estimated at the reference date onto the 0 frequency.
/// The same ramp is applied to all dates so relative shifts are preserved.
/// Amplitudes are untouched (phase-only operation).
pub fn recenter_spectrum(stack: &ComplexStack, shift: SpectralShift) -> Result<ComplexStack> {
    shift.validate()?;
    let mut out = stack.permute_layout(Layout::DateMajor);
    if shift == SpectralShift::zero() {
        return Ok(out);
    }
    let (h, w) = (stack.h(), stack.w());
    for date in 0..stack.t() {
        shift.apply_ramp(out.plane_mut(date), h, w, -1.0);
    }
    Ok(out)
}

/// Dependence statistic between the real and imaginary components of a
/// plane: the largest |Pearson correlation| between `Re z(p)` and
/// `Im z(p + lag)` over lags (0,0), (1,0), (0,1).
///
/// Under the circular speckle model a *marginal* (lag-0) correlation is zero
/// regardless of spectrum centering; an off-center spectrum shows up as
/// cross-pixel real/imaginary correlation, which this statistic exposes.
pub fn reim_dependence_statistic(plane: &[Complex64], h: usize, w: usize) -> f64 {
    assert_eq!(plane.len(), h * w);
    let mut worst: f64 = 0.0;
    for (dy, dx) in [(0usize, 0usize), (0, 1), (1, 0)] {
        let mut sa = 0.0;
        let mut sb = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        let mut sab = 0.0;
        let mut n = 0.0;
        for y in 0..h - dy {
            for x in 0..w - dx {
                let a = plane[y * w + x].re;
                let b = plane[(y + dy) * w + (x + dx)].im;
                sa += a;
                sb += b;
                saa += a * a;
                sbb += b * b;
                sab += a * b;
                n += 1.0;
            }
        }
        let cov = sab / n - sa / n * (sb / n);
        let va = saa / n - (sa / n) * (sa / n);
        let vb = sbb / n - (sb / n) * (sb / n);
        if va > 0.0 && vb > 0.0 {
            worst = worst.max((cov / (va * vb).sqrt()).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngHandle;
    use crate::sim::{synthesize_stack, SarResponseSpec, SceneModel, CoherenceSpec};
    use crate::stack::RealImage;

    #[test]
    fn centered_white_spectrum_estimates_zero() {
        let scene = SceneModel::speckle_only(
            vec![RealImage::constant(128, 128, 1.0)],
            CoherenceSpec::identity(1),
            SarResponseSpec::Identity,
        );
        let (z, _) = synthesize_stack(&scene, RngHandle::new(2, 0)).unwrap();
        let s = estimate_spectral_shift(z.plane(0), 128, 128).unwrap();
        assert!(s.fx.abs() < 0.01 && s.fy.abs() < 0.01, "estimate ({}, {})", s.fx, s.fy);
    }

    #[test]
    fn ramp_shifts_estimate_equivariantly() {
        let scene = SceneModel::speckle_only(
            vec![RealImage::constant(128, 128, 1.0)],
            CoherenceSpec::identity(1),
            SarResponseSpec::hamming(1.25),
        );
        let (z, _) = synthesize_stack(&scene, RngHandle::new(3, 0)).unwrap();
        let base = estimate_spectral_shift(z.plane(0), 128, 128).unwrap();
        let mut ramped = z.plane(0).to_vec();
        SpectralShift::new(0.2, 0.0, 0.0).apply_ramp(&mut ramped, 128, 128, 1.0);
        let s = estimate_spectral_shift(&ramped, 128, 128).unwrap();
        assert!((s.fx - (base.fx + 0.2)).abs() < 0.01, "fx = {}", s.fx);
        assert!((s.fy - base.fy).abs() < 0.01);
    }

    #[test]
    fn constant_image_is_dc_only() {
        let plane = vec![Complex64::new(2.0, 1.0); 64];
        let s = estimate_spectral_shift(&plane, 8, 8).unwrap();
        assert_eq!(s.fx, 0.0);
        assert_eq!(s.fy, 0.0);
    }

    #[test]
    fn zero_power_is_degenerate() {
        let plane = vec![Complex64::new(0.0, 0.0); 64];
        assert!(matches!(estimate_spectral_shift(&plane, 8, 8), Err(Error::DegenerateSpectrum)));
    }

    #[test]
    fn small_planes_are_rejected() {
        let plane = vec![Complex64::new(1.0, 0.0); 4 * 8];
        assert!(estimate_spectral_shift(&plane, 4, 8).is_err());
    }

    #[test]
    fn zero_shift_recenter_is_identity() {
        let scene = SceneModel::speckle_only(
            vec![RealImage::constant(16, 16, 1.0); 2],
            CoherenceSpec::identity(2),
            SarResponseSpec::Identity,
        );
        let (z, _) = synthesize_stack(&scene, RngHandle::new(4, 0)).unwrap();
        let out = recenter_spectrum(&z, SpectralShift::zero()).unwrap();
        assert_eq!(out.data(), z.data());
    }

    #[test]
    fn recenter_preserves_amplitudes() {
        let scene = SceneModel::speckle_only(
            vec![RealImage::constant(32, 32, 2.0)],
            CoherenceSpec::identity(1),
            SarResponseSpec::Identity,
        );
        let (z, _) = synthesize_stack(&scene, RngHandle::new(5, 0)).unwrap();
        let out = recenter_spectrum(&z, SpectralShift::new(0.13, -0.27, 0.4)).unwrap();
        let worst = out
            .data()
            .iter()
            .zip(z.data())
            .map(|(a, b)| (a.norm() - b.norm()).abs())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-12, "amplitude drift {worst}");
    }

    #[test]
    fn opposite_ramp_restores_original() {
        let scene = SceneModel::speckle_only(
            vec![RealImage::constant(32, 32, 1.0)],
            CoherenceSpec::identity(1),
            SarResponseSpec::Identity,
        );
        let (z, _) = synthesize_stack(&scene, RngHandle::new(6, 0)).unwrap();
        let mut ramped = z.clone();
        let shift = SpectralShift::new(0.2, 0.1, 0.0);
        for date in 0..1 {
            shift.apply_ramp(ramped.plane_mut(date), 32, 32, 1.0);
        }
        let restored = recenter_spectrum(&ramped, shift).unwrap();
        let worst = restored
            .data()
            .iter()
            .zip(z.data())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-12, "restore error {worst}");
    }
}
