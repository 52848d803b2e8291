//! Speckle field generation: i.i.d. circular Gaussian draws and temporal
//! correlation through triangular factors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::rng::RngHandle;
use crate::sim::coherence::CMatrix;
use crate::stack::{ComplexStack, Layout, RealImage};

/// An i.i.d. circular Gaussian field with unit power per sample, together
/// with the handle that reproduces it.
#[derive(Debug, Clone)]
pub struct SpeckleDraw {
    pub epsilon: ComplexStack,
    pub handle: RngHandle,
}

/// Draw `epsilon ~ Nc(I)`: every complex sample is `x + j y` with
/// independent `x, y ~ N(0, 1/2)`.
///
/// Sample (t, k) depends only on `(handle, pixel k, date t)`: each pixel gets
/// its own counter-based stream, so the field is identical under any thread
/// count or generation order.
pub fn draw_speckle(t: usize, h: usize, w: usize, handle: RngHandle) -> SpeckleDraw {
    assert!(t >= 1 && h >= 1 && w >= 1);
    let n = h * w;
    let mut data = vec![Complex64::new(0.0, 0.0); t * n];
    exec::for_each_indexed(&mut data, |idx, slot| {
        let date = idx / n;
        let k = idx % n;
        *slot = sample_at(handle, k, date);
    });
    let epsilon = ComplexStack::from_vec(t, h, w, Layout::DateMajor, data).expect("sized above");
    SpeckleDraw { epsilon, handle }
}

#[inline]
fn sample_at(handle: RngHandle, pixel: usize, date: usize) -> Complex64 {
    let stream = handle.derive(pixel as u64);
    const DEN: f64 = (1u64 << 53) as f64;
    let u1 = (((stream.word_at(2 * date as u64) >> 11) + 1) as f64) / DEN;
    let u2 = ((stream.word_at(2 * date as u64 + 1) >> 11) as f64) / DEN;
    let radius = (-u1.ln()).sqrt(); // sqrt(-2 ln u) * sqrt(1/2)
    let angle = std::f64::consts::TAU * u2;
    Complex64::new(radius * angle.cos(), radius * angle.sin())
}

/// Triangular correlating factor(s): one matrix shared by every pixel, or
/// one per pixel (pixel-major order).
#[derive(Debug, Clone)]
pub enum CholeskyFactors {
    Shared(CMatrix),
    PerPixel(Vec<CMatrix>),
}

impl CholeskyFactors {
    fn at(&self, k: usize) -> &CMatrix {
        match self {
            CholeskyFactors::Shared(m) => m,
            CholeskyFactors::PerPixel(ms) => &ms[k],
        }
    }
}

/// Build the speckle component `s(.,k) = diag(sqrt(r(.,k))) L_k eps(.,k)`.
///
/// Mixing is purely temporal: output pixel k only reads input pixel k.
pub fn correlate_speckle(
    eps: &SpeckleDraw,
    factors: &CholeskyFactors,
    reflectivity: &[RealImage],
) -> Result<ComplexStack> {
    let stack = &eps.epsilon;
    let (t, h, w) = (stack.t(), stack.h(), stack.w());
    let n = h * w;
    if reflectivity.len() != t {
        return Err(Error::ShapeMismatch(format!(
            "reflectivity has {} planes for T = {t}",
            reflectivity.len()
        )));
    }
    for p in reflectivity {
        if p.h() != h || p.w() != w {
            return Err(Error::ShapeMismatch("reflectivity plane size mismatch".into()));
        }
    }
    match factors {
        CholeskyFactors::Shared(m) if m.dim() != t => {
            return Err(Error::ShapeMismatch(format!("factor dim {} != T = {t}", m.dim())));
        }
        CholeskyFactors::PerPixel(ms) if ms.len() != n => {
            return Err(Error::ShapeMismatch(format!("{} per-pixel factors for {n} pixels", ms.len())));
        }
        _ => {}
    }

    let eps_pm = stack.permute_layout(Layout::PixelMajor);
    let eps_data = eps_pm.data();
    let mut out = vec![Complex64::new(0.0, 0.0); t * n];
    exec::for_each_chunk(&mut out, t, |k, pixel_vec| {
        let l = factors.at(k);
        let e = &eps_data[k * t..(k + 1) * t];
        for i in 0..t {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=i {
                acc += l.get(i, j) * e[j];
            }
            pixel_vec[i] = acc * reflectivity[i].data()[k].sqrt();
        }
    });
    let pm = ComplexStack::from_vec(t, h, w, Layout::PixelMajor, out)?;
    Ok(pm.permute_layout(Layout::DateMajor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::coherence::{cholesky_psd, CMatrix};

    #[test]
    fn draw_is_deterministic_and_mode_independent() {
        let h = RngHandle::new(7, 1);
        let a = draw_speckle(3, 8, 9, h);
        crate::exec::set_parallel(false);
        let b = draw_speckle(3, 8, 9, h);
        crate::exec::set_parallel(true);
        assert_eq!(a.epsilon.data(), b.epsilon.data());
    }

    #[test]
    fn draw_moments_match_circular_unit_power() {
        let d = draw_speckle(4, 500, 500, RngHandle::new(42, 0));
        let n = d.epsilon.data().len() as f64;
        let mean: Complex64 = d.epsilon.data().iter().sum::<Complex64>() / n;
        let power: f64 = d.epsilon.data().iter().map(|c| c.norm_sqr()).sum::<f64>() / n;
        assert!(mean.norm() <= 0.005, "|mean| = {}", mean.norm());
        assert!((0.995..=1.005).contains(&power), "power = {power}");
    }

    #[test]
    fn identity_factor_unit_reflectivity_is_identity() {
        let d = draw_speckle(2, 4, 4, RngHandle::new(1, 0));
        let r = vec![RealImage::constant(4, 4, 1.0); 2];
        let s = correlate_speckle(&d, &CholeskyFactors::Shared(CMatrix::identity(2)), &r).unwrap();
        assert_eq!(s.data(), d.epsilon.data());
    }

    #[test]
    fn constant_reflectivity_scales_amplitude() {
        let d = draw_speckle(2, 4, 4, RngHandle::new(1, 0));
        let r = vec![RealImage::constant(4, 4, 4.0); 2];
        let s = correlate_speckle(&d, &CholeskyFactors::Shared(CMatrix::identity(2)), &r).unwrap();
        for (a, b) in s.data().iter().zip(d.epsilon.data()) {
            assert!((a - 2.0 * b).norm() < 1e-15);
        }
    }

    #[test]
    fn monte_carlo_covariance_matches_model() {
        // Cov[s(.,k)] should equal diag(sqrt r) Gamma diag(sqrt r) entrywise
        let gamma = CMatrix::from_real_rows(2, &[1.0, 0.6, 0.6, 1.0]).unwrap();
        let l = cholesky_psd(&gamma).unwrap();
        let (h, w) = (400, 250); // 1e5 pixels
        let d = draw_speckle(2, h, w, RngHandle::new(99, 0));
        let r = vec![RealImage::constant(h, w, 1.0), RealImage::constant(h, w, 2.0)];
        let s = correlate_speckle(&d, &CholeskyFactors::Shared(l), &r).unwrap();
        let n = (h * w) as f64;
        let mut cov = [[Complex64::new(0.0, 0.0); 2]; 2];
        for k in 0..h * w {
            let v = [s.at(0, k), s.at(1, k)];
            for i in 0..2 {
                for j in 0..2 {
                    cov[i][j] += v[i] * v[j].conj();
                }
            }
        }
        let expected = [[1.0, 0.6 * (2.0f64).sqrt()], [0.6 * (2.0f64).sqrt(), 2.0]];
        for i in 0..2 {
            for j in 0..2 {
                let got = cov[i][j] / n;
                assert!(
                    (got.re - expected[i][j]).abs() < 0.01 * expected[1][1] && got.im.abs() < 0.02,
                    "cov[{i}][{j}] = {got}"
                );
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let d = draw_speckle(2, 4, 4, RngHandle::new(1, 0));
        let r = vec![RealImage::constant(4, 4, 1.0); 3];
        assert!(correlate_speckle(&d, &CholeskyFactors::Shared(CMatrix::identity(2)), &r).is_err());
        let r2 = vec![RealImage::constant(4, 4, 1.0); 2];
        assert!(correlate_speckle(&d, &CholeskyFactors::Shared(CMatrix::identity(3)), &r2).is_err());
    }
}
