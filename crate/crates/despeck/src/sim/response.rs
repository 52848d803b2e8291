//! SAR spectral response: per-date phase screens, spectrum-shifting ramps,
//! and the low-pass operator (apodization window + band limitation).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::spectral::{circular_convolve_real, dft2_forward, dft2_inverse, signed_freq};
use crate::stack::{ComplexStack, Layout, RealImage};

/// A 2D phase ramp: `psi(x, y) = 2 pi (fx x + fy y) + phase0`.
/// Frequencies are in cycles/pixel, bounded by Nyquist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralShift {
    pub fx: f64,
    pub fy: f64,
    pub phase0: f64,
}

impl SpectralShift {
    pub fn zero() -> Self {
        Self { fx: 0.0, fy: 0.0, phase0: 0.0 }
    }

    pub fn new(fx: f64, fy: f64, phase0: f64) -> Self {
        Self { fx, fy, phase0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fx.abs() > 0.5 || self.fy.abs() > 0.5 {
            return Err(Error::Config(format!(
                "ramp frequency ({}, {}) exceeds 0.5 cycles/pixel",
                self.fx, self.fy
            )));
        }
        if !self.fx.is_finite() || !self.fy.is_finite() || !self.phase0.is_finite() {
            return Err(Error::NonFinite("spectral shift".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn phase_at(&self, y: usize, x: usize) -> f64 {
        std::f64::consts::TAU * (self.fx * x as f64 + self.fy * y as f64) + self.phase0
    }

    /// Multiply a plane by `exp(sign * j * psi)` in place.
    pub fn apply_ramp(&self, plane: &mut [Complex64], h: usize, w: usize, sign: f64) {
        assert_eq!(plane.len(), h * w);
        exec::for_each_chunk(plane, w, |y, row| {
            for (x, v) in row.iter_mut().enumerate() {
                let ph = sign * self.phase_at(y, x);
                *v *= Complex64::new(ph.cos(), ph.sin());
            }
        });
    }
}

/// The spectral response of the acquisition system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SarResponseSpec {
    /// No spatial mixing; the operator is the identity.
    Identity,
    /// Raised-cosine apodization over a band narrowed by the oversampling
    /// factors. `alpha = 1` is a plain rectangular band; `alpha = 0.54`
    /// is the Hamming-type default. Weights: `alpha + (1-alpha) cos(pi d / c)`
    /// for signed frequency `d` within cutoff `c = axis_len / (2 * factor)`.
    ApodizedOversampled { alpha: f64, oversample_x: f64, oversample_y: f64 },
}

impl SarResponseSpec {
    pub fn hamming(oversample: f64) -> Self {
        SarResponseSpec::ApodizedOversampled { alpha: 0.54, oversample_x: oversample, oversample_y: oversample }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SarResponseSpec::Identity => Ok(()),
            SarResponseSpec::ApodizedOversampled { alpha, oversample_x, oversample_y } => {
                if !(0.5..=1.0).contains(&alpha) {
                    return Err(Error::Config(format!("apodization alpha = {alpha} outside [0.5, 1]")));
                }
                if oversample_x < 1.0 || oversample_y < 1.0 {
                    return Err(Error::Config("oversampling factors must be >= 1".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, SarResponseSpec::Identity)
    }

    /// The real, symmetric, zero-centered window on the DFT grid.
    pub fn window(&self, h: usize, w: usize) -> Vec<f64> {
        match *self {
            SarResponseSpec::Identity => vec![1.0; h * w],
            SarResponseSpec::ApodizedOversampled { alpha, oversample_x, oversample_y } => {
                let wx = axis_window(w, oversample_x, alpha);
                let wy = axis_window(h, oversample_y, alpha);
                let mut out = Vec::with_capacity(h * w);
                for v in 0..h {
                    for u in 0..w {
                        out.push(wy[v] * wx[u]);
                    }
                }
                out
            }
        }
    }

    /// Spatial impulse response `q` of the window (real valued).
    pub fn kernel(&self, h: usize, w: usize) -> Vec<f64> {
        let win: Vec<Complex64> = self.window(h, w).iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let spatial = dft2_inverse(&win, h, w);
        let norm = 1.0 / ((h * w) as f64).sqrt();
        spatial.iter().map(|c| c.re * norm).collect()
    }

    /// Apply the band-limited low-pass operator to one plane.
    pub fn apply_q(&self, plane: &mut Vec<Complex64>, h: usize, w: usize) {
        if self.is_identity() {
            return;
        }
        let win = self.window(h, w);
        let mut spec = dft2_forward(plane, h, w);
        for (s, g) in spec.iter_mut().zip(&win) {
            *s *= *g;
        }
        *plane = dft2_inverse(&spec, h, w);
    }
}

fn axis_window(n: usize, oversample: f64, alpha: f64) -> Vec<f64> {
    let cutoff = n as f64 / (2.0 * oversample);
    (0..n)
        .map(|u| {
            let d = signed_freq(u, n) as f64;
            if d.abs() <= cutoff {
                alpha + (1.0 - alpha) * (std::f64::consts::PI * d / cutoff).cos()
            } else {
                0.0
            }
        })
        .collect()
}

/// Per-date acquisition effects:
/// `out_t = diag(e^{-j psi_t}) Q diag(e^{j (phi_t + psi_t)}) z_t`.
/// With the identity response this reduces to `diag(e^{j phi_t}) z_t`.
pub fn apply_sar_response(
    stack: &ComplexStack,
    phase: Option<&[RealImage]>,
    ramps: &[SpectralShift],
    spec: &SarResponseSpec,
) -> Result<ComplexStack> {
    spec.validate()?;
    let (t, h, w) = (stack.t(), stack.h(), stack.w());
    if ramps.len() != t {
        return Err(Error::ShapeMismatch(format!("{} ramps for T = {t}", ramps.len())));
    }
    if let Some(phi) = phase {
        if phi.len() != t {
            return Err(Error::ShapeMismatch(format!("{} phase planes for T = {t}", phi.len())));
        }
        for p in phi {
            if p.h() != h || p.w() != w {
                return Err(Error::ShapeMismatch("phase plane size mismatch".into()));
            }
        }
    }
    for r in ramps {
        r.validate()?;
    }

    let src = stack.permute_layout(Layout::DateMajor);
    let mut out = ComplexStack::zeros(t, h, w);
    out.dtype = stack.dtype;
    for date in 0..t {
        let mut plane = src.plane(date).to_vec();
        // diag(e^{j(phi + psi)})
        if let Some(phi) = phase {
            let ph = &phi[date];
            exec::for_each_chunk(&mut plane, w, |y, row| {
                for (x, v) in row.iter_mut().enumerate() {
                    let p = ph.at(y, x);
                    *v *= Complex64::new(p.cos(), p.sin());
                }
            });
        }
        if spec.is_identity() {
            // psi cancels against its conjugate around the identity operator
            out.plane_mut(date).copy_from_slice(&plane);
            continue;
        }
        ramps[date].apply_ramp(&mut plane, h, w, 1.0);
        spec.apply_q(&mut plane, h, w);
        ramps[date].apply_ramp(&mut plane, h, w, -1.0);
        out.plane_mut(date).copy_from_slice(&plane);
    }
    Ok(out)
}

/// Low-pass filtered reflectivity: the diagonal of `Q diag(r) Q^dagger`,
/// i.e. the circular convolution of `r` with the squared response kernel.
pub fn lowpass_reflectivity(r: &RealImage, spec: &SarResponseSpec) -> RealImage {
    if spec.is_identity() {
        return r.clone();
    }
    let (h, w) = (r.h(), r.w());
    let kernel = spec.kernel(h, w);
    let ksq: Vec<f64> = kernel.iter().map(|&v| v * v).collect();
    // convolution index convention: sum_m |q(p - m)|^2 r(m)
    let vals = circular_convolve_real(&ksq, r.data(), h, w);
    RealImage::from_vec(h, w, vals).expect("finite convolution output")
}
