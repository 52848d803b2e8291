//! Generative model of multi-temporal SLC stacks: reflectivity and
//! scatterer scenes, temporally correlated circular Gaussian speckle, phase
//! screens and the acquisition response, composed into simulated stacks with
//! exact ground truth.

mod coherence;
mod response;
mod scene;
mod speckle;

pub use coherence::{average_coherence, average_coherence_offdiag, cholesky_psd, coherence_matrix, CMatrix, CoherenceSpec};
pub use response::{apply_sar_response, lowpass_reflectivity, SarResponseSpec, SpectralShift};
pub use scene::{piecewise_classes, point_scatterers, smooth_phase_screen};
pub use speckle::{correlate_speckle, draw_speckle, CholeskyFactors, SpeckleDraw};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::stack::{ComplexStack, RealImage};

/// Everything needed to synthesize one stack: ground-truth reflectivities,
/// dominant scatterers, temporal coherence, per-date phase screens and
/// spectrum shifts, and the acquisition response.
#[derive(Debug, Clone)]
pub struct SceneModel {
    pub h: usize,
    pub w: usize,
    /// One positive reflectivity plane per date.
    pub reflectivity: Vec<RealImage>,
    /// One scatterer plane per date; zero almost everywhere.
    pub scatterers: Vec<Vec<Complex64>>,
    pub coherence: CoherenceSpec,
    /// Optional phase screens (atmosphere + topography + displacement).
    pub phase: Option<Vec<RealImage>>,
    /// Per-date spectrum shift ramps.
    pub ramps: Vec<SpectralShift>,
    pub response: SarResponseSpec,
}

impl SceneModel {
    /// Speckle-only scene: no scatterers, no phase, centered spectra.
    pub fn speckle_only(reflectivity: Vec<RealImage>, coherence: CoherenceSpec, response: SarResponseSpec) -> Self {
        let t = reflectivity.len();
        let (h, w) = (reflectivity[0].h(), reflectivity[0].w());
        SceneModel {
            h,
            w,
            scatterers: vec![vec![Complex64::new(0.0, 0.0); h * w]; t],
            reflectivity,
            coherence,
            phase: None,
            ramps: vec![SpectralShift::zero(); t],
            response,
        }
    }

    pub fn t(&self) -> usize {
        self.reflectivity.len()
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.t();
        if t == 0 {
            return Err(Error::Config("scene has no dates".into()));
        }
        if self.coherence.dim() != t {
            return Err(Error::ShapeMismatch(format!(
                "coherence spec is {}x{0} for T = {t}",
                self.coherence.dim()
            )));
        }
        if self.scatterers.len() != t || self.ramps.len() != t {
            return Err(Error::ShapeMismatch("per-date field counts disagree".into()));
        }
        for plane in &self.reflectivity {
            if plane.h() != self.h || plane.w() != self.w {
                return Err(Error::ShapeMismatch("reflectivity plane size mismatch".into()));
            }
            if !plane.data().iter().all(|&v| v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveInput("reflectivity".into()));
            }
        }
        for plane in &self.scatterers {
            if plane.len() != self.h * self.w {
                return Err(Error::ShapeMismatch("scatterer plane size mismatch".into()));
            }
            if !plane.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite("scatterers".into()));
            }
        }
        if let Some(phase) = &self.phase {
            if phase.len() != t {
                return Err(Error::ShapeMismatch("phase plane count mismatch".into()));
            }
        }
        for ramp in &self.ramps {
            ramp.validate()?;
        }
        self.response.validate()?;
        Ok(())
    }
}

/// Ground truth attached to a synthesized stack: per-date low-pass filtered
/// reflectivities and the intensities of the filtered scatterers.
#[derive(Debug, Clone)]
pub struct SceneTruth {
    pub r_tilde: Vec<RealImage>,
    pub d_intensity: Vec<RealImage>,
}

impl SceneTruth {
    /// What the despeckling estimator targets at one date:
    /// low-pass reflectivity plus scatterer intensity.
    pub fn target(&self, date: usize) -> RealImage {
        let r = &self.r_tilde[date];
        let d = &self.d_intensity[date];
        RealImage::from_fn(r.h(), r.w(), |y, x| r.at(y, x) + d.at(y, x))
    }
}

/// Synthesize one stack: draw speckle, correlate it temporally, superimpose
/// the scatterers, and apply per-date acquisition effects. Also returns the
/// exact truth maps for evaluation.
pub fn synthesize_stack(scene: &SceneModel, handle: RngHandle) -> Result<(ComplexStack, SceneTruth)> {
    scene.validate()?;
    let t = scene.t();
    let (h, w) = (scene.h, scene.w);

    let gamma = coherence_matrix(&scene.coherence)?;
    let l = cholesky_psd(&gamma)?;
    let eps = draw_speckle(t, h, w, handle);
    let mut z = correlate_speckle(&eps, &CholeskyFactors::Shared(l), &scene.reflectivity)?;

    let has_scatterers = scene.scatterers.iter().any(|p| p.iter().any(|c| c.norm_sqr() > 0.0));
    if has_scatterers {
        for date in 0..t {
            let plane = z.plane_mut(date);
            for (v, d) in plane.iter_mut().zip(&scene.scatterers[date]) {
                *v += d;
            }
        }
    }
    let observed = apply_sar_response(&z, scene.phase.as_deref(), &scene.ramps, &scene.response)?;

    let r_tilde: Vec<RealImage> =
        scene.reflectivity.iter().map(|r| lowpass_reflectivity(r, &scene.response)).collect();
    let d_intensity: Vec<RealImage> = if has_scatterers {
        let mut d_stack = ComplexStack::zeros(t, h, w);
        for date in 0..t {
            d_stack.plane_mut(date).copy_from_slice(&scene.scatterers[date]);
        }
        let filtered = apply_sar_response(&d_stack, scene.phase.as_deref(), &scene.ramps, &scene.response)?;
        (0..t)
            .map(|date| {
                RealImage::from_vec(h, w, filtered.plane(date).iter().map(|c| c.norm_sqr()).collect())
                    .expect("finite scatterer intensity")
            })
            .collect()
    } else {
        vec![RealImage::zeros(h, w); t]
    };

    Ok((observed, SceneTruth { r_tilde, d_intensity }))
}
