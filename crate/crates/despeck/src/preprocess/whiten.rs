//! Pairwise temporal whitening against the reference date.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec;
use crate::preprocess::coherence::{estimate_coherence_pair, CoherenceMaps};
use crate::preprocess::scatterers::detect_dominant_scatterers;
use crate::stack::{ComplexStack, Layout};

/// Default guard band: |gamma| is clamped to `1 - GUARD` before inverting
/// `1 - |gamma|^2`, which is singular at unit coherence.
pub const COHERENCE_GUARD: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct WhitenParams {
    /// Master switch; disabled means the stack passes through unchanged.
    pub enabled: bool,
    /// Boxcar window for coherence estimation (odd, >= 3).
    pub coh_window: usize,
    /// Intensity quantile for scatterer detection.
    pub ds_quantile: f64,
    /// Saturation guard on |gamma|.
    pub guard: f64,
    /// Externally supplied scatterer maps (one plane per date); when set,
    /// detection is skipped.
    pub external_scatterers: Option<Vec<Vec<Complex64>>>,
}

impl Default for WhitenParams {
    fn default() -> Self {
        WhitenParams {
            enabled: true,
            coh_window: 7,
            ds_quantile: 0.999,
            guard: COHERENCE_GUARD,
            external_scatterers: None,
        }
    }
}

/// A preprocessed stack: centered (and possibly whitened) amplitudes plus
/// the per-date maps that produced them. The reference plane is always the
/// centered input, bit for bit.
#[derive(Debug, Clone)]
pub struct WhitenedStack {
    pub data: ComplexStack,
    pub ref_index: usize,
    /// Coherence maps per date; `None` at the reference date and when the
    /// whitening stage was disabled.
    pub maps: Vec<Option<CoherenceMaps>>,
    /// Scatterer maps used during whitening (zeros when disabled).
    pub scatterers: Vec<Vec<Complex64>>,
    /// Number of pixels whose coherence hit the saturation guard.
    pub saturated: usize,
}

impl WhitenedStack {
    /// Pass-through wrapper for stacks that skip the whitening stage.
    pub fn pass_through(stack: ComplexStack, ref_index: usize) -> Result<Self> {
        if ref_index >= stack.t() {
            return Err(Error::OutOfBounds(format!("ref date {ref_index} for T = {}", stack.t())));
        }
        let t = stack.t();
        let n = stack.pixels();
        Ok(WhitenedStack {
            data: stack.permute_layout(Layout::DateMajor),
            ref_index,
            maps: vec![None; t],
            scatterers: vec![vec![Complex64::new(0.0, 0.0); n]; t],
            saturated: 0,
        })
    }

    pub fn t(&self) -> usize {
        self.data.t()
    }

    /// Spatial crop keeping the reference convention; maps are dropped.
    pub fn crop(&self, y0: usize, x0: usize, h: usize, w: usize) -> Result<WhitenedStack> {
        WhitenedStack::pass_through(self.data.crop(y0, x0, h, w)?, self.ref_index)
    }
}

/// Whiten one date against the reference, per pixel:
///
/// ```text
/// tau_w  = 1 / sqrt(1 - |g|^2)
/// out(k) = tau_w z_i(k) + (1 - tau_w) d_i(k)
///          - sqrt(r_i(k) / r_ref(k)) tau_w g(k) (z_ref(k) - d_ref(k))
/// ```
///
/// with `g` the pairwise coherence in the estimator convention of
/// [`CoherenceMaps`]. The reference plane is never modified. Returns the
/// whitened plane and the count of saturation-clamped pixels.
pub fn whiten_pair(
    z_i: &[Complex64],
    z_ref: &[Complex64],
    d_i: &[Complex64],
    d_ref: &[Complex64],
    maps: &CoherenceMaps,
    guard: f64,
) -> Result<(Vec<Complex64>, usize)> {
    let n = z_i.len();
    if z_ref.len() != n || d_i.len() != n || d_ref.len() != n || maps.gamma.len() != n {
        return Err(Error::ShapeMismatch("whitening planes differ in size".into()));
    }
    let r_i = maps.r_i.data();
    let r_ref = maps.r_ref.data();
    let cap = 1.0 - guard;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let saturated: usize = {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let counter = AtomicUsize::new(0);
        exec::for_each_indexed(&mut out, |k, slot| {
            let mut g = maps.gamma[k];
            let mag = g.norm();
            if mag >= cap {
                counter.fetch_add(1, Ordering::Relaxed);
                g *= cap / mag;
            }
            let tau_w = 1.0 / (1.0 - g.norm_sqr()).sqrt();
            let ratio = (r_i[k] / r_ref[k]).sqrt();
            *slot = tau_w * z_i[k] + (1.0 - tau_w) * d_i[k] - ratio * tau_w * g * (z_ref[k] - d_ref[k]);
        });
        counter.into_inner()
    };
    Ok((out, saturated))
}

/// Run the full preprocessing chain on a centered stack: scatterer
/// detection, pairwise coherence estimation and whitening of every
/// non-reference date. With `enabled = false` the output equals the input.
pub fn whiten_stack(stack: &ComplexStack, ref_index: usize, params: &WhitenParams) -> Result<WhitenedStack> {
    if ref_index >= stack.t() {
        return Err(Error::OutOfBounds(format!("ref date {ref_index} for T = {}", stack.t())));
    }
    let stack = stack.permute_layout(Layout::DateMajor);
    let t = stack.t();
    if !params.enabled || t < 2 {
        return WhitenedStack::pass_through(stack, ref_index);
    }
    let (h, w) = (stack.h(), stack.w());
    let n = h * w;

    let scatterers: Vec<Vec<Complex64>> = match &params.external_scatterers {
        Some(maps) => {
            if maps.len() != t || maps.iter().any(|m| m.len() != n) {
                return Err(Error::ShapeMismatch("external scatterer maps mismatch stack".into()));
            }
            maps.clone()
        }
        None => {
            let planes: Vec<&[Complex64]> = (0..t).map(|d| stack.plane(d)).collect();
            let detected: Vec<Result<Vec<Complex64>>> = exec::map_indexed(t, |d| {
                detect_dominant_scatterers(planes[d], h, w, params.ds_quantile)
            });
            detected.into_iter().collect::<Result<Vec<_>>>()?
        }
    };

    let mut out = stack.clone();
    let mut maps_out: Vec<Option<CoherenceMaps>> = vec![None; t];
    let mut saturated = 0usize;
    for date in 0..t {
        if date == ref_index {
            continue;
        }
        let maps = estimate_coherence_pair(
            stack.plane(date),
            stack.plane(ref_index),
            &scatterers[date],
            &scatterers[ref_index],
            h,
            w,
            params.coh_window,
        )?;
        let (plane, sat) = whiten_pair(
            stack.plane(date),
            stack.plane(ref_index),
            &scatterers[date],
            &scatterers[ref_index],
            &maps,
            params.guard,
        )?;
        out.plane_mut(date).copy_from_slice(&plane);
        maps_out[date] = Some(maps);
        saturated += sat;
    }
    Ok(WhitenedStack { data: out, ref_index, maps: maps_out, scatterers, saturated })
}
