//! Raster containers for multi-temporal single-look-complex stacks.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Memory ordering of a stack buffer.
///
/// `DateMajor` stores one full image per date, dates concatenated
/// (`idx = t*H*W + k`). `PixelMajor` stores the per-pixel date vector
/// contiguously (`idx = k*T + t`). Converting between the two is the
/// re-indexing the permutation operator performs on the stacked vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    DateMajor,
    PixelMajor,
}

/// Storage precision of the on-disk container. In memory everything is f64.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

/// A T x H x W complex-valued raster stack.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStack {
    data: Vec<Complex64>,
    t: usize,
    h: usize,
    w: usize,
    layout: Layout,
    pub dtype: Dtype,
}

impl ComplexStack {
    pub fn zeros(t: usize, h: usize, w: usize) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); t * h * w],
            t,
            h,
            w,
            layout: Layout::DateMajor,
            dtype: Dtype::F64,
        }
    }

    pub fn from_vec(t: usize, h: usize, w: usize, layout: Layout, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != t * h * w {
            return Err(Error::ShapeMismatch(format!(
                "stack data length {} != T*H*W = {}",
                data.len(),
                t * h * w
            )));
        }
        Ok(Self { data, t, h, w, layout, dtype: Dtype::F64 })
    }

    pub fn t(&self) -> usize {
        self.t
    }
    pub fn h(&self) -> usize {
        self.h
    }
    pub fn w(&self) -> usize {
        self.w
    }
    pub fn pixels(&self) -> usize {
        self.h * self.w
    }
    pub fn layout(&self) -> Layout {
        self.layout
    }
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    #[inline]
    pub fn index_of(&self, t: usize, k: usize) -> usize {
        match self.layout {
            Layout::DateMajor => t * self.pixels() + k,
            Layout::PixelMajor => k * self.t + t,
        }
    }

    #[inline]
    pub fn at(&self, t: usize, k: usize) -> Complex64 {
        self.data[self.index_of(t, k)]
    }

    #[inline]
    pub fn at_mut(&mut self, t: usize, k: usize) -> &mut Complex64 {
        let i = self.index_of(t, k);
        &mut self.data[i]
    }

    /// The image plane of date `t`. Requires date-major layout.
    pub fn plane(&self, t: usize) -> &[Complex64] {
        assert_eq!(self.layout, Layout::DateMajor, "plane() needs date-major layout");
        let n = self.pixels();
        &self.data[t * n..(t + 1) * n]
    }

    pub fn plane_mut(&mut self, t: usize) -> &mut [Complex64] {
        assert_eq!(self.layout, Layout::DateMajor, "plane_mut() needs date-major layout");
        let n = self.pixels();
        &mut self.data[t * n..(t + 1) * n]
    }

    /// Re-order the samples to the target layout. Exact bijection: applying
    /// it twice is the identity, bit for bit.
    pub fn permute_layout(&self, target: Layout) -> ComplexStack {
        if self.layout == target {
            return self.clone();
        }
        let n = self.pixels();
        let t_count = self.t;
        let mut out = vec![Complex64::new(0.0, 0.0); self.data.len()];
        match target {
            Layout::PixelMajor => {
                // date-major -> pixel-major
                crate::exec::for_each_chunk(&mut out, t_count, |k, chunk| {
                    for (t, slot) in chunk.iter_mut().enumerate() {
                        *slot = self.data[t * n + k];
                    }
                });
            }
            Layout::DateMajor => {
                crate::exec::for_each_chunk(&mut out, n, |t, chunk| {
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        *slot = self.data[k * t_count + t];
                    }
                });
            }
        }
        ComplexStack { data: out, t: self.t, h: self.h, w: self.w, layout: target, dtype: self.dtype }
    }

    /// Crop a spatial window (same dates). Requires date-major layout.
    pub fn crop(&self, y0: usize, x0: usize, ch: usize, cw: usize) -> Result<ComplexStack> {
        if y0 + ch > self.h || x0 + cw > self.w {
            return Err(Error::OutOfBounds(format!(
                "crop {}x{} at ({},{}) exceeds {}x{}",
                ch, cw, y0, x0, self.h, self.w
            )));
        }
        let src = self.permute_layout(Layout::DateMajor);
        let mut data = Vec::with_capacity(self.t * ch * cw);
        for t in 0..self.t {
            let plane = src.plane(t);
            for y in 0..ch {
                let row = (y0 + y) * self.w + x0;
                data.extend_from_slice(&plane[row..row + cw]);
            }
        }
        ComplexStack::from_vec(self.t, ch, cw, Layout::DateMajor, data)
    }
}

/// A real-valued H x W image plane.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    data: Vec<f64>,
    h: usize,
    w: usize,
}

impl RealImage {
    pub fn zeros(h: usize, w: usize) -> Self {
        Self { data: vec![0.0; h * w], h, w }
    }

    pub fn constant(h: usize, w: usize, value: f64) -> Self {
        Self { data: vec![value; h * w], h, w }
    }

    /// Checked constructor: length must match and all values must be finite.
    pub fn from_vec(h: usize, w: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != h * w {
            return Err(Error::ShapeMismatch(format!(
                "image data length {} != H*W = {}",
                data.len(),
                h * w
            )));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("RealImage::from_vec".into()));
        }
        Ok(Self { data, h, w })
    }

    pub fn from_fn(h: usize, w: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(h * w);
        for y in 0..h {
            for x in 0..w {
                data.push(f(y, x));
            }
        }
        Self { data, h, w }
    }

    pub fn h(&self) -> usize {
        self.h
    }
    pub fn w(&self) -> usize {
        self.w
    }
    pub fn len(&self) -> usize {
        self.data.len()
    }
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn at(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.w + x]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, v: f64) {
        self.data[y * self.w + x] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealImage {
        RealImage { data: self.data.iter().map(|&v| f(v)).collect(), h: self.h, w: self.w }
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

/// Split a complex plane into its real and imaginary components.
pub fn split_reim(plane: &[Complex64], h: usize, w: usize) -> (RealImage, RealImage) {
    assert_eq!(plane.len(), h * w);
    let re: Vec<f64> = plane.iter().map(|c| c.re).collect();
    let im: Vec<f64> = plane.iter().map(|c| c.im).collect();
    (RealImage { data: re, h, w }, RealImage { data: im, h, w })
}

/// Inverse of [`split_reim`]; exact round trip.
pub fn merge_reim(re: &RealImage, im: &RealImage) -> Result<Vec<Complex64>> {
    if re.h != im.h || re.w != im.w {
        return Err(Error::ShapeMismatch(format!(
            "merge_reim: {}x{} vs {}x{}",
            re.h, re.w, im.h, im.w
        )));
    }
    Ok(re.data.iter().zip(&im.data).map(|(&a, &b)| Complex64::new(a, b)).collect())
}
