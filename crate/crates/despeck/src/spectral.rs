//! Unitary 2D discrete Fourier transforms and spectral helpers.
//!
//! Both directions carry a 1/sqrt(H*W) factor so energy is preserved each
//! way (Parseval) and `dft2_inverse(dft2_forward(x)) == x` to round-off.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward unitary 2D DFT of a row-major H x W plane.
pub fn dft2_forward(plane: &[Complex64], h: usize, w: usize) -> Vec<Complex64> {
    dft2(plane, h, w, rustfft::FftDirection::Forward)
}

/// Inverse unitary 2D DFT of a row-major H x W plane.
pub fn dft2_inverse(plane: &[Complex64], h: usize, w: usize) -> Vec<Complex64> {
    dft2(plane, h, w, rustfft::FftDirection::Inverse)
}

fn dft2(plane: &[Complex64], h: usize, w: usize, dir: rustfft::FftDirection) -> Vec<Complex64> {
    assert_eq!(plane.len(), h * w, "plane length must be H*W");
    assert!(h >= 1 && w >= 1);
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(w, dir);
    let col_fft = planner.plan_fft(h, dir);

    let mut buf = plane.to_vec();
    for row in buf.chunks_mut(w) {
        row_fft.process(row);
    }
    // columns via transpose, FFT on rows, transpose back
    let mut tr = transpose(&buf, h, w);
    for col in tr.chunks_mut(h) {
        col_fft.process(col);
    }
    let mut out = transpose(&tr, w, h);
    let scale = 1.0 / ((h * w) as f64).sqrt();
    for v in &mut out {
        *v *= scale;
    }
    out
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// Signed frequency index of DFT bin `u` along an axis of length `n`:
/// 0, 1, ..., n/2, -(n/2-1), ..., -1 for even n.
#[inline]
pub fn signed_freq(u: usize, n: usize) -> i64 {
    let u = u as i64;
    let n = n as i64;
    if u <= n / 2 {
        u
    } else {
        u - n
    }
}

/// Circular 2D convolution of two real planes via the DFT.
pub fn circular_convolve_real(a: &[f64], b: &[f64], h: usize, w: usize) -> Vec<f64> {
    assert_eq!(a.len(), h * w);
    assert_eq!(b.len(), h * w);
    let ac: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let bc: Vec<Complex64> = b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let fa = dft2_forward(&ac, h, w);
    let fb = dft2_forward(&bc, h, w);
    // unitary convention: conv = sqrt(N) * F^-1(Fa .* Fb)
    let prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    let inv = dft2_inverse(&prod, h, w);
    let scale = ((h * w) as f64).sqrt();
    inv.iter().map(|c| c.re * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent O(N^2) DFT used as the oracle for the fast path.
    pub(crate) fn naive_dft2(plane: &[Complex64], h: usize, w: usize, inverse: bool) -> Vec<Complex64> {
        let sign = if inverse { 1.0 } else { -1.0 };
        let norm = 1.0 / ((h * w) as f64).sqrt();
        let mut out = vec![c(0.0, 0.0); h * w];
        for v in 0..h {
            for u in 0..w {
                let mut acc = c(0.0, 0.0);
                for y in 0..h {
                    for x in 0..w {
                        let ph = sign
                            * std::f64::consts::TAU
                            * (u as f64 * x as f64 / w as f64 + v as f64 * y as f64 / h as f64);
                        acc += plane[y * w + x] * c(ph.cos(), ph.sin());
                    }
                }
                out[v * w + u] = acc * norm;
            }
        }
        out
    }

    #[test]
    fn zeros_stay_zeros() {
        let out = dft2_forward(&vec![c(0.0, 0.0); 12], 3, 4);
        assert!(out.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn impulse_becomes_constant_quarter() {
        let mut plane = vec![c(0.0, 0.0); 16];
        plane[0] = c(1.0, 0.0);
        let out = dft2_forward(&plane, 4, 4);
        for v in out {
            assert!((v.re - 0.25).abs() < 1e-14 && v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn matches_naive_dft_oracle() {
        let mut rng = crate::rng::RngStream::new(77, 0);
        for &(h, w) in &[(4usize, 4usize), (3, 5), (8, 6)] {
            let plane: Vec<Complex64> =
                (0..h * w).map(|_| c(rng.next_gaussian(), rng.next_gaussian())).collect();
            let fast = dft2_forward(&plane, h, w);
            let slow = naive_dft2(&plane, h, w, false);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-10, "{a} vs {b}");
            }
            let back = dft2_inverse(&fast, h, w);
            for (a, b) in back.iter().zip(&plane) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_energy_preserved() {
        let mut rng = crate::rng::RngStream::new(5, 1);
        let plane: Vec<Complex64> = (0..64 * 32).map(|_| c(rng.next_gaussian(), rng.next_gaussian())).collect();
        let spec = dft2_forward(&plane, 32, 64);
        let e1: f64 = plane.iter().map(|v| v.norm_sqr()).sum();
        let e2: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
        assert!(((e1 - e2) / e1).abs() < 1e-12);
    }

    #[test]
    fn signed_freq_wraps() {
        assert_eq!(signed_freq(0, 8), 0);
        assert_eq!(signed_freq(4, 8), 4);
        assert_eq!(signed_freq(5, 8), -3);
        assert_eq!(signed_freq(7, 8), -1);
        assert_eq!(signed_freq(2, 5), 2);
        assert_eq!(signed_freq(3, 5), -2);
    }

    #[test]
    fn circular_convolution_with_delta_is_identity() {
        let mut rng = crate::rng::RngStream::new(13, 0);
        let a: Vec<f64> = (0..24).map(|_| rng.next_gaussian()).collect();
        let mut delta = vec![0.0; 24];
        delta[0] = 1.0;
        let out = circular_convolve_real(&a, &delta, 4, 6);
        for (x, y) in out.iter().zip(&a) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
