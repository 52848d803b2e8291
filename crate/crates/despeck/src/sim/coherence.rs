//! Temporal coherence matrices and their factorization.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Negative-pivot tolerance accepted as "numerically PSD".
const PSD_TOL: f64 = 1e-8;

/// Small dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!("matrix data length {} != {dim}^2", data.len())));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(dim, data.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    /// self * self^dagger.
    pub fn gram(&self) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(i, k) * self.get(j, k).conj();
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_hermitian_unit_diag(&self) -> Result<()> {
        for i in 0..self.dim {
            let d = self.get(i, i);
            if (d.re - 1.0).abs() > 1e-9 || d.im.abs() > 1e-9 {
                return Err(Error::NotPsd(format!("diagonal entry ({i},{i}) = {d} is not 1")));
            }
            for j in 0..i {
                let a = self.get(i, j);
                let b = self.get(j, i);
                if (a - b.conj()).norm() > 1e-9 {
                    return Err(Error::NotPsd(format!("entries ({i},{j})/({j},{i}) break Hermitian symmetry")));
                }
                if a.norm() > 1.0 + 1e-9 {
                    return Err(Error::NotPsd(format!("|coherence({i},{j})| = {} > 1", a.norm())));
                }
            }
        }
        Ok(())
    }
}

/// How the temporal coherence of the speckle is specified.
#[derive(Debug, Clone)]
pub enum CoherenceSpec {
    /// One Hermitian PSD matrix with unit diagonal, shared by all pixels.
    Explicit(CMatrix),
    /// Exponential decorrelation exp(-|t_i - t_j| / tau) over acquisition
    /// times. `tau = +inf` means full coherence; times default to 0..T-1.
    Exponential { dates: Vec<f64>, tau: f64 },
}

impl CoherenceSpec {
    pub fn exponential_uniform(t: usize, tau: f64) -> Self {
        CoherenceSpec::Exponential { dates: (0..t).map(|i| i as f64).collect(), tau }
    }

    pub fn identity(t: usize) -> Self {
        CoherenceSpec::Explicit(CMatrix::identity(t))
    }

    pub fn dim(&self) -> usize {
        match self {
            CoherenceSpec::Explicit(m) => m.dim(),
            CoherenceSpec::Exponential { dates, .. } => dates.len(),
        }
    }
}

/// Materialize the coherence matrix of a specification.
pub fn coherence_matrix(spec: &CoherenceSpec) -> Result<CMatrix> {
    match spec {
        CoherenceSpec::Explicit(m) => {
            m.check_hermitian_unit_diag()?;
            // PSD is checked by attempting the factorization
            cholesky_psd(m)?;
            Ok(m.clone())
        }
        CoherenceSpec::Exponential { dates, tau } => {
            if !(*tau > 0.0) && !tau.is_infinite() {
                return Err(Error::Config(format!("decorrelation time tau = {tau} must be > 0")));
            }
            let t = dates.len();
            let mut m = CMatrix::identity(t);
            for i in 0..t {
                for j in 0..i {
                    let g = if *tau == 0.0 {
                        0.0
                    } else {
                        (-(dates[i] - dates[j]).abs() / tau).exp()
                    };
                    m.set(i, j, Complex64::new(g, 0.0));
                    m.set(j, i, Complex64::new(g, 0.0));
                }
            }
            Ok(m)
        }
    }
}

/// Lower-triangular L with L L^dagger = gamma, real non-negative diagonal.
///
/// Semidefinite pivots within tolerance are clamped to zero; a pivot below
/// `-PSD_TOL` reports the matrix as indefinite.
pub fn cholesky_psd(gamma: &CMatrix) -> Result<CMatrix> {
    let n = gamma.dim();
    for i in 0..n {
        for j in 0..i {
            if (gamma.get(i, j) - gamma.get(j, i).conj()).norm() > 1e-9 {
                return Err(Error::NotPsd("input is not Hermitian".into()));
            }
        }
        if gamma.get(i, i).im.abs() > 1e-9 {
            return Err(Error::NotPsd("diagonal has imaginary component".into()));
        }
    }
    let mut l = CMatrix::zeros(n);
    for j in 0..n {
        let mut d = gamma.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if d < -PSD_TOL {
            return Err(Error::NotPsd(format!("negative pivot {d:.3e} at column {j}")));
        }
        let d = d.max(0.0).sqrt();
        l.set(j, j, Complex64::new(d, 0.0));
        for i in (j + 1)..n {
            let mut s = gamma.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            let v = if d > 0.0 { s / d } else { Complex64::new(0.0, 0.0) };
            l.set(i, j, v);
        }
    }
    Ok(l)
}

/// Average coherence: mean over all T^2 matrix entries (real part).
pub fn average_coherence(gamma: &CMatrix) -> f64 {
    let t = gamma.dim();
    let mut sum = 0.0;
    for i in 0..t {
        for j in 0..t {
            sum += gamma.get(i, j).re;
        }
    }
    sum / (t * t) as f64
}

/// Mean coherence over distinct date pairs (diagonal excluded).
///
/// The full-matrix average above never drops below 1/T because of the unit
/// diagonal; sweeping decorrelation strength is more naturally expressed on
/// the off-diagonal mean, which covers [0, 1].
pub fn average_coherence_offdiag(gamma: &CMatrix) -> f64 {
    let t = gamma.dim();
    if t < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..t {
        for j in 0..t {
            if i != j {
                sum += gamma.get(i, j).re;
            }
        }
    }
    sum / (t * t - t) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_infinite_tau_is_all_ones() {
        let m = coherence_matrix(&CoherenceSpec::exponential_uniform(4, f64::INFINITY)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn exponential_at_one_tau_gives_exp_minus_one() {
        let m = coherence_matrix(&CoherenceSpec::Exponential { dates: vec![0.0, 2.5], tau: 2.5 }).unwrap();
        let expected = (-1.0f64).exp();
        assert!((m.get(0, 1).re - expected).abs() < 1e-12);
        assert!((expected - 0.367_879_4).abs() < 1e-6);
    }

    #[test]
    fn explicit_identity_passes_through() {
        let m = coherence_matrix(&CoherenceSpec::identity(3)).unwrap();
        assert_eq!(m, CMatrix::identity(3));
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky_psd(&CMatrix::identity(5)).unwrap();
        assert_eq!(l, CMatrix::identity(5));
    }

    #[test]
    fn cholesky_2x2_hand_result() {
        let g = CMatrix::from_real_rows(2, &[1.0, 0.6, 0.6, 1.0]).unwrap();
        let l = cholesky_psd(&g).unwrap();
        assert!((l.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((l.get(1, 0).re - 0.6).abs() < 1e-15);
        assert!((l.get(1, 1).re - 0.8).abs() < 1e-15);
        assert_eq!(l.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cholesky_reconstructs_random_psd() {
        // random Hermitian PSD built as A A^dagger then normalized
        let mut rng = crate::rng::RngStream::new(21, 0);
        let n = 5;
        let mut a = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, Complex64::new(rng.next_gaussian(), rng.next_gaussian()));
            }
        }
        let g = a.gram();
        // normalize to unit diagonal so it looks like a coherence matrix
        let mut gn = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let d = (g.get(i, i).re * g.get(j, j).re).sqrt();
                gn.set(i, j, g.get(i, j) / d);
            }
        }
        let l = cholesky_psd(&gn).unwrap();
        assert!(l.gram().max_abs_diff(&gn) <= 1e-10);
        for j in 0..n {
            assert!(l.get(j, j).im.abs() < 1e-15 && l.get(j, j).re >= 0.0);
            for i in 0..j {
                assert_eq!(l.get(i, j), Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let g = CMatrix::from_real_rows(2, &[1.0, 1.5, 1.5, 1.0]).unwrap();
        assert!(matches!(cholesky_psd(&g), Err(Error::NotPsd(_))));
    }

    #[test]
    fn explicit_rejects_non_hermitian_and_overunit() {
        let g = CMatrix::from_rows(
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.3, 0.1),
                Complex64::new(0.3, 0.1),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(coherence_matrix(&CoherenceSpec::Explicit(g)).is_err());
        let g2 = CMatrix::from_real_rows(2, &[1.0, 1.2, 1.2, 1.0]).unwrap();
        assert!(coherence_matrix(&CoherenceSpec::Explicit(g2)).is_err());
    }

    #[test]
    fn average_coherence_examples() {
        assert!((average_coherence(&CMatrix::identity(3)) - 1.0 / 3.0).abs() < 1e-15);
        let ones = coherence_matrix(&CoherenceSpec::exponential_uniform(4, f64::INFINITY)).unwrap();
        assert!((average_coherence(&ones) - 1.0).abs() < 1e-15);
        let g = CMatrix::from_real_rows(2, &[1.0, 0.5, 0.5, 1.0]).unwrap();
        assert!((average_coherence(&g) - 0.75).abs() < 1e-15);
        assert!((average_coherence_offdiag(&g) - 0.5).abs() < 1e-15);
    }
}
