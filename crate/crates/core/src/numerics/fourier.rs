use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward DFT: `X_j = sum_n x_n exp(-2 pi i j n / N)`.
pub fn dft_forward(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    if buf.is_empty() {
        return buf;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(&mut buf);
    buf
}

pub fn dft_forward_real(x: &[f64]) -> Vec<Complex64> {
    let buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft_forward(&buf)
}

/// Inverse of [`dft_forward`], including the `1/N` factor.
pub fn dft_inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    if buf.is_empty() {
        return buf;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Discrete circular convolution `g_i = (1/N) sum_j a_j b_{(i - j) mod N}`.
///
/// With that normalization, the convolution of two unnormalized spectra is the
/// spectrum of the pointwise product of their physical fields.
pub fn circular_convolution(a: &[Complex64], b: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    let scale = 1.0 / n as f64;
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, aj) in a.iter().enumerate() {
            acc += aj * b[(i + n - j) % n];
        }
        *gi = acc * scale;
    }
    Ok(g)
}

/// `x_j == conj(x_{(N - j) mod N})` to `tol`, i.e. `x` is the spectrum of a real field.
pub fn is_conjugate_symmetric(x: &[Complex64], tol: f64) -> bool {
    let n = x.len();
    (0..n).all(|j| (x[j] - x[(n - j) % n].conj()).norm() <= tol)
}

/// Uniform periodic grid on `[0, 2 pi)` with DFT-ordered signed wavenumbers.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    n: usize,
    wavenumbers: Vec<f64>,
}

impl GridSpec {
    pub const LENGTH: f64 = 2.0 * PI;

    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N_x = {n} is not a power of two >= 2")));
        }
        let wavenumbers = (0..n)
            .map(|j| if j <= n / 2 { j as f64 } else { j as f64 - n as f64 })
            .collect();
        Ok(Self { n, wavenumbers })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `k_j = j` for `j <= N/2`, `j - N` otherwise.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn k_max(&self) -> f64 {
        (self.n / 2) as f64
    }

    /// Multipliers for a first derivative: `k_j`, except the Nyquist mode,
    /// which has no real-valued odd derivative and is set to zero.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        let mut k = self.wavenumbers.clone();
        k[self.n / 2] = 0.0;
        k
    }

    /// Grid points `x_n = 2 pi n / N`.
    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| Self::LENGTH * i as f64 / self.n as f64).collect()
    }

    pub fn forward(&self, field: &[f64]) -> Result<Vec<Complex64>> {
        self.check_len(field.len())?;
        Ok(dft_forward_real(field))
    }

    pub fn inverse(&self, spectrum: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(spectrum.len())?;
        Ok(dft_inverse(spectrum))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }
}
