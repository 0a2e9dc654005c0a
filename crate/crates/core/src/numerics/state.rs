use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex coefficients indexed by `(field, mode)`.
///
/// Storage is field-major: all modes of field 0, then field 1, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    n_fields: usize,
    n_modes: usize,
    data: Vec<Complex64>,
}

impl SpectralState {
    pub fn zeros(n_fields: usize, n_modes: usize) -> Self {
        Self {
            n_fields,
            n_modes,
            data: vec![Complex64::new(0.0, 0.0); n_fields * n_modes],
        }
    }

    pub fn from_vec(n_fields: usize, n_modes: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n_fields * n_modes {
            return Err(Error::LengthMismatch {
                expected: n_fields * n_modes,
                actual: data.len(),
            });
        }
        Ok(Self {
            n_fields,
            n_modes,
            data,
        })
    }

    /// Stacks equal-length spectra, one per field.
    pub fn from_fields(fields: &[Vec<Complex64>]) -> Result<Self> {
        let n_modes = fields.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(fields.len() * n_modes);
        for f in fields {
            if f.len() != n_modes {
                return Err(Error::LengthMismatch {
                    expected: n_modes,
                    actual: f.len(),
                });
            }
            data.extend_from_slice(f);
        }
        Ok(Self {
            n_fields: fields.len(),
            n_modes,
            data,
        })
    }

    pub fn n_fields(&self) -> usize {
        self.n_fields
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_fields, self.n_modes)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn field(&self, f: usize) -> &[Complex64] {
        &self.data[f * self.n_modes..(f + 1) * self.n_modes]
    }

    pub fn field_mut(&mut self, f: usize) -> &mut [Complex64] {
        &mut self.data[f * self.n_modes..(f + 1) * self.n_modes]
    }

    pub fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                actual: other.shape(),
            });
        }
        Ok(())
    }

    /// `self += alpha * x`.
    ///
    /// # Panics
    /// If the shapes differ.
    pub fn axpy(&mut self, alpha: f64, x: &Self) {
        assert_eq!(self.shape(), x.shape(), "axpy shape mismatch");
        for (y, xv) in self.data.iter_mut().zip(&x.data) {
            *y += xv * alpha;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            n_fields: self.n_fields,
            n_modes: self.n_modes,
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Sum of complex moduli over every entry.
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for SpectralState {
    type Output = Complex64;

    fn index(&self, (f, j): (usize, usize)) -> &Complex64 {
        &self.data[f * self.n_modes + j]
    }
}

impl IndexMut<(usize, usize)> for SpectralState {
    fn index_mut(&mut self, (f, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[f * self.n_modes + j]
    }
}

impl Add for &SpectralState {
    type Output = SpectralState;

    fn add(self, rhs: &SpectralState) -> SpectralState {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        SpectralState {
            n_fields: self.n_fields,
            n_modes: self.n_modes,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SpectralState {
    type Output = SpectralState;

    fn sub(self, rhs: &SpectralState) -> SpectralState {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        SpectralState {
            n_fields: self.n_fields,
            n_modes: self.n_modes,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<Complex64> for &SpectralState {
    type Output = SpectralState;

    fn mul(self, rhs: Complex64) -> SpectralState {
        SpectralState {
            n_fields: self.n_fields,
            n_modes: self.n_modes,
            data: self.data.iter().map(|a| a * rhs).collect(),
        }
    }
}
