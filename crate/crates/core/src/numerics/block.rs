use num_complex::Complex64;

use super::SpectralState;
use crate::error::{Error, Result};

/// One dense `m x m` complex matrix per spectral mode.
///
/// Blocks are stored row-major, mode after mode. Applying the operator to a
/// [`SpectralState`] with `m` fields multiplies the `m`-vector of each mode by
/// that mode's block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    m: usize,
    n_modes: usize,
    data: Vec<Complex64>,
}

impl BlockOperator {
    /// Builds the operator from a closure returning the row-major block of mode `j`.
    ///
    /// # Panics
    /// If a returned block does not have `m * m` entries.
    pub fn from_fn(m: usize, n_modes: usize, mut block: impl FnMut(usize) -> Vec<Complex64>) -> Self {
        let mut data = Vec::with_capacity(n_modes * m * m);
        for j in 0..n_modes {
            let b = block(j);
            assert_eq!(b.len(), m * m, "block {j} has wrong size");
            data.extend(b);
        }
        Self { m, n_modes, data }
    }

    pub fn identity(m: usize, n_modes: usize) -> Self {
        Self::from_fn(m, n_modes, |_| {
            let mut b = vec![Complex64::new(0.0, 0.0); m * m];
            for i in 0..m {
                b[i * m + i] = Complex64::new(1.0, 0.0);
            }
            b
        })
    }

    /// Diagonal blocks; `diag(j)` returns the `m` diagonal entries of mode `j`.
    pub fn diagonal(m: usize, n_modes: usize, mut diag: impl FnMut(usize) -> Vec<Complex64>) -> Self {
        Self::from_fn(m, n_modes, |j| {
            let d = diag(j);
            let mut b = vec![Complex64::new(0.0, 0.0); m * m];
            for i in 0..m {
                b[i * m + i] = d[i];
            }
            b
        })
    }

    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn block(&self, j: usize) -> &[Complex64] {
        let mm = self.m * self.m;
        &self.data[j * mm..(j + 1) * mm]
    }

    /// Per-mode matrix-vector product.
    pub fn apply(&self, x: &SpectralState) -> Result<SpectralState> {
        if x.shape() != (self.m, self.n_modes) {
            return Err(Error::ShapeMismatch {
                expected: (self.m, self.n_modes),
                actual: x.shape(),
            });
        }
        let m = self.m;
        let mut out = SpectralState::zeros(m, self.n_modes);
        for j in 0..self.n_modes {
            let b = self.block(j);
            for r in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..m {
                    acc += b[r * m + c] * x[(c, j)];
                }
                out[(r, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Blockwise product `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if (self.m, self.n_modes) != (other.m, other.n_modes) {
            return Err(Error::ShapeMismatch {
                expected: (self.m, self.n_modes),
                actual: (other.m, other.n_modes),
            });
        }
        let m = self.m;
        Ok(Self::from_fn(m, self.n_modes, |j| {
            let a = self.block(j);
            let b = other.block(j);
            let mut c = vec![Complex64::new(0.0, 0.0); m * m];
            for r in 0..m {
                for k in 0..m {
                    let ark = a[r * m + k];
                    for col in 0..m {
                        c[r * m + col] += ark * b[k * m + col];
                    }
                }
            }
            c
        }))
    }

    /// Conjugate transpose of every block.
    pub fn adjoint(&self) -> Self {
        let m = self.m;
        Self::from_fn(m, self.n_modes, |j| {
            let b = self.block(j);
            let mut t = vec![Complex64::new(0.0, 0.0); m * m];
            for r in 0..m {
                for c in 0..m {
                    t[c * m + r] = b[r * m + c].conj();
                }
            }
            t
        })
    }

    /// Checks `B_j + B_j^H = 0` entrywise to `tol` for every block.
    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        let adj = self.adjoint();
        self.data
            .iter()
            .zip(&adj.data)
            .all(|(a, b)| (a + b).norm() <= tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.m, self.n_modes), (other.m, other.n_modes));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
