use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelSystem;
use crate::error::{Error, Result};
use crate::numerics::{circular_convolution, BlockOperator, GridSpec, SpectralState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KgParams {
    pub eps: f64,
}

/// Klein-Gordon-type equation `u_tt + (u - u_xx) / eps^2 = -u^2` on a periodic grid.
///
/// The state is `[a_hat, b_hat]` with `a = (omega / eps) u` applied per mode and
/// `b = u_t`, so `L` has skew-symmetric 2x2 blocks `[[0, -omega], [omega, 0]]`
/// with `omega_j = sqrt(1 + k_j^2)`.
#[derive(Debug, Clone)]
pub struct KgModel {
    params: KgParams,
    grid: GridSpec,
    omega: Vec<f64>,
    linear: BlockOperator,
    inverse: BlockOperator,
    projector: BlockOperator,
}

impl KgModel {
    pub fn new(params: KgParams, grid: GridSpec) -> Self {
        assert!(params.eps > 0.0, "eps must be positive");
        let omega: Vec<f64> = grid.wavenumbers().iter().map(|k| (1.0 + k * k).sqrt()).collect();
        let z = Complex64::new(0.0, 0.0);
        let r = |v: f64| Complex64::new(v, 0.0);
        let n = grid.len();
        let linear = BlockOperator::from_fn(2, n, |j| vec![z, r(-omega[j]), r(omega[j]), z]);
        let inverse = BlockOperator::from_fn(2, n, |j| vec![z, r(1.0 / omega[j]), r(-1.0 / omega[j]), z]);
        Self {
            params,
            grid,
            omega,
            linear,
            inverse,
            projector: BlockOperator::identity(2, n),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Linear frequencies `omega_j` in DFT order.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Spectrum of `u = (eps / omega) a`.
    pub fn displacement_spectrum(&self, a_hat: &[Complex64]) -> Vec<Complex64> {
        a_hat
            .iter()
            .zip(&self.omega)
            .map(|(a, w)| a * (self.params.eps / w))
            .collect()
    }

    /// Physical-space values of the `a` field.
    pub fn physical_a(&self, u: &SpectralState) -> Vec<f64> {
        self.grid
            .inverse(u.field(0))
            .expect("state matches grid")
            .iter()
            .map(|v| v.re)
            .collect()
    }
}

/// Infinite-window average of the `b` slot of `N(exp(-t L / eps) W)` for `W = [c_hat, d_hat]`.
///
/// Only pairs of modes with equal frequency survive the average: every pair
/// `(j, -j)` feeds the mean mode, and for even `i != 0` the two modes `j` with
/// `2 j = i (mod N)` contribute. Odd entries vanish.
pub fn kg_classical_correction(
    c_hat: &[Complex64],
    d_hat: &[Complex64],
    omega: &[f64],
    eps: f64,
) -> Result<Vec<Complex64>> {
    let n = c_hat.len();
    for len in [d_hat.len(), omega.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, actual: len });
        }
    }
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!("classical correction needs an even grid, got {n}")));
    }
    let scale = -eps * eps / (2.0 * n as f64);
    let pair = |j: usize, l: usize| (c_hat[j] * c_hat[l] + d_hat[j] * d_hat[l]) / (omega[j] * omega[j]);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    out[0] = (0..n).map(|j| pair(j, (n - j) % n)).sum::<Complex64>() * scale;
    for i in (2..n).step_by(2) {
        let (j1, j2) = (i / 2, (i + n) / 2);
        out[i] = (pair(j1, j1) + pair(j2, j2)) * scale;
    }
    Ok(out)
}

impl ModelSystem for KgModel {
    fn name(&self) -> &str {
        "kg"
    }

    fn eps(&self) -> f64 {
        self.params.eps
    }

    fn omega_max(&self) -> f64 {
        (1.0 + self.grid.k_max().powi(2)).sqrt()
    }

    fn n_fields(&self) -> usize {
        2
    }

    fn n_modes(&self) -> usize {
        self.grid.len()
    }

    fn linear(&self) -> &BlockOperator {
        &self.linear
    }

    fn linear_inverse(&self) -> &BlockOperator {
        &self.inverse
    }

    fn range_projector(&self) -> &BlockOperator {
        &self.projector
    }

    fn exp_operator(&self, t: f64) -> BlockOperator {
        let eps = self.params.eps;
        BlockOperator::from_fn(2, self.grid.len(), |j| {
            let (s, c) = (self.omega[j] * t / eps).sin_cos();
            [c, -s, s, c].iter().map(|&v| Complex64::new(v, 0.0)).collect()
        })
    }

    fn apply_exp(&self, t: f64, x: &SpectralState) -> SpectralState {
        let eps = self.params.eps;
        let mut out = x.clone();
        for (j, w) in self.omega.iter().enumerate() {
            let (s, c) = (w * t / eps).sin_cos();
            let (a, b) = (x[(0, j)], x[(1, j)]);
            out[(0, j)] = a * c - b * s;
            out[(1, j)] = a * s + b * c;
        }
        out
    }

    fn nonlinear(&self, u: &SpectralState) -> SpectralState {
        let disp = self.displacement_spectrum(u.field(0));
        let sq = circular_convolution(&disp, &disp).expect("equal lengths");
        let mut out = SpectralState::zeros(2, self.grid.len());
        for (o, v) in out.field_mut(1).iter_mut().zip(sq) {
            *o = -v;
        }
        out
    }

    fn classical_correction(&self, w: &SpectralState) -> Option<SpectralState> {
        let cb = kg_classical_correction(w.field(0), w.field(1), &self.omega, self.params.eps)
            .expect("state matches grid");
        let mut out = SpectralState::zeros(2, self.grid.len());
        out.field_mut(1).copy_from_slice(&cb);
        Some(out)
    }

    fn initial_state(&self) -> SpectralState {
        let a: Vec<f64> = self
            .grid
            .points()
            .iter()
            .map(|x| (-(x - PI).powi(2) / 2.0).exp())
            .collect();
        let a_hat = self.grid.forward(&a).expect("grid length");
        let b_hat = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        SpectralState::from_fields(&[a_hat, b_hat]).expect("equal lengths")
    }
}
