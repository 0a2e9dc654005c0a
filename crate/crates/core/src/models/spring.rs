use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelSystem;
use crate::numerics::{BlockOperator, SpectralState};

/// Swinging spring parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringParams {
    /// Swing frequency `omega_R = sqrt(g / l)`.
    pub omega_r: f64,
    /// Resonance factor `rho = omega_Z / omega_R`.
    pub rho: f64,
    /// Unstretched spring length `l0`.
    pub l0: f64,
    /// Equilibrium length `l`.
    pub l: f64,
}

impl SpringParams {
    /// `g = pi^2`, `l = 1`, `m = 1`, `l0 = 1.2`, spring constant `rho^2 pi^2`.
    pub fn with_rho(rho: f64) -> Self {
        Self {
            omega_r: PI,
            rho,
            l0: 1.2,
            l: 1.0,
        }
    }

    pub fn omega_z(&self) -> f64 {
        self.rho * self.omega_r
    }

    /// Coupling `lambda = l0 omega_Z^2 / l^2`.
    pub fn lambda(&self) -> f64 {
        self.l0 * self.omega_z().powi(2) / (self.l * self.l)
    }
}

/// Three-degree-of-freedom elastic pendulum in complex coordinates
/// `U = [x + i p_x, y + i p_y, z + i p_z]`; the positions are the real parts.
#[derive(Debug, Clone)]
pub struct SpringModel {
    params: SpringParams,
    freqs: [f64; 3],
    linear: BlockOperator,
    inverse: BlockOperator,
    projector: BlockOperator,
}

impl SpringModel {
    pub fn new(params: SpringParams) -> Self {
        assert!(params.rho > 0.0, "resonance factor must be positive");
        let freqs = [params.omega_r, params.omega_r, params.rho * params.omega_r];
        Self {
            params,
            freqs,
            linear: BlockOperator::diagonal(3, 1, |_| freqs.iter().map(|&w| Complex64::new(0.0, w)).collect()),
            inverse: BlockOperator::diagonal(3, 1, |_| {
                freqs.iter().map(|&w| Complex64::new(0.0, -1.0 / w)).collect()
            }),
            projector: BlockOperator::identity(3, 1),
        }
    }

    pub fn params(&self) -> &SpringParams {
        &self.params
    }

    /// Real positions `(x, y, z)` of a state.
    pub fn positions(u: &SpectralState) -> [f64; 3] {
        [u[(0, 0)].re, u[(1, 0)].re, u[(2, 0)].re]
    }
}

impl ModelSystem for SpringModel {
    fn name(&self) -> &str {
        "spring"
    }

    fn eps(&self) -> f64 {
        1.0
    }

    fn omega_max(&self) -> f64 {
        self.freqs.iter().copied().fold(0.0, f64::max)
    }

    fn n_fields(&self) -> usize {
        3
    }

    fn n_modes(&self) -> usize {
        1
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
        let freqs = self.freqs;
        BlockOperator::diagonal(3, 1, |_| freqs.iter().map(|&w| Complex64::from_polar(1.0, w * t)).collect())
    }

    fn apply_exp(&self, t: f64, x: &SpectralState) -> SpectralState {
        let mut out = x.clone();
        for (f, &w) in self.freqs.iter().enumerate() {
            out[(f, 0)] *= Complex64::from_polar(1.0, w * t);
        }
        out
    }

    fn nonlinear(&self, u: &SpectralState) -> SpectralState {
        let SpringParams { omega_r, rho, .. } = self.params;
        let lambda = self.params.lambda();
        let [x, y, z] = Self::positions(u);
        let i = Complex64::new(0.0, 1.0);
        SpectralState::from_vec(
            3,
            1,
            vec![
                i * (lambda / omega_r * x * z),
                i * (lambda / omega_r * y * z),
                i * (lambda / (2.0 * rho * omega_r) * (x * x + y * y)),
            ],
        )
        .expect("3x1 state")
    }

    fn classical_correction(&self, w: &SpectralState) -> Option<SpectralState> {
        let SpringParams { omega_r, rho, .. } = self.params;
        let radial = w[(0, 0)].norm_sqr() + w[(1, 0)].norm_sqr();
        let zero = Complex64::new(0.0, 0.0);
        let cz = Complex64::new(0.0, self.params.lambda() / (4.0 * rho * omega_r) * radial);
        Some(SpectralState::from_vec(3, 1, vec![zero, zero, cz]).expect("3x1 state"))
    }

    fn initial_state(&self) -> SpectralState {
        SpectralState::from_vec(
            3,
            1,
            vec![
                Complex64::new(0.04, 0.0),
                Complex64::new(0.0, 0.03427 / PI),
                Complex64::new(0.08, 0.0),
            ],
        )
        .expect("3x1 state")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(v: [Complex64; 3]) -> SpectralState {
        SpectralState::from_vec(3, 1, v.to_vec()).unwrap()
    }

    #[test]
    fn nonlinearity_hand_evaluation() {
        let params = SpringParams::with_rho(2.0);
        let m = SpringModel::new(params);
        let u = state([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)]);
        let n = m.nonlinear(&u);
        let lambda = params.lambda();
        assert!((lambda - 1.2 * 4.0 * PI * PI).abs() < 1e-12);
        assert!((n[(0, 0)] - Complex64::new(0.0, lambda / PI * 2.0)).norm() < 1e-12);
        assert_eq!(n[(1, 0)], Complex64::new(0.0, 0.0));
        assert!((n[(2, 0)] - Complex64::new(0.0, lambda / (4.0 * PI))).norm() < 1e-12);
    }

    #[test]
    fn nonlinearity_ignores_momenta() {
        let m = SpringModel::new(SpringParams::with_rho(1.7));
        let a = state([Complex64::new(0.3, 5.0), Complex64::new(-0.2, 1.0), Complex64::new(0.1, -2.0)]);
        let b = state([Complex64::new(0.3, 0.0), Complex64::new(-0.2, 0.0), Complex64::new(0.1, 0.0)]);
        assert_eq!(m.nonlinear(&a), m.nonlinear(&b));
    }

    #[test]
    fn classical_correction_lives_in_z() {
        let m = SpringModel::new(SpringParams::with_rho(1.95));
        let w = state([Complex64::new(0.3, -0.4), Complex64::new(1.0, 2.0), Complex64::new(7.0, 1.0)]);
        let c = m.classical_correction(&w).unwrap();
        assert_eq!(c[(0, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(c[(1, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(c[(2, 0)].re, 0.0);
        let scale = m.params().lambda() / (4.0 * 1.95 * PI);
        assert!((c[(2, 0)].im / scale - 5.25).abs() < 1e-12);
    }

    #[test]
    fn operators_are_consistent() {
        let m = SpringModel::new(SpringParams::with_rho(2.5));
        assert!(m.linear().is_skew_hermitian(1e-15));
        assert_eq!(m.omega_max(), 2.5 * PI);
        let prod = m.linear().compose(m.linear_inverse()).unwrap();
        assert!(prod.max_abs_diff(&BlockOperator::identity(3, 1)) < 1e-15);
        let u0 = m.initial_state();
        let back = m.apply_exp(-1.3, &m.apply_exp(1.3, &u0));
        assert!(back.max_abs_diff(&u0) < 1e-15);
        let via_op = m.exp_operator(0.7).apply(&u0).unwrap();
        assert!(via_op.max_abs_diff(&m.apply_exp(0.7, &u0)) < 1e-15);
    }
}
