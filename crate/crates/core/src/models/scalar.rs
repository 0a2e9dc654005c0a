use num_complex::Complex64;

use super::ModelSystem;
use crate::numerics::{BlockOperator, SpectralState};

/// `du/dt + i omega u / eps = c` with a constant forcing `c`.
///
/// Every trajectory is known in closed form, which makes this the exactness
/// check for the averaged and mean-corrected pipelines.
#[derive(Debug, Clone)]
pub struct ConstantForcingModel {
    pub omega: f64,
    pub eps: f64,
    pub forcing: Complex64,
    pub u0: Complex64,
    linear: BlockOperator,
    inverse: BlockOperator,
    projector: BlockOperator,
}

impl ConstantForcingModel {
    pub fn new(omega: f64, eps: f64, forcing: Complex64, u0: Complex64) -> Self {
        Self {
            omega,
            eps,
            forcing,
            u0,
            linear: BlockOperator::diagonal(1, 1, |_| vec![Complex64::new(0.0, omega)]),
            inverse: BlockOperator::diagonal(1, 1, |_| vec![Complex64::new(0.0, -1.0 / omega)]),
            projector: BlockOperator::identity(1, 1),
        }
    }

    /// Standard-space solution `(i c eps / omega)(e^{-i omega t/eps} - 1) + e^{-i omega t/eps} u0`.
    pub fn exact_solution(&self, t: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, -self.omega * t / self.eps);
        let amp = Complex64::new(0.0, 1.0) * self.forcing * self.eps / self.omega;
        amp * (rot - 1.0) + rot * self.u0
    }

    /// Phase-averaged standard-space solution for an averaging factor `chi`.
    pub fn averaged_solution(&self, t: f64, chi: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, -self.omega * t / self.eps);
        let amp = Complex64::new(0.0, 1.0) * self.forcing * self.eps / self.omega;
        amp * chi * (rot - 1.0) + rot * self.u0
    }

    /// Averaging error `u - u_bar = (1 - chi)(i c eps / omega)(e^{-i omega t/eps} - 1)`.
    pub fn averaging_error(&self, t: f64, chi: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, -self.omega * t / self.eps);
        let amp = Complex64::new(0.0, 1.0) * self.forcing * self.eps / self.omega;
        amp * (1.0 - chi) * (rot - 1.0)
    }
}

impl ModelSystem for ConstantForcingModel {
    fn name(&self) -> &str {
        "scalar"
    }

    fn eps(&self) -> f64 {
        self.eps
    }

    fn omega_max(&self) -> f64 {
        self.omega.abs()
    }

    fn n_fields(&self) -> usize {
        1
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
        let phase = self.omega * t / self.eps;
        BlockOperator::diagonal(1, 1, |_| vec![Complex64::from_polar(1.0, phase)])
    }

    fn nonlinear(&self, _u: &SpectralState) -> SpectralState {
        SpectralState::from_vec(1, 1, vec![self.forcing]).expect("1x1 state")
    }

    fn classical_correction(&self, _w: &SpectralState) -> Option<SpectralState> {
        Some(self.nonlinear(&SpectralState::zeros(1, 1)))
    }

    fn initial_state(&self) -> SpectralState {
        SpectralState::from_vec(1, 1, vec![self.u0]).expect("1x1 state")
    }
}
