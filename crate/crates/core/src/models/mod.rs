//! Model systems in the standard form `dU/dt + L U / eps = N(U)`.
//!
//! Every model supplies the per-mode blocks of `L`, its (pseudo)inverse and
//! the range projector `L L^+`, a closed-form propagator `exp(t L / eps)`, the
//! nonlinearity and, where one exists, the classical (infinite-window) mean
//! correction.

mod kg;
mod rswe;
mod scalar;
mod spring;

pub use kg::{kg_classical_correction, KgModel, KgParams};
pub use rswe::{RsweModel, RsweParams, DEFAULT_HYPERVISCOSITY};
pub use scalar::ConstantForcingModel;
pub use spring::{SpringModel, SpringParams};

use crate::numerics::{BlockOperator, SpectralState};

pub trait ModelSystem: Send + Sync {
    fn name(&self) -> &str;

    /// Timescale separation `eps`.
    fn eps(&self) -> f64;

    /// Fastest linear frequency of `L` (before division by `eps`).
    fn omega_max(&self) -> f64;

    fn n_fields(&self) -> usize;

    fn n_modes(&self) -> usize;

    fn linear(&self) -> &BlockOperator;

    /// `L^{-1}`, or the Moore-Penrose pseudoinverse `L^+` when `L` is singular.
    fn linear_inverse(&self) -> &BlockOperator;

    /// `L L^+`; the identity when `L` is invertible.
    fn range_projector(&self) -> &BlockOperator;

    /// `exp(t L / eps)` per mode; `t` carries the sign.
    fn exp_operator(&self, t: f64) -> BlockOperator;

    fn apply_exp(&self, t: f64, x: &SpectralState) -> SpectralState {
        self.exp_operator(t).apply(x).expect("state shape matches model")
    }

    fn apply_linear(&self, x: &SpectralState) -> SpectralState {
        self.linear().apply(x).expect("state shape matches model")
    }

    fn apply_linear_inverse(&self, x: &SpectralState) -> SpectralState {
        self.linear_inverse().apply(x).expect("state shape matches model")
    }

    fn apply_range_projector(&self, x: &SpectralState) -> SpectralState {
        self.range_projector().apply(x).expect("state shape matches model")
    }

    fn nonlinear(&self, u: &SpectralState) -> SpectralState;

    /// Nonlinearity plus any numerical dissipation.
    fn dissipated_nonlinear(&self, u: &SpectralState) -> SpectralState {
        self.nonlinear(u)
    }

    /// Closed-form infinite-window average of `N(exp(-r L / eps) W)`, if the model has one.
    fn classical_correction(&self, _w: &SpectralState) -> Option<SpectralState> {
        None
    }

    fn initial_state(&self) -> SpectralState;
}
