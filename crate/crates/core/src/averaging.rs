//! Phase-averaged right-hand sides and the local mean correction.
//!
//! Every kernel sum evaluates its nodes independently (in parallel for large
//! kernels) and then accumulates them in ascending node order, so results are
//! bit-identical regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{AveragingKernel, KernelParams};
use crate::models::ModelSystem;
use crate::numerics::SpectralState;

const PARALLEL_NODES: usize = 32;

/// How the mean correction `C` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorrectionStrategy {
    /// `C = 0`: plain phase-averaging.
    None,
    /// The model's closed-form infinite-window average.
    Classical,
    /// Kernel average over a finite window `eta_c`.
    Local { eta_c: f64 },
}

/// A mean-correction value together with how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCorrection {
    pub values: SpectralState,
    pub strategy: CorrectionStrategy,
}

/// Weighted kernel sum of `term(s_k)`, accumulated in ascending node order.
pub fn kernel_sum<F>(kernel: &AveragingKernel, term: F) -> SpectralState
where
    F: Fn(f64) -> SpectralState + Sync,
{
    let terms: Vec<SpectralState> = if kernel.len() >= PARALLEL_NODES {
        kernel.nodes().par_iter().map(|&s| term(s)).collect()
    } else {
        kernel.nodes().iter().map(|&s| term(s)).collect()
    };
    let mut iter = terms.into_iter().zip(kernel.weights());
    let (first, w0) = iter.next().expect("kernel has at least one node");
    let mut acc = first.scaled(*w0);
    for (t, w) in iter {
        acc.axpy(*w, &t);
    }
    acc
}

/// Unaveraged modulation-variable tendency `e^{tL/eps} N*(e^{-tL/eps} V)`.
pub fn modvar_rhs(model: &dyn ModelSystem, v: &SpectralState, t: f64) -> SpectralState {
    let u = model.apply_exp(-t, v);
    model.apply_exp(t, &model.dissipated_nonlinear(&u))
}

/// Kernel average of [`modvar_rhs`] over phase shifts `t + s_k`.
pub fn phase_averaged_rhs(
    model: &dyn ModelSystem,
    vbar: &SpectralState,
    t: f64,
    kernel: &AveragingKernel,
) -> SpectralState {
    kernel_sum(kernel, |s| modvar_rhs(model, vbar, t + s))
}

/// Local mean correction `C = sum_k w_k N(e^{-(t + r_k) L/eps} W)`.
///
/// Uses the bare nonlinearity: dissipation only enters the averaged tendency.
pub fn local_mean_correction(
    model: &dyn ModelSystem,
    w: &SpectralState,
    t: f64,
    kernel_c: &AveragingKernel,
) -> MeanCorrection {
    let values = kernel_sum(kernel_c, |r| model.nonlinear(&model.apply_exp(-(t + r), w)));
    MeanCorrection {
        values,
        strategy: CorrectionStrategy::Local {
            eta_c: kernel_c.eta(),
        },
    }
}

/// Mean-corrected averaged tendency
/// `sum_k w_k e^{(t+s_k)L/eps} [N*(e^{-(t+s_k)L/eps} W + eps L^+ C) - L L^+ C]`.
pub fn mean_corrected_rhs(
    model: &dyn ModelSystem,
    wbar: &SpectralState,
    t: f64,
    kernel: &AveragingKernel,
    correction: &SpectralState,
) -> SpectralState {
    let shift = model.apply_linear_inverse(correction).scaled(model.eps());
    let projected = model.apply_range_projector(correction);
    kernel_sum(kernel, |s| {
        let tau = t + s;
        let mut u = model.apply_exp(-tau, wbar);
        u.axpy(1.0, &shift);
        let mut n = model.dissipated_nonlinear(&u);
        n.axpy(-1.0, &projected);
        model.apply_exp(tau, &n)
    })
}

/// A [`CorrectionStrategy`] resolved against a model, ready to evaluate `C(W, t)`.
#[derive(Debug, Clone)]
pub enum Corrector {
    Zero,
    Classical,
    Local(AveragingKernel),
}

impl Corrector {
    pub fn new(strategy: CorrectionStrategy, model: &dyn ModelSystem, params: &KernelParams) -> Result<Self> {
        match strategy {
            CorrectionStrategy::None => Ok(Self::Zero),
            CorrectionStrategy::Classical => {
                let probe = SpectralState::zeros(model.n_fields(), model.n_modes());
                if model.classical_correction(&probe).is_none() {
                    return Err(Error::NoClassicalCorrection(model.name().to_string()));
                }
                Ok(Self::Classical)
            }
            CorrectionStrategy::Local { eta_c } => Ok(Self::Local(params.kernel(eta_c, model.omega_max(), model.eps())?)),
        }
    }

    pub fn strategy(&self) -> CorrectionStrategy {
        match self {
            Self::Zero => CorrectionStrategy::None,
            Self::Classical => CorrectionStrategy::Classical,
            Self::Local(k) => CorrectionStrategy::Local { eta_c: k.eta() },
        }
    }

    /// Kernel nodes per evaluation (`K_r`); zero for the non-kernel strategies.
    pub fn node_count(&self) -> usize {
        match self {
            Self::Local(k) => k.len(),
            _ => 0,
        }
    }

    pub fn evaluate(&self, model: &dyn ModelSystem, w: &SpectralState, t: f64) -> SpectralState {
        match self {
            Self::Zero => SpectralState::zeros(model.n_fields(), model.n_modes()),
            Self::Classical => model
                .classical_correction(w)
                .expect("checked at construction"),
            Self::Local(kernel) => local_mean_correction(model, w, t, kernel).values,
        }
    }
}
