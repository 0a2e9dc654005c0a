//! Exponential-bump averaging kernel.
//!
//! The continuous kernel on `(-eta/2, eta/2)` is proportional to
//! `exp(-eta / (gamma (eta/2 + s) (eta/2 - s)))` and vanishes outside. It is
//! sampled at `K` cell-centred nodes and normalized so the discrete weights
//! sum to one; the continuous normalization constant is never formed.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GAMMA: f64 = 4.0;
pub const DEFAULT_SAMPLES_PER_PERIOD: f64 = 4.0;
pub const DEFAULT_K_MIN: usize = 8;

/// Discrete averaging kernel: nodes `s_k` and normalized weights `w_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragingKernel {
    eta: f64,
    gamma: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl AveragingKernel {
    /// The `eta = 0` kernel: a single node at zero with unit weight.
    pub fn pointwise() -> Self {
        Self {
            eta: 0.0,
            gamma: DEFAULT_GAMMA,
            nodes: vec![0.0],
            weights: vec![1.0],
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Discrete average of `exp(i freq s)` over the kernel.
    pub fn chi(&self, freq: f64) -> Complex64 {
        self.iter()
            .map(|(s, w)| Complex64::from_polar(w, freq * s))
            .sum()
    }
}

/// Samples the bump kernel of window `eta` and decay `gamma` at `k` nodes.
pub fn build_kernel(eta: f64, gamma: f64, k: usize) -> Result<AveragingKernel> {
    if k < 1 {
        return Err(Error::InvalidKernel("node count must be at least 1".into()));
    }
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidKernel(format!("window length {eta} must be finite and >= 0")));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidKernel(format!("decay rate {gamma} must be positive")));
    }
    if eta == 0.0 {
        return Ok(AveragingKernel {
            gamma,
            ..AveragingKernel::pointwise()
        });
    }

    let kf = k as f64;
    let nodes: Vec<f64> = (1..=k)
        .map(|i| ((2.0 * i as f64 - 1.0) / (2.0 * kf) - 0.5) * eta)
        .collect();
    // Log-space evaluation: for small eta the raw values underflow.
    let log_raw: Vec<f64> = nodes
        .iter()
        .map(|&s| -eta / (gamma * (0.5 * eta + s) * (0.5 * eta - s)))
        .collect();
    let peak = log_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = log_raw.iter().map(|v| (v - peak).exp()).collect();

    // Pairwise-symmetric summation keeps the weights exactly even.
    let mut total = 0.0;
    for i in 0..k / 2 {
        total += raw[i] + raw[k - 1 - i];
    }
    if k % 2 == 1 {
        total += raw[k / 2];
    }
    let mut weights: Vec<f64> = raw.iter().map(|v| v / total).collect();
    for i in 0..k / 2 {
        weights[k - 1 - i] = weights[i];
    }

    Ok(AveragingKernel {
        eta,
        gamma,
        nodes,
        weights,
    })
}

/// Node count `max(k_min, ceil(P eta omega_max / (2 pi eps)))`; one node when `eta = 0`.
pub fn sample_count(eta: f64, omega_max: f64, eps: f64, samples_per_period: f64, k_min: usize) -> usize {
    if eta == 0.0 {
        return 1;
    }
    let raw = (samples_per_period * eta * omega_max / (2.0 * PI * eps)).ceil();
    (raw as usize).max(k_min)
}

/// Kernel shape and resolution settings shared by the phase and mean-correction averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub gamma: f64,
    pub p: f64,
    pub k_min: usize,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            p: DEFAULT_SAMPLES_PER_PERIOD,
            k_min: DEFAULT_K_MIN,
        }
    }
}

impl KernelParams {
    pub fn node_count(&self, eta: f64, omega_max: f64, eps: f64) -> usize {
        sample_count(eta, omega_max, eps, self.p, self.k_min)
    }

    /// Kernel of window `eta` resolved for a model with fastest frequency `omega_max / eps`.
    pub fn kernel(&self, eta: f64, omega_max: f64, eps: f64) -> Result<AveragingKernel> {
        build_kernel(eta, self.gamma, self.node_count(eta, omega_max, eps))
    }
}
