//! Finite phase-averaging for oscillatory multiscale differential equations.
//!
//! Systems of the form `dU/dt + L U / eps = N(U)` are mapped to a modulation
//! variable that removes the fast linear oscillation, and the resulting
//! tendency is averaged over a finite window of phase shifts with a smooth
//! bump kernel. The mean-corrected variant shifts the mapping by
//! `eps L^{-1} C`, where `C` is either the closed-form infinite-window average
//! of the nonlinearity (classical) or a finite-window kernel average (local).
//!
//! Crate layout:
//!
//! * [`numerics`]: spectral state containers, per-mode block operators, DFTs.
//! * [`kernel`]: the exponential-bump averaging kernel and node-count rule.
//! * [`averaging`]: phase-averaged and mean-corrected right-hand sides.
//! * [`integrators`]: explicit Runge-Kutta pipelines and initialization.
//! * [`models`]: swinging spring, Klein-Gordon-type PDE, 1D rotating shallow water.
//! * [`harness`]: window sweeps, error metrics, CSV/JSON reports.

// `!(x > 0.0)` is used on purpose so NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod error;
pub mod harness;
pub mod integrators;
pub mod kernel;
pub mod models;
pub mod numerics;

pub use error::{Error, Result};
pub use num_complex::Complex64;
