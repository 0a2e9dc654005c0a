//! Explicit Runge-Kutta pipelines for the standard, modulation-variable,
//! phase-averaged and mean-corrected formulations.
//!
//! All pipelines return trajectories in the standard variable `U` so they can
//! be compared sample by sample.

mod tableau;

pub use tableau::{rk_step, ButcherTableau};

use crate::averaging::{mean_corrected_rhs, modvar_rhs, phase_averaged_rhs, Corrector};
use crate::error::{Error, Result};
use crate::kernel::AveragingKernel;
use crate::models::ModelSystem;
use crate::numerics::SpectralState;

/// States with any entry above this magnitude are treated as blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e100;

/// Uniform step `dt`, `n_steps` steps, a sample kept every `record_every` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
    pub record_every: usize,
}

impl TimeGrid {
    /// Steps of size `dt` up to the last multiple of `dt` not beyond `t_max`, recording every step.
    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        Self::with_record_interval(dt, t_max, dt)
    }

    /// Like [`TimeGrid::new`] but keeping samples every `record_dt`, which must be a multiple of `dt`.
    pub fn with_record_interval(dt: f64, t_max: f64, record_dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidTimeGrid(format!("dt must be positive, got {dt}")));
        }
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidTimeGrid(format!("t_max must be non-negative, got {t_max}")));
        }
        let ratio = record_dt / dt;
        let record_every = ratio.round();
        if !(record_every >= 1.0) || (ratio - record_every).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidTimeGrid(format!(
                "record interval {record_dt} is not a positive multiple of dt = {dt}"
            )));
        }
        let n_steps = (t_max / dt + 1e-9).floor() as usize;
        Ok(Self {
            dt,
            n_steps,
            record_every: record_every as usize,
        })
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.time(self.n_steps)
    }
}

/// Sampled standard-variable trajectory, starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &SpectralState)> {
        self.times.last().map(|&t| (t, self.states.last().expect("same length")))
    }

    /// The sample recorded at time `t`, matched to a relative tolerance of `1e-9`.
    pub fn sample_at(&self, t: f64) -> Option<&SpectralState> {
        let tol = 1e-9 * t.abs().max(1.0);
        let idx = self.times.partition_point(|&x| x < t - tol);
        match self.times.get(idx) {
            Some(&x) if (x - t).abs() <= tol => Some(&self.states[idx]),
            _ => None,
        }
    }
}

fn check_state(y: &SpectralState, t: f64, step: usize) -> Result<()> {
    if y.is_finite() && y.max_abs() <= BLOWUP_THRESHOLD {
        Ok(())
    } else {
        Err(Error::NonFinite { t, step })
    }
}

/// Runs `advance(step, t, y)` over the grid, recording `observe(t, y)`.
fn drive<A, O>(grid: &TimeGrid, y0: SpectralState, mut advance: A, observe: O) -> Result<Trajectory>
where
    A: FnMut(usize, f64, &SpectralState) -> SpectralState,
    O: Fn(usize, f64, &SpectralState) -> SpectralState,
{
    let n_records = grid.n_steps / grid.record_every + 1;
    let mut times = Vec::with_capacity(n_records);
    let mut states = Vec::with_capacity(n_records);
    check_state(&y0, 0.0, 0)?;
    times.push(0.0);
    states.push(observe(0, 0.0, &y0));
    let mut y = y0;
    for n in 0..grid.n_steps {
        y = advance(n, grid.time(n), &y);
        let t = grid.time(n + 1);
        check_state(&y, t, n + 1)?;
        if (n + 1) % grid.record_every == 0 {
            times.push(t);
            states.push(observe(n + 1, t, &y));
        }
    }
    Ok(Trajectory { times, states })
}

/// Integrates `dU/dt = -L U / eps + N*(U)` directly.
pub fn integrate_standard(
    model: &dyn ModelSystem,
    u0: &SpectralState,
    tab: &ButcherTableau,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    model.initial_state().check_shape(u0)?;
    let inv_eps = 1.0 / model.eps();
    drive(
        grid,
        u0.clone(),
        |_, t, y| {
            rk_step(tab, t, y, grid.dt, |_, _, u| {
                let mut f = model.dissipated_nonlinear(u);
                f.axpy(-inv_eps, &model.apply_linear(u));
                f
            })
        },
        |_, _, y| y.clone(),
    )
}

/// Integrates the unaveraged modulation variable `V = e^{tL/eps} U`.
pub fn integrate_modvar(
    model: &dyn ModelSystem,
    u0: &SpectralState,
    tab: &ButcherTableau,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    model.initial_state().check_shape(u0)?;
    drive(
        grid,
        u0.clone(),
        |_, t, v| rk_step(tab, t, v, grid.dt, |_, ti, vi| modvar_rhs(model, vi, ti)),
        |_, t, v| model.apply_exp(-t, v),
    )
}

/// Integrates the phase-averaged modulation variable and maps back with `e^{-tL/eps}`.
pub fn integrate_phase_averaged(
    model: &dyn ModelSystem,
    u0: &SpectralState,
    kernel: &AveragingKernel,
    tab: &ButcherTableau,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    model.initial_state().check_shape(u0)?;
    drive(
        grid,
        u0.clone(),
        |_, t, v| rk_step(tab, t, v, grid.dt, |_, ti, vi| phase_averaged_rhs(model, vi, ti, kernel)),
        |_, t, v| model.apply_exp(-t, v),
    )
}

/// Tolerance and iteration cap for the initial mean-correction fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointParams {
    pub c_tol: f64,
    pub max_iter: usize,
}

impl Default for FixedPointParams {
    fn default() -> Self {
        Self {
            c_tol: 1e-10,
            max_iter: 100,
        }
    }
}

/// Consistent starting pair `(W0, C0)` with `U0 = W0 + eps L^+ C(W0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCorrectedInit {
    pub w0: SpectralState,
    pub c0: SpectralState,
    /// Number of refinements performed; one when the first update leaves `C` unchanged.
    pub iterations: usize,
    pub residual: f64,
}

/// Standard variable `U = e^{-tL/eps} W + eps L^+ C`.
pub fn back_transform(model: &dyn ModelSystem, w: &SpectralState, t: f64, c: &SpectralState) -> SpectralState {
    let mut u = model.apply_exp(-t, w);
    u.axpy(model.eps(), &model.apply_linear_inverse(c));
    u
}

/// Fixed-point iteration `C <- C(U0 - eps L^+ C, 0)` until the L1 change drops below `c_tol`.
pub fn init_mean_corrected(
    model: &dyn ModelSystem,
    u0: &SpectralState,
    corrector: &Corrector,
    params: &FixedPointParams,
) -> Result<MeanCorrectedInit> {
    model.initial_state().check_shape(u0)?;
    let eps = model.eps();
    let shifted = |c: &SpectralState| {
        let mut w = u0.clone();
        w.axpy(-eps, &model.apply_linear_inverse(c));
        w
    };
    let mut c = corrector.evaluate(model, u0, 0.0);
    let mut w = shifted(&c);
    let mut residual = f64::INFINITY;
    for iteration in 1..=params.max_iter {
        let next = corrector.evaluate(model, &w, 0.0);
        residual = (&next - &c).l1_norm();
        c = next;
        w = shifted(&c);
        if !residual.is_finite() {
            break;
        }
        if residual <= params.c_tol {
            return Ok(MeanCorrectedInit {
                w0: w,
                c0: c,
                iterations: iteration,
                residual,
            });
        }
    }
    Err(Error::FixedPointDiverged {
        iterations: params.max_iter,
        residual,
    })
}

/// Output of [`integrate_mean_corrected`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCorrectedRun {
    pub trajectory: Trajectory,
    pub init_iterations: usize,
    /// Evaluations of `C(W, t)` made during time stepping.
    pub correction_evals: usize,
}

/// Mean-corrected phase averaging.
///
/// The first stage of every step reuses the correction of the current state;
/// later stages refresh it at their own stage value, and the accepted state
/// gets a fresh correction that is used both for output and for the next step.
pub fn integrate_mean_corrected(
    model: &dyn ModelSystem,
    u0: &SpectralState,
    kernel: &AveragingKernel,
    corrector: &Corrector,
    tab: &ButcherTableau,
    grid: &TimeGrid,
    fixed_point: &FixedPointParams,
) -> Result<MeanCorrectedRun> {
    let init = init_mean_corrected(model, u0, corrector, fixed_point)?;
    let mut evals = 0usize;
    let mut current = init.c0.clone();
    let mut recorded = vec![init.c0];
    let trajectory = {
        let evals = &mut evals;
        let current = &mut current;
        let recorded_ref = &mut recorded;
        let mut traj = drive(
            grid,
            init.w0,
            |n, t, w| {
                let next = rk_step(tab, t, w, grid.dt, |stage, ti, wi| {
                    if stage == 0 {
                        mean_corrected_rhs(model, wi, ti, kernel, current)
                    } else {
                        *evals += 1;
                        let ci = corrector.evaluate(model, wi, ti);
                        mean_corrected_rhs(model, wi, ti, kernel, &ci)
                    }
                });
                *evals += 1;
                *current = corrector.evaluate(model, &next, grid.time(n + 1));
                if (n + 1) % grid.record_every == 0 {
                    recorded_ref.push(current.clone());
                }
                next
            },
            |_, _, w| w.clone(),
        )?;
        for ((t, w), c) in traj.times.iter().zip(traj.states.iter_mut()).zip(recorded.iter()) {
            *w = back_transform(model, w, *t, c);
        }
        traj
    };
    Ok(MeanCorrectedRun {
        trajectory,
        init_iterations: init.iterations,
        correction_evals: evals,
    })
}
