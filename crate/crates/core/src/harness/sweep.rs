use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{EtaCGrid, Method, ModelId, SweepConfig};
use super::metric::{error_metric, BuiltModel};
use crate::averaging::{CorrectionStrategy, Corrector};
use crate::error::{Error, Result};
use crate::integrators::{
    integrate_mean_corrected, integrate_modvar, integrate_phase_averaged, integrate_standard, ButcherTableau,
    FixedPointParams, TimeGrid, Trajectory,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

/// One evaluated cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub model: ModelId,
    pub method: Method,
    pub eps: f64,
    pub rho: Option<f64>,
    pub dt: f64,
    pub zeta: f64,
    pub eta: f64,
    pub eta_c: Option<f64>,
    pub k_s: usize,
    pub k_r: usize,
    /// Infinite when the cell failed.
    pub error: f64,
    pub wall_ms: u64,
    pub status: CellStatus,
}

/// Best windows found for one `(config, dt)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub model: ModelId,
    pub method: Method,
    pub eps: f64,
    pub rho: Option<f64>,
    pub dt: f64,
    pub eta_star: f64,
    pub zeta_star: f64,
    /// Chosen mean-correction window when it was swept separately.
    pub eta_c_star: Option<f64>,
    pub error: f64,
    /// Best plain phase-averaged error from the first selection step.
    pub phase_averaged_error: Option<f64>,
}

/// Rows and selections for a set of sweeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub rows: Vec<Row>,
    pub selections: Vec<Selection>,
}

impl ErrorReport {
    pub fn selection(&self, method: Method, eps: f64, rho: Option<f64>, dt: f64) -> Option<&Selection> {
        self.selections
            .iter()
            .find(|s| s.method == method && s.eps == eps && s.rho == rho && (s.dt - dt).abs() < 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses every available core.
    pub workers: Option<usize>,
    /// Record wall-clock time per cell. Disable for byte-reproducible output.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: None,
            timing: true,
        }
    }
}

impl RunOptions {
    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.workers {
            if n == 0 {
                return Err(Error::Config("workers must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
    }
}

/// Identifies a reference trajectory; configs with equal keys share one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ReferenceKey {
    model: ModelId,
    bits: [u64; 6],
    n_x: usize,
}

impl ReferenceKey {
    fn of(c: &SweepConfig) -> Self {
        Self {
            model: c.model,
            bits: [
                c.rho.unwrap_or(0.0).to_bits(),
                c.eps.to_bits(),
                c.mu.to_bits(),
                c.reference_dt.to_bits(),
                c.t_max.to_bits(),
                c.record_interval().to_bits(),
            ],
            n_x: c.n_x,
        }
    }
}

/// Fine-step reference: the spring integrates the standard equation, the PDE
/// models the unaveraged modulation variable.
pub fn build_reference(model: &BuiltModel, config: &SweepConfig) -> Result<Trajectory> {
    let grid = TimeGrid::with_record_interval(config.reference_dt, config.t_max, config.record_interval())?;
    let sys = model.system();
    let u0 = sys.initial_state();
    let tab = ButcherTableau::rk4();
    match config.model {
        ModelId::Spring => integrate_standard(sys, &u0, &tab, &grid),
        ModelId::Kg | ModelId::Rswe => integrate_modvar(sys, &u0, &tab, &grid),
    }
}

struct Context {
    config: SweepConfig,
    model: BuiltModel,
    reference: Arc<Trajectory>,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    ctx: usize,
    dt_idx: usize,
    zeta: f64,
    method: Method,
    /// `None` ties the correction window to `eta`.
    eta_c: Option<f64>,
}

fn run_cell(ctx: &Context, cell: &Cell, timing: bool) -> Row {
    let cfg = &ctx.config;
    let dt = cfg.dt[cell.dt_idx];
    let eta = cell.zeta * dt;
    let sys = ctx.model.system();
    let start = Instant::now();
    let eta_c = match (cell.method, cell.eta_c) {
        (Method::MeanCorrectedLocal, None) => Some(eta),
        (Method::MeanCorrectedLocal, c) => c,
        _ => None,
    };
    let mut k_s = cfg.kernel.node_count(eta, sys.omega_max(), sys.eps());
    let mut k_r = eta_c.map_or(0, |c| cfg.kernel.node_count(c, sys.omega_max(), sys.eps()));
    let outcome = (|| -> Result<f64> {
        let kernel = cfg.kernel.kernel(eta, sys.omega_max(), sys.eps())?;
        k_s = kernel.len();
        let grid = TimeGrid::new(dt, cfg.t_max)?;
        let tab = ButcherTableau::rk4();
        let u0 = sys.initial_state();
        let traj = match cell.method {
            Method::PhaseAveraged => integrate_phase_averaged(sys, &u0, &kernel, &tab, &grid)?,
            method => {
                let strategy = match method {
                    Method::MeanCorrectedClassical => CorrectionStrategy::Classical,
                    _ => CorrectionStrategy::Local {
                        eta_c: eta_c.expect("local cells carry a window"),
                    },
                };
                let corrector = Corrector::new(strategy, sys, &cfg.kernel)?;
                k_r = corrector.node_count();
                let fp = FixedPointParams {
                    c_tol: cfg.c_tol,
                    max_iter: cfg.max_iter,
                };
                integrate_mean_corrected(sys, &u0, &kernel, &corrector, &tab, &grid, &fp)?.trajectory
            }
        };
        error_metric(&ctx.model, &traj, &ctx.reference)
    })();
    let wall_ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    let (error, status) = match outcome {
        Ok(e) if e.is_finite() && e <= crate::integrators::BLOWUP_THRESHOLD => (e, CellStatus::Ok),
        _ => (f64::INFINITY, CellStatus::Failed),
    };
    Row {
        model: cfg.model,
        method: cell.method,
        eps: cfg.eps,
        rho: cfg.rho,
        dt,
        zeta: cell.zeta,
        eta,
        eta_c,
        k_s,
        k_r,
        error,
        wall_ms,
        status,
    }
}

/// Index of the smallest error; ties go to the earliest (smallest window).
fn argmin(errors: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in errors.enumerate() {
        match best {
            Some((_, b)) if e >= b => {}
            _ => best = Some((i, e)),
        }
    }
    best.map(|(i, _)| i)
}

fn needs_window_selection(c: &SweepConfig) -> bool {
    c.method == Method::MeanCorrectedLocal && matches!(c.eta_c, EtaCGrid::Sweep { .. })
}

/// Runs every sweep in `configs`, sharing references between configs with the
/// same model instance, and selects the best windows per `(config, dt)`.
///
/// Rows are returned in canonical order, so the output depends only on the
/// configs and never on the worker count.
pub fn run_sweeps(configs: &[SweepConfig], options: &RunOptions) -> Result<ErrorReport> {
    if configs.is_empty() {
        return Err(Error::Config("no sweeps to run".into()));
    }
    for c in configs {
        c.validate()?;
        if c.zeta_grid().is_empty() || (needs_window_selection(c) && c.eta_c_grid().is_empty()) {
            return Err(Error::Config("empty window grid".into()));
        }
    }
    let pool = options.pool()?;
    pool.install(|| run_in_pool(configs, options.timing))
}

fn run_in_pool(configs: &[SweepConfig], timing: bool) -> Result<ErrorReport> {
    let models = configs.iter().map(BuiltModel::from_config).collect::<Result<Vec<_>>>()?;

    let mut keys: Vec<ReferenceKey> = Vec::new();
    let mut first_of_key: Vec<usize> = Vec::new();
    for (i, c) in configs.iter().enumerate() {
        let key = ReferenceKey::of(c);
        if !keys.contains(&key) {
            keys.push(key);
            first_of_key.push(i);
        }
    }
    let built: Vec<Arc<Trajectory>> = first_of_key
        .par_iter()
        .map(|&i| build_reference(&models[i], &configs[i]).map(Arc::new))
        .collect::<Result<_>>()?;
    let cache: HashMap<ReferenceKey, Arc<Trajectory>> = keys.into_iter().zip(built).collect();

    let contexts: Vec<Context> = configs
        .iter()
        .zip(models)
        .map(|(c, model)| Context {
            config: c.clone(),
            model,
            reference: Arc::clone(&cache[&ReferenceKey::of(c)]),
        })
        .collect();

    // Step one: window sweeps. Configs that select their correction window
    // separately sweep plain phase averaging here.
    let mut cells = Vec::new();
    for (ci, ctx) in contexts.iter().enumerate() {
        let method = if needs_window_selection(&ctx.config) {
            Method::PhaseAveraged
        } else {
            ctx.config.method
        };
        for dt_idx in 0..ctx.config.dt.len() {
            for zeta in ctx.config.zeta_grid() {
                cells.push(Cell {
                    ctx: ci,
                    dt_idx,
                    zeta,
                    method,
                    eta_c: None,
                });
            }
        }
    }
    let rows: Vec<Row> = cells.par_iter().map(|c| run_cell(&contexts[c.ctx], c, timing)).collect();

    // Best window per (config, dt) from step one.
    let mut firsts: Vec<(usize, usize, Row)> = Vec::new();
    for (ci, ctx) in contexts.iter().enumerate() {
        for dt_idx in 0..ctx.config.dt.len() {
            let group: Vec<&Row> = cells
                .iter()
                .zip(&rows)
                .filter(|(c, _)| c.ctx == ci && c.dt_idx == dt_idx)
                .map(|(_, r)| r)
                .collect();
            let best = argmin(group.iter().map(|r| r.error)).expect("non-empty ζ grid");
            firsts.push((ci, dt_idx, group[best].clone()));
        }
    }

    // Step two: correction-window sweeps at the chosen eta.
    let mut second_cells = Vec::new();
    for (ci, dt_idx, best) in &firsts {
        let cfg = &contexts[*ci].config;
        if needs_window_selection(cfg) {
            for eta_c in cfg.eta_c_grid() {
                second_cells.push(Cell {
                    ctx: *ci,
                    dt_idx: *dt_idx,
                    zeta: best.zeta,
                    method: Method::MeanCorrectedLocal,
                    eta_c: Some(eta_c),
                });
            }
        }
    }
    let second_rows: Vec<Row> = second_cells.par_iter().map(|c| run_cell(&contexts[c.ctx], c, timing)).collect();

    let mut selections = Vec::new();
    for (ci, dt_idx, best) in firsts {
        let cfg = &contexts[ci].config;
        let selection = if needs_window_selection(cfg) {
            let group: Vec<&Row> = second_cells
                .iter()
                .zip(&second_rows)
                .filter(|(c, _)| c.ctx == ci && c.dt_idx == dt_idx)
                .map(|(_, r)| r)
                .collect();
            let pick = group[argmin(group.iter().map(|r| r.error)).expect("non-empty η_C grid")];
            Selection {
                model: cfg.model,
                method: cfg.method,
                eps: cfg.eps,
                rho: cfg.rho,
                dt: best.dt,
                eta_star: best.eta,
                zeta_star: best.zeta,
                eta_c_star: pick.eta_c,
                error: pick.error,
                phase_averaged_error: Some(best.error),
            }
        } else {
            Selection {
                model: cfg.model,
                method: cfg.method,
                eps: cfg.eps,
                rho: cfg.rho,
                dt: best.dt,
                eta_star: best.eta,
                zeta_star: best.zeta,
                eta_c_star: None,
                error: best.error,
                phase_averaged_error: None,
            }
        };
        selections.push(selection);
    }

    let mut all = rows;
    all.extend(second_rows);
    sort_rows(&mut all);
    Ok(ErrorReport { rows: all, selections })
}

/// Canonical row order: model, method, eps, rho, dt, eta_C, ζ.
pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        a.model
            .cmp(&b.model)
            .then(a.method.cmp(&b.method))
            .then(a.eps.total_cmp(&b.eps))
            .then(a.rho.unwrap_or(-1.0).total_cmp(&b.rho.unwrap_or(-1.0)))
            .then(a.dt.total_cmp(&b.dt))
            .then(a.eta_c.unwrap_or(-1.0).total_cmp(&b.eta_c.unwrap_or(-1.0)))
            .then(a.zeta.total_cmp(&b.zeta))
    });
}

/// ζ sweep of the configured method. A local correction is run with `eta_C = eta`.
pub fn zeta_sweep(config: &SweepConfig, options: &RunOptions) -> Result<ErrorReport> {
    let mut c = config.clone();
    if c.method == Method::MeanCorrectedLocal {
        c.eta_c = EtaCGrid::Tied;
    }
    run_sweeps(&[c], options)
}

/// Two-step window selection for the local correction: the best phase-averaged
/// window `eta*`, then the best correction window `eta_C*` at `eta*`.
pub fn select_windows(config: &SweepConfig, options: &RunOptions) -> Result<ErrorReport> {
    if !needs_window_selection(config) {
        return Err(Error::Config(
            "window selection needs method mean_corrected_local with a swept eta_c grid".into(),
        ));
    }
    run_sweeps(std::slice::from_ref(config), options)
}
