use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kernel::KernelParams;

pub const SPRING_RHOS: [f64; 6] = [1.5, 1.7, 1.95, 2.0, 2.2, 2.5];
pub const KG_EPS: [f64; 3] = [0.5, 0.1, 0.05];
pub const RSWE_EPS: [f64; 3] = [0.1, 0.05, 0.01];
/// RSWE regime whose kernels are large enough to be opt-in only.
pub const RSWE_SLOW_EPS: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Spring,
    Kg,
    Rswe,
}

impl ModelId {
    pub fn label(self) -> &'static str {
        match self {
            Self::Spring => "spring",
            Self::Kg => "kg",
            Self::Rswe => "rswe",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spring" => Ok(Self::Spring),
            "kg" => Ok(Self::Kg),
            "rswe" => Ok(Self::Rswe),
            other => Err(Error::Config(format!("unknown model `{other}` (expected spring, kg or rswe)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(alias = "pa")]
    PhaseAveraged,
    #[serde(alias = "mc-classical")]
    MeanCorrectedClassical,
    #[serde(alias = "mc-local")]
    MeanCorrectedLocal,
}

impl Method {
    /// Short label used in CSV rows and on the command line.
    pub fn label(self) -> &'static str {
        match self {
            Self::PhaseAveraged => "pa",
            Self::MeanCorrectedClassical => "mc-classical",
            Self::MeanCorrectedLocal => "mc-local",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pa" | "phase_averaged" => Ok(Self::PhaseAveraged),
            "mc-classical" | "mean_corrected_classical" => Ok(Self::MeanCorrectedClassical),
            "mc-local" | "mean_corrected_local" => Ok(Self::MeanCorrectedLocal),
            other => Err(Error::Config(format!(
                "unknown method `{other}` (expected pa, mc-classical or mc-local)"
            ))),
        }
    }
}

/// Mean-correction window choice for the local method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaCGrid {
    /// `eta_C = eta` in every cell of the ζ sweep.
    Tied,
    /// Two-step selection: ζ sweep of plain phase averaging, then `count`
    /// windows `step, 2 step, ...` at the best `eta`.
    Sweep { step: f64, count: usize },
}

/// One sweep: a model instance, a set of coarse steps and a method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelId,
    /// Spring frequency ratio; spring only.
    pub rho: Option<f64>,
    pub eps: f64,
    /// Grid points for the PDE models.
    pub n_x: usize,
    /// RSWE hyperviscosity.
    pub mu: f64,
    pub dt: Vec<f64>,
    pub t_max: f64,
    pub method: Method,
    pub zeta_start: f64,
    pub zeta_stop: f64,
    pub zeta_step: f64,
    pub eta_c: EtaCGrid,
    pub reference_dt: f64,
    pub kernel: KernelParams,
    pub c_tol: f64,
    pub max_iter: usize,
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    /// Desk-scale defaults for a model and method.
    pub fn defaults(model: ModelId, method: Method) -> Self {
        let base = Self {
            model,
            rho: None,
            eps: 0.1,
            n_x: 32,
            mu: crate::models::DEFAULT_HYPERVISCOSITY,
            dt: vec![],
            t_max: 0.0,
            method,
            zeta_start: 0.05,
            zeta_stop: 2.0,
            zeta_step: 0.05,
            eta_c: EtaCGrid::Sweep { step: 0.1, count: 40 },
            reference_dt: 1e-4,
            kernel: KernelParams::default(),
            c_tol: 1e-10,
            max_iter: 100,
            output: None,
        };
        match model {
            ModelId::Spring => Self {
                rho: Some(2.0),
                eps: 1.0,
                dt: vec![0.5],
                t_max: 200.0,
                zeta_start: 0.1,
                zeta_step: 0.1,
                eta_c: EtaCGrid::Sweep { step: 1.0, count: 40 },
                reference_dt: 0.01,
                ..base
            },
            ModelId::Kg => Self {
                dt: vec![1.0, 2.0, 3.0],
                t_max: 20.0,
                eta_c: EtaCGrid::Tied,
                ..base
            },
            ModelId::Rswe => Self {
                dt: vec![0.1, 0.2, 0.3],
                t_max: 10.0,
                ..base
            },
        }
    }

    /// Replaces `eps`, keeping a swept `eta_C` grid in steps of `eps`.
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        if let EtaCGrid::Sweep { count, .. } = self.eta_c {
            self.eta_c = EtaCGrid::Sweep { step: eps, count };
        }
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = Some(rho);
        self
    }

    /// Parses a JSON object, filling omitted fields from [`SweepConfig::defaults`].
    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Config("a sweep config must be a JSON object".into()))?;
        let field = |name: &str| {
            obj.get(name)
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Config(format!("missing string field `{name}`")))
        };
        let model = ModelId::parse(field("model")?)?;
        let method = Method::parse(field("method")?)?;
        let mut defaults = Self::defaults(model, method);
        if let Some(eps) = obj.get("eps").and_then(Value::as_f64) {
            defaults = defaults.with_eps(eps);
        }
        let mut merged = serde_json::to_value(&defaults)?;
        let target = merged.as_object_mut().expect("struct serializes to an object");
        for (k, v) in obj {
            if !target.contains_key(k) {
                return Err(Error::Config(format!("unknown config field `{k}`")));
            }
            target.insert(k.clone(), v.clone());
        }
        target.insert("method".into(), serde_json::to_value(method)?);
        let config: Self = serde_json::from_value(merged)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads either a single config object or an array of them.
    pub fn list_from_json(text: &str) -> Result<Vec<Self>> {
        let value: Value = serde_json::from_str(text)?;
        match &value {
            Value::Array(items) => {
                if items.is_empty() {
                    return Err(Error::Config("config list is empty".into()));
                }
                items.iter().map(Self::from_json_value).collect()
            }
            _ => Ok(vec![Self::from_json_value(&value)?]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match self.model {
            ModelId::Spring => {
                match self.rho {
                    Some(r) if r > 0.0 && r.is_finite() => {}
                    _ => return bad("spring needs a positive `rho`".into()),
                }
                if self.eps != 1.0 {
                    return bad(format!("spring runs at eps = 1, got {}", self.eps));
                }
            }
            ModelId::Kg | ModelId::Rswe => {
                if !(self.eps > 0.0 && self.eps.is_finite()) {
                    return bad(format!("eps must be positive, got {}", self.eps));
                }
                if !self.n_x.is_power_of_two() || self.n_x < 2 {
                    return bad(format!("n_x must be a power of two >= 2, got {}", self.n_x));
                }
            }
        }
        if self.model == ModelId::Rswe && !(self.mu >= 0.0) {
            return bad(format!("mu must be non-negative, got {}", self.mu));
        }
        if self.method == Method::MeanCorrectedClassical && self.model == ModelId::Rswe {
            return bad("rswe has no classical mean correction".into());
        }
        if self.dt.is_empty() {
            return bad("at least one dt is required".into());
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if !(self.reference_dt > 0.0) {
            return bad(format!("reference_dt must be positive, got {}", self.reference_dt));
        }
        for &dt in &self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt must be positive, got {dt}"));
            }
            let ratio = dt / self.reference_dt;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
                return bad(format!("reference_dt {} does not divide dt {dt}", self.reference_dt));
            }
            if dt > self.t_max {
                return bad(format!("dt {dt} exceeds t_max {}", self.t_max));
            }
        }
        if !(self.zeta_step > 0.0) {
            return bad(format!("zeta_step must be positive, got {}", self.zeta_step));
        }
        if !(self.zeta_start >= 0.0 && self.zeta_stop >= self.zeta_start) {
            return bad(format!(
                "zeta grid needs 0 <= zeta_start <= zeta_stop, got [{}, {}]",
                self.zeta_start, self.zeta_stop
            ));
        }
        if let EtaCGrid::Sweep { step, count } = self.eta_c {
            if !(step > 0.0) || count == 0 {
                return bad(format!("eta_c sweep needs a positive step and count, got {step}, {count}"));
            }
        }
        let k = self.kernel;
        if !(k.gamma > 0.0 && k.p > 0.0) || k.k_min == 0 {
            return bad("kernel gamma, p and k_min must be positive".into());
        }
        if !(self.c_tol >= 0.0) || self.max_iter == 0 {
            return bad("c_tol must be non-negative and max_iter positive".into());
        }
        Ok(())
    }

    /// ζ grid `start + i step` up to `stop`, rounded to 12 decimals.
    pub fn zeta_grid(&self) -> Vec<f64> {
        let n = ((self.zeta_stop - self.zeta_start) / self.zeta_step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| round12(self.zeta_start + i as f64 * self.zeta_step)).collect()
    }

    /// Candidate `eta_C` values; empty for the tied strategy.
    pub fn eta_c_grid(&self) -> Vec<f64> {
        match self.eta_c {
            EtaCGrid::Tied => vec![],
            EtaCGrid::Sweep { step, count } => (1..=count).map(|i| round12(i as f64 * step)).collect(),
        }
    }

    /// Step at which reference samples are kept: the largest common divisor of
    /// all coarse steps in units of `reference_dt`.
    pub fn record_interval(&self) -> f64 {
        let units: Vec<u64> = self.dt.iter().map(|dt| (dt / self.reference_dt).round() as u64).collect();
        let g = units.iter().copied().fold(0, gcd).max(1);
        g as f64 * self.reference_dt
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Named sweeps bundling the standard experiment sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Six frequency ratios, phase averaging against the classical correction.
    Spring,
    /// Three values of eps, all three methods with tied windows.
    Kg,
    /// Three (optionally four) values of eps, local correction with window selection.
    Rswe,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "spring" => Ok(Self::Spring),
            "kg" => Ok(Self::Kg),
            "rswe" => Ok(Self::Rswe),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }

    pub fn configs(self, include_slow: bool) -> Vec<SweepConfig> {
        match self {
            Self::Spring => SPRING_RHOS
                .iter()
                .flat_map(|&rho| {
                    [Method::PhaseAveraged, Method::MeanCorrectedClassical]
                        .map(|m| SweepConfig::defaults(ModelId::Spring, m).with_rho(rho))
                })
                .collect(),
            Self::Kg => KG_EPS
                .iter()
                .flat_map(|&eps| {
                    [Method::PhaseAveraged, Method::MeanCorrectedClassical, Method::MeanCorrectedLocal]
                        .map(|m| SweepConfig::defaults(ModelId::Kg, m).with_eps(eps))
                })
                .collect(),
            Self::Rswe => {
                let mut eps: Vec<f64> = RSWE_EPS.to_vec();
                if include_slow {
                    eps.push(RSWE_SLOW_EPS);
                }
                eps.into_iter()
                    .map(|e| SweepConfig::defaults(ModelId::Rswe, Method::MeanCorrectedLocal).with_eps(e))
                    .collect()
            }
        }
    }
}
