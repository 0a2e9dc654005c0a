use num_complex::Complex64;

use super::config::{ModelId, SweepConfig};
use crate::error::{Error, Result};
use crate::integrators::Trajectory;
use crate::models::{KgModel, KgParams, ModelSystem, RsweModel, RsweParams, SpringModel, SpringParams};
use crate::numerics::{dft_inverse, GridSpec, SpectralState};

/// A concrete model instance together with the quantity its error is measured on.
pub enum BuiltModel {
    Spring(SpringModel),
    Kg(KgModel),
    Rswe(RsweModel),
}

impl BuiltModel {
    pub fn from_config(config: &SweepConfig) -> Result<Self> {
        Ok(match config.model {
            ModelId::Spring => {
                let rho = config
                    .rho
                    .ok_or_else(|| Error::Config("spring needs `rho`".into()))?;
                Self::Spring(SpringModel::new(SpringParams::with_rho(rho)))
            }
            ModelId::Kg => Self::Kg(KgModel::new(KgParams { eps: config.eps }, GridSpec::new(config.n_x)?)),
            ModelId::Rswe => Self::Rswe(RsweModel::new(
                RsweParams {
                    eps: config.eps,
                    mu: config.mu,
                },
                GridSpec::new(config.n_x)?,
            )),
        })
    }

    pub fn system(&self) -> &dyn ModelSystem {
        match self {
            Self::Spring(m) => m,
            Self::Kg(m) => m,
            Self::Rswe(m) => m,
        }
    }

    pub fn metric(&self) -> MetricKind {
        match self {
            Self::Spring(_) => MetricKind::SpringPositions,
            Self::Kg(_) => MetricKind::KgField,
            Self::Rswe(_) => MetricKind::RsweFields,
        }
    }

    /// Values compared by the error metric.
    pub fn observe(&self, u: &SpectralState) -> Vec<Complex64> {
        match self {
            Self::Spring(_) => SpringModel::positions(u).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Self::Kg(m) => m.physical_a(u).into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            Self::Rswe(_) => (0..u.n_fields()).flat_map(|f| dft_inverse(u.field(f))).collect(),
        }
    }
}

/// Per-model error norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Euclidean distance of the three real positions.
    SpringPositions,
    /// Sum of absolute differences of the physical-space `a` field.
    KgField,
    /// Euclidean distance over all physical-space components.
    RsweFields,
}

impl MetricKind {
    pub fn distance(self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).norm());
        match self {
            Self::KgField => diffs.sum(),
            Self::SpringPositions | Self::RsweFields => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        }
    }
}

/// Mean over the samples `t_n`, `n >= 1`, of the model's norm of `traj - reference`.
pub fn error_metric(model: &BuiltModel, traj: &Trajectory, reference: &Trajectory) -> Result<f64> {
    let kind = model.metric();
    let mut total = 0.0;
    let mut count = 0usize;
    for (&t, u) in traj.times.iter().zip(&traj.states).skip(1) {
        let r = reference.sample_at(t).ok_or(Error::TimeGridMismatch(t))?;
        total += kind.distance(&model.observe(u), &model.observe(r));
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidTimeGrid("trajectory has no samples after t = 0".into()));
    }
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Method;

    fn traj(times: &[f64], states: Vec<SpectralState>) -> Trajectory {
        Trajectory {
            times: times.to_vec(),
            states,
        }
    }

    fn spring() -> BuiltModel {
        BuiltModel::from_config(&SweepConfig::defaults(ModelId::Spring, Method::PhaseAveraged)).unwrap()
    }

    fn spring_state(x: f64, y: f64, z: f64) -> SpectralState {
        SpectralState::from_vec(3, 1, vec![Complex64::new(x, 7.0), Complex64::new(y, -1.0), Complex64::new(z, 0.5)]).unwrap()
    }

    #[test]
    fn identical_trajectories_have_zero_error() {
        let m = spring();
        let a = traj(&[0.0, 0.5, 1.0], vec![spring_state(0.0, 0.0, 0.0), spring_state(1.0, 2.0, 3.0), spring_state(-1.0, 0.5, 0.0)]);
        assert_eq!(error_metric(&m, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn spring_three_four_five() {
        let m = spring();
        let a = traj(&[0.0, 0.5], vec![spring_state(9.0, 9.0, 9.0), spring_state(3.0, 4.0, 1.0)]);
        let b = traj(&[0.0, 0.5], vec![spring_state(0.0, 0.0, 0.0), spring_state(0.0, 0.0, 1.0)]);
        assert_eq!(error_metric(&m, &a, &b).unwrap(), 5.0);
    }

    #[test]
    fn reference_is_subsampled() {
        let m = spring();
        let coarse = traj(&[0.0, 1.0], vec![spring_state(0.0, 0.0, 0.0), spring_state(1.0, 0.0, 0.0)]);
        let fine = traj(
            &[0.0, 0.5, 1.0],
            vec![spring_state(0.0, 0.0, 0.0), spring_state(5.0, 0.0, 0.0), spring_state(0.0, 0.0, 0.0)],
        );
        assert_eq!(error_metric(&m, &coarse, &fine).unwrap(), 1.0);
        let misaligned = traj(&[0.0, 0.7], vec![spring_state(0.0, 0.0, 0.0), spring_state(1.0, 0.0, 0.0)]);
        assert!(matches!(error_metric(&m, &misaligned, &fine), Err(Error::TimeGridMismatch(_))));
    }

    #[test]
    fn kg_metric_matches_direct_recomputation() {
        let cfg = SweepConfig::defaults(ModelId::Kg, Method::PhaseAveraged);
        let m = BuiltModel::from_config(&cfg).unwrap();
        let grid = GridSpec::new(32).unwrap();
        let field = |shift: f64| {
            let a: Vec<f64> = grid.points().iter().map(|x| (x + shift).sin() + 0.3 * (2.0 * x).cos()).collect();
            let hat = grid.forward(&a).unwrap();
            (a, SpectralState::from_fields(&[hat, vec![Complex64::new(0.0, 0.0); 32]]).unwrap())
        };
        let (a1, s1) = field(0.1);
        let (a2, s2) = field(0.4);
        let (b1, r1) = field(0.0);
        let (b2, r2) = field(0.2);
        let direct = 0.5
            * (a1.iter().zip(&b1).map(|(x, y)| (x - y).abs()).sum::<f64>()
                + a2.iter().zip(&b2).map(|(x, y)| (x - y).abs()).sum::<f64>());
        let t = traj(&[0.0, 1.0, 2.0], vec![s1.clone(), s1, s2]);
        let r = traj(&[0.0, 1.0, 2.0], vec![r1.clone(), r1, r2]);
        assert!((error_metric(&m, &t, &r).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn rswe_metric_uses_all_fields() {
        let cfg = SweepConfig::defaults(ModelId::Rswe, Method::PhaseAveraged);
        let m = BuiltModel::from_config(&cfg).unwrap();
        let zero = SpectralState::zeros(3, 32);
        let mut one = SpectralState::zeros(3, 32);
        // A unit mean mode in v is the constant 1/32 at every point.
        one[(1, 0)] = Complex64::new(1.0, 0.0);
        let d = error_metric(&m, &traj(&[0.0, 0.1], vec![zero.clone(), one]), &traj(&[0.0, 0.1], vec![zero.clone(), zero])).unwrap();
        assert!((d - (32.0f64).sqrt() / 32.0).abs() < 1e-15);
    }

    #[test]
    fn initial_only_trajectory_is_rejected() {
        let m = spring();
        let a = traj(&[0.0], vec![spring_state(0.0, 0.0, 0.0)]);
        assert!(error_metric(&m, &a, &a).is_err());
    }
}
