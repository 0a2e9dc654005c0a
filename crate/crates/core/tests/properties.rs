use num_complex::Complex64;
use phase_avg::averaging::local_mean_correction;
use phase_avg::harness::{run_sweeps, CellStatus, Method, ModelId, RunOptions, SweepConfig};
use phase_avg::integrators::{integrate_modvar, integrate_standard, ButcherTableau, TimeGrid, Trajectory};
use phase_avg::kernel::build_kernel;
use phase_avg::models::{KgModel, KgParams, ModelSystem, RsweModel, RsweParams, SpringModel, SpringParams};
use phase_avg::numerics::{is_conjugate_symmetric, GridSpec, SpectralState};
use proptest::prelude::*;

fn kg(eps: f64) -> KgModel {
    KgModel::new(KgParams { eps }, GridSpec::new(32).unwrap())
}

fn rswe(eps: f64) -> RsweModel {
    RsweModel::new(RsweParams::with_eps(eps), GridSpec::new(32).unwrap())
}

fn real_spectrum(values: &[f64]) -> Vec<Complex64> {
    GridSpec::new(values.len()).unwrap().forward(values).unwrap()
}

fn real_state(fields: &[Vec<f64>]) -> SpectralState {
    SpectralState::from_fields(&fields.iter().map(|f| real_spectrum(f)).collect::<Vec<_>>()).unwrap()
}

fn field() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 32)
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-0.2f64..0.2, -0.2f64..0.2).prop_map(|(a, b)| Complex64::new(a, b))
}

fn is_unitary(block: &[Complex64], m: usize, tol: f64) -> bool {
    (0..m).all(|i| {
        (0..m).all(|j| {
            let dot: Complex64 = (0..m).map(|k| block[i * m + k] * block[j * m + k].conj()).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            (dot - target).norm() <= tol
        })
    })
}

fn final_state(traj: &Trajectory) -> &SpectralState {
    traj.last().unwrap().1
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn propagators_are_unitary(t in -5.0f64..5.0, j in 0usize..32, rho in 1.2f64..2.8) {
        let spring = SpringModel::new(SpringParams::with_rho(rho));
        prop_assert!(is_unitary(spring.exp_operator(t).block(0), 3, 1e-10));
        for m in [&kg(0.05) as &dyn ModelSystem, &rswe(0.01)] {
            let e = m.exp_operator(t);
            prop_assert!(is_unitary(e.block(j), e.block_size(), 1e-10), "{} mode {}", m.name(), j);
        }
    }

    #[test]
    fn nonlinearities_keep_fields_real(a in field(), b in field(), c in field()) {
        let k = kg(0.1).nonlinear(&real_state(&[a.clone(), b.clone()]));
        let r = rswe(0.1).nonlinear(&real_state(&[a, b, c]));
        for s in [&k, &r] {
            let tol = 1e-10 * s.max_abs().max(1.0);
            for f in 0..s.n_fields() {
                prop_assert!(is_conjugate_symmetric(s.field(f), tol));
            }
        }
    }

    #[test]
    fn spring_classical_correction_sign(x in complex(), y in complex(), z in complex(), rho in 1.2f64..2.8) {
        let m = SpringModel::new(SpringParams::with_rho(rho));
        let w = SpectralState::from_vec(3, 1, vec![x, y, z]).unwrap();
        let c = m.classical_correction(&w).unwrap();
        let p = m.params();
        let scale = Complex64::new(0.0, p.lambda() / (4.0 * rho * p.omega_r));
        let ratio = c[(2, 0)] / scale;
        prop_assert_eq!(c[(0, 0)], Complex64::new(0.0, 0.0));
        prop_assert_eq!(c[(1, 0)], Complex64::new(0.0, 0.0));
        prop_assert!(ratio.re >= 0.0 && ratio.im.abs() <= 1e-12 * ratio.re.max(1e-300));
        prop_assert!((ratio.re - (x.norm_sqr() + y.norm_sqr())).abs() <= 1e-12);
    }

    #[test]
    fn local_correction_is_deterministic(a in field(), b in field(), t in 0.0f64..3.0, eta in 0.1f64..2.0) {
        let m = kg(0.1);
        let w = real_state(&[a, b]);
        let kernel = build_kernel(eta, 4.0, 64).unwrap();
        let first = local_mean_correction(&m, &w, t, &kernel).values;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| local_mean_correction(&m, &w, t, &kernel).values);
        prop_assert_eq!(first, single);
    }
}

#[test]
fn modvar_and_standard_pipelines_agree_within_step_defect() {
    let tab = ButcherTableau::rk4();
    let spring = SpringModel::new(SpringParams::with_rho(1.7));
    let kgm = kg(0.5);
    for (m, dt, t_max) in [(&spring as &dyn ModelSystem, 0.05, 5.0), (&kgm, 0.01, 1.0)] {
        let u0 = m.initial_state();
        let run = |f: fn(&dyn ModelSystem, &SpectralState, &ButcherTableau, &TimeGrid) -> phase_avg::Result<Trajectory>, h: f64| {
            f(m, &u0, &tab, &TimeGrid::with_record_interval(h, t_max, t_max).unwrap()).unwrap()
        };
        let std_h = run(integrate_standard, dt);
        let std_h2 = run(integrate_standard, dt / 2.0);
        let mv_h = run(integrate_modvar, dt);
        let mv_h2 = run(integrate_modvar, dt / 2.0);
        let defect = final_state(&std_h).max_abs_diff(final_state(&std_h2))
            + final_state(&mv_h).max_abs_diff(final_state(&mv_h2));
        let gap = final_state(&std_h).max_abs_diff(final_state(&mv_h));
        assert!(gap <= 10.0 * defect, "{}: gap {gap:e} vs defect {defect:e}", m.name());
    }
}

#[test]
fn fourth_order_self_convergence_on_every_model() {
    let tab = ButcherTableau::rk4();
    let spring = SpringModel::new(SpringParams::with_rho(2.0));
    let (kgm, rsm) = (kg(0.5), rswe(0.5));
    let cases: [(&dyn ModelSystem, bool, f64, [f64; 4]); 4] = [
        (&spring, true, 2.0, [0.1, 0.05, 0.025, 0.0125]),
        (&spring, false, 2.0, [0.1, 0.05, 0.025, 0.0125]),
        (&kgm, false, 0.4, [0.04, 0.02, 0.01, 0.005]),
        (&rsm, false, 0.4, [0.04, 0.02, 0.01, 0.005]),
    ];
    for (m, standard, t_max, steps) in cases {
        let solve = |h: f64| {
            let grid = TimeGrid::with_record_interval(h, t_max, t_max).unwrap();
            let traj = if standard {
                integrate_standard(m, &m.initial_state(), &tab, &grid)
            } else {
                integrate_modvar(m, &m.initial_state(), &tab, &grid)
            };
            final_state(&traj.unwrap()).clone()
        };
        let sols: Vec<SpectralState> = steps.iter().map(|&h| solve(h)).collect();
        let diffs: Vec<f64> = sols.windows(2).map(|w| w[0].max_abs_diff(&w[1])).collect();
        for pair in diffs.windows(2) {
            let slope = (pair[0] / pair[1]).log2();
            assert!((slope - 4.0).abs() <= 0.3, "{} standard={standard}: {diffs:?}", m.name());
        }
    }
}

#[test]
fn sweep_cells_are_stateless() {
    let mut config = SweepConfig::defaults(ModelId::Kg, Method::MeanCorrectedClassical).with_eps(0.1);
    config.dt = vec![1.0, 2.0];
    config.t_max = 6.0;
    config.reference_dt = 1e-3;
    config.zeta_start = 0.5;
    config.zeta_stop = 1.5;
    config.zeta_step = 0.25;
    let opts = RunOptions { workers: Some(2), timing: false };
    let full = run_sweeps(std::slice::from_ref(&config), &opts).unwrap();
    assert_eq!(full.rows.len(), 10);
    for row in &full.rows {
        assert!(row.error >= 0.0);
        assert_eq!(row.status == CellStatus::Failed, row.error.is_infinite());
        let mut single = config.clone();
        single.dt = vec![row.dt];
        single.zeta_start = row.zeta;
        single.zeta_stop = row.zeta;
        let alone = run_sweeps(&[single], &opts).unwrap();
        assert_eq!(alone.rows, vec![row.clone()]);
    }
}
