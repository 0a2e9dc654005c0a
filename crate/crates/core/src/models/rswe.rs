use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModelSystem;
use crate::numerics::{dft_forward, dft_inverse, BlockOperator, GridSpec, SpectralState};

pub const DEFAULT_HYPERVISCOSITY: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsweParams {
    pub eps: f64,
    /// Hyperviscosity coefficient `mu` of the `-mu k^4` damping.
    pub mu: f64,
}

impl RsweParams {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            mu: DEFAULT_HYPERVISCOSITY,
        }
    }
}

/// Nondimensional f-plane rotating shallow water equations in one dimension.
///
/// State `[u_hat, v_hat, phi_hat]`. `L` is singular (the zero-frequency
/// Rossby branch), so the mean correction uses the Moore-Penrose
/// pseudoinverse and the projector `L L^+ != I`. Products are formed in
/// physical space; derivatives multiply by `i k`.
#[derive(Debug, Clone)]
pub struct RsweModel {
    params: RsweParams,
    grid: GridSpec,
    psi: Vec<f64>,
    dk: Vec<f64>,
    linear: BlockOperator,
    inverse: BlockOperator,
    projector: BlockOperator,
}

impl RsweModel {
    pub fn new(params: RsweParams, grid: GridSpec) -> Self {
        assert!(params.eps > 0.0, "eps must be positive");
        // The Nyquist mode carries no real first derivative, so it rotates like the mean mode.
        let k = grid.derivative_wavenumbers();
        let psi: Vec<f64> = k.iter().map(|k| (1.0 + k * k).sqrt()).collect();
        let n = grid.len();
        let z = Complex64::new(0.0, 0.0);
        let r = |v: f64| Complex64::new(v, 0.0);
        let im = |v: f64| Complex64::new(0.0, v);
        let linear = BlockOperator::from_fn(3, n, |j| vec![z, r(-1.0), im(k[j]), r(1.0), z, z, im(k[j]), z, z]);
        let inverse = BlockOperator::from_fn(3, n, |j| {
            let p2 = 1.0 + k[j] * k[j];
            vec![z, r(1.0 / p2), im(-k[j] / p2), r(-1.0 / p2), z, z, im(-k[j] / p2), z, z]
        });
        let projector = BlockOperator::from_fn(3, n, |j| {
            let p2 = 1.0 + k[j] * k[j];
            vec![
                r(1.0),
                z,
                z,
                z,
                r(1.0 / p2),
                im(-k[j] / p2),
                z,
                im(k[j] / p2),
                r(k[j] * k[j] / p2),
            ]
        });
        Self {
            params,
            grid,
            psi,
            dk: k,
            linear,
            inverse,
            projector,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn params(&self) -> &RsweParams {
        &self.params
    }

    /// Hyperviscous damping `-mu k^4 U`.
    pub fn dissipation(&self, u: &SpectralState) -> SpectralState {
        let mut out = u.clone();
        for f in 0..3 {
            for (v, k) in out.field_mut(f).iter_mut().zip(self.grid.wavenumbers()) {
                *v *= -self.params.mu * k.powi(4);
            }
        }
        out
    }

    fn derivative(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        spectrum
            .iter()
            .zip(&self.dk)
            .map(|(v, k)| v * Complex64::new(0.0, *k))
            .collect()
    }
}

impl ModelSystem for RsweModel {
    fn name(&self) -> &str {
        "rswe"
    }

    fn eps(&self) -> f64 {
        self.params.eps
    }

    fn omega_max(&self) -> f64 {
        (1.0 + self.grid.k_max().powi(2)).sqrt()
    }

    fn n_fields(&self) -> usize {
        3
    }

    fn n_modes(&self) -> usize {
        self.grid.len()
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
        let eps = self.params.eps;
        BlockOperator::from_fn(3, self.grid.len(), |j| {
            let (p, kj) = (self.psi[j], self.dk[j]);
            let p2 = p * p;
            let (s, c) = (p * t / eps).sin_cos();
            let r = |v: f64| Complex64::new(v, 0.0);
            let im = |v: f64| Complex64::new(0.0, v);
            vec![
                r(c),
                r(-s / p),
                im(kj * s / p),
                r(s / p),
                r((kj * kj + c) / p2),
                im(kj * (1.0 - c) / p2),
                im(kj * s / p),
                im(kj * (c - 1.0) / p2),
                r((1.0 + kj * kj * c) / p2),
            ]
        })
    }

    fn nonlinear(&self, state: &SpectralState) -> SpectralState {
        let u = dft_inverse(state.field(0));
        let ux = dft_inverse(&self.derivative(state.field(0)));
        let vx = dft_inverse(&self.derivative(state.field(1)));
        let phi = dft_inverse(state.field(2));

        let adv_u: Vec<Complex64> = u.iter().zip(&ux).map(|(a, b)| -a * b).collect();
        let adv_v: Vec<Complex64> = u.iter().zip(&vx).map(|(a, b)| -a * b).collect();
        let flux: Vec<Complex64> = u.iter().zip(&phi).map(|(a, b)| a * b).collect();
        let div: Vec<Complex64> = self.derivative(&dft_forward(&flux)).iter().map(|v| -v).collect();

        SpectralState::from_fields(&[dft_forward(&adv_u), dft_forward(&adv_v), div]).expect("equal lengths")
    }

    fn dissipated_nonlinear(&self, u: &SpectralState) -> SpectralState {
        let mut n = self.nonlinear(u);
        n.axpy(1.0, &self.dissipation(u));
        n
    }

    fn initial_state(&self) -> SpectralState {
        let phi: Vec<f64> = self
            .grid
            .points()
            .iter()
            .map(|x| (-(x - PI).powi(2) / 2.0).exp())
            .collect();
        let zero = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        SpectralState::from_fields(&[zero.clone(), zero, self.grid.forward(&phi).expect("grid length")])
            .expect("equal lengths")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dft_forward_real, is_conjugate_symmetric};

    fn model() -> RsweModel {
        RsweModel::new(RsweParams::with_eps(0.1), GridSpec::new(32).unwrap())
    }

    fn random_real_state(seed: u64) -> SpectralState {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let fields: Vec<Vec<Complex64>> = (0..3)
            .map(|_| dft_forward_real(&(0..32).map(|_| next()).collect::<Vec<_>>()))
            .collect();
        SpectralState::from_fields(&fields).unwrap()
    }

    #[test]
    fn mean_mode_operator_kills_geopotential() {
        let m = model();
        let mut x = SpectralState::zeros(3, 32);
        x[(2, 0)] = Complex64::new(1.0, 0.0);
        assert!(m.apply_linear(&x).max_abs() == 0.0);
    }

    #[test]
    fn projector_entry_at_unit_wavenumber() {
        let m = model();
        let b = m.range_projector().block(1);
        assert!((b[4] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn linear_is_skew_hermitian() {
        assert!(model().linear().is_skew_hermitian(1e-15));
    }

    #[test]
    fn exp_round_trip_is_identity() {
        let m = model();
        let x = random_real_state(4);
        for t in [0.013, -0.7, 3.3] {
            let y = m.apply_exp(-t, &m.apply_exp(t, &x));
            assert!(y.max_abs_diff(&x) < 1e-12);
        }
        assert!(m.apply_exp(0.0, &x).max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn nonlinearity_of_rest_state_is_zero() {
        let m = model();
        assert!(m.nonlinear(&m.initial_state()).max_abs() < 1e-15);
    }

    #[test]
    fn nonlinearities_keep_fields_real() {
        let m = model();
        let x = random_real_state(21);
        for n in [m.nonlinear(&x), m.dissipated_nonlinear(&x)] {
            for f in 0..3 {
                assert!(is_conjugate_symmetric(n.field(f), 1e-10));
            }
        }
    }

    #[test]
    fn advection_matches_pointwise_formula() {
        // u = sin x, v = cos x, phi = 1: -u u_x = -sin x cos x, -u v_x = sin^2 x, -(u phi)_x = -cos x.
        let m = model();
        let grid = m.grid().clone();
        let x = grid.points();
        let field = |f: &dyn Fn(f64) -> f64| grid.forward(&x.iter().map(|&v| f(v)).collect::<Vec<_>>()).unwrap();
        let s = SpectralState::from_fields(&[field(&f64::sin), field(&f64::cos), field(&|_| 1.0)]).unwrap();
        let n = m.nonlinear(&s);
        let expect = [field(&|v| -v.sin() * v.cos()), field(&|v| v.sin().powi(2)), field(&|v| -v.cos())];
        for (f, e) in expect.iter().enumerate() {
            for (a, b) in n.field(f).iter().zip(e) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dissipation_is_quartic_damping() {
        let m = model();
        let mut x = SpectralState::zeros(3, 32);
        x[(1, 2)] = Complex64::new(1.0, 0.0);
        let d = m.dissipation(&x);
        assert!((d[(1, 2)] - Complex64::new(-1e-4 * 16.0, 0.0)).norm() < 1e-18);
    }
}
