use crate::error::{Error, Result};
use crate::numerics::SpectralState;

/// Explicit Runge-Kutta coefficients (strictly lower-triangular `a`).
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ButcherTableau {
    /// `a[i]` holds the `i` coefficients of stage `i` on the earlier stages.
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let m = b.len();
        if m == 0 || a.len() != m || c.len() != m {
            return Err(Error::Config("tableau needs matching a, b, c with at least one stage".into()));
        }
        for (i, row) in a.iter().enumerate() {
            if row.len() != i {
                return Err(Error::Config(format!("tableau row {i} must have {i} entries for an explicit method")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - c[i]).abs() > 1e-12 {
                return Err(Error::Config(format!("tableau row {i} sums to {sum}, expected c = {}", c[i])));
            }
        }
        let total: f64 = b.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("tableau weights sum to {total}, expected 1")));
        }
        Ok(Self { a, b, c })
    }

    /// Classical fourth-order method.
    pub fn rk4() -> Self {
        Self::new(
            vec![vec![], vec![0.5], vec![0.0, 0.5], vec![0.0, 0.0, 1.0]],
            vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            vec![0.0, 0.5, 0.5, 1.0],
        )
        .expect("valid tableau")
    }

    pub fn forward_euler() -> Self {
        Self::new(vec![vec![]], vec![1.0], vec![0.0]).expect("valid tableau")
    }

    /// Heun's second-order method.
    pub fn heun() -> Self {
        Self::new(vec![vec![], vec![1.0]], vec![0.5, 0.5], vec![0.0, 1.0]).expect("valid tableau")
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }
}

/// One explicit step. `f(stage, t_i, y_i)` is told which stage it evaluates.
pub fn rk_step<F>(tab: &ButcherTableau, t: f64, y: &SpectralState, dt: f64, mut f: F) -> SpectralState
where
    F: FnMut(usize, f64, &SpectralState) -> SpectralState,
{
    let m = tab.stages();
    let mut slopes: Vec<SpectralState> = Vec::with_capacity(m);
    for i in 0..m {
        let ti = t + tab.c[i] * dt;
        let slope = if i == 0 {
            f(0, ti, y)
        } else {
            let mut yi = y.clone();
            for (j, &aij) in tab.a[i].iter().enumerate() {
                if aij != 0.0 {
                    yi.axpy(dt * aij, &slopes[j]);
                }
            }
            f(i, ti, &yi)
        };
        slopes.push(slope);
    }
    let mut next = y.clone();
    for (k, &bk) in slopes.iter().zip(&tab.b) {
        if bk != 0.0 {
            next.axpy(dt * bk, k);
        }
    }
    next
}
