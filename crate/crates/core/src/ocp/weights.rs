use serde::{Deserialize, Serialize};

use crate::{DpcError, Mat, Result, Vector};

/// Stage weights `Q̄`, `R̄` with per-channel normalization and the DeePC
/// regularization weights.
///
/// Costs act on normalized signals: the per-step output weight is
/// `diag(1/q_norm) · Q̄ · diag(1/q_norm)`, likewise for inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub q_bar: Vec<Vec<f64>>,
    pub r_bar: Vec<Vec<f64>>,
    pub q_norm: Vec<f64>,
    pub r_norm: Vec<f64>,
    pub lambda_g2: f64,
    pub lambda_sigma: f64,
}

fn diag(values: &[f64]) -> Vec<Vec<f64>> {
    (0..values.len())
        .map(|i| {
            (0..values.len())
                .map(|j| if i == j { values[i] } else { 0.0 })
                .collect()
        })
        .collect()
}

impl WeightSpec {
    /// TPC and Single-ARX tuning for three inputs and three outputs.
    pub fn tpc_default() -> Self {
        Self {
            q_bar: diag(&[1.0; 3]),
            r_bar: diag(&[1.0; 3]),
            q_norm: vec![0.002, 0.04, 0.02],
            r_norm: vec![0.0025; 3],
            lambda_g2: 30.0,
            lambda_sigma: 1e5,
        }
    }

    /// DeePC tuning for three inputs and three outputs.
    pub fn deepc_default() -> Self {
        Self {
            q_bar: diag(&[1e8, 1e7, 1e7]),
            r_bar: diag(&[1e-2, 1.0, 1e-2]),
            q_norm: vec![1.0; 3],
            r_norm: vec![1.0; 3],
            lambda_g2: 30.0,
            lambda_sigma: 1e5,
        }
    }

    pub fn outputs(&self) -> usize {
        self.q_bar.len()
    }

    pub fn inputs(&self) -> usize {
        self.r_bar.len()
    }

    /// Multiplies both stage weights by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        for row in self.q_bar.iter_mut().chain(self.r_bar.iter_mut()) {
            for v in row.iter_mut() {
                *v *= factor;
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (p, m) = (self.outputs(), self.inputs());
        if self.q_bar.iter().any(|r| r.len() != p) || self.r_bar.iter().any(|r| r.len() != m) {
            return Err(DpcError::Config("q_bar and r_bar must be square".into()));
        }
        if self.q_norm.len() != p || self.r_norm.len() != m {
            return Err(DpcError::Config(format!(
                "normalization lengths ({}, {}) do not match weights ({p}, {m})",
                self.q_norm.len(),
                self.r_norm.len()
            )));
        }
        if self
            .q_norm
            .iter()
            .chain(&self.r_norm)
            .any(|&v| !(v > 0.0 && v.is_finite()))
        {
            return Err(DpcError::Config("normalization scales must be positive".into()));
        }
        if !(self.lambda_g2 >= 0.0) || !(self.lambda_sigma > 0.0) {
            return Err(DpcError::Config(format!(
                "need lambda_g2 >= 0 and lambda_sigma > 0 (got {}, {})",
                self.lambda_g2, self.lambda_sigma
            )));
        }
        let q = self.q_step();
        if (&q - q.transpose()).amax() > 1e-12 * q.amax().max(1.0) {
            return Err(DpcError::Config("q_bar is not symmetric".into()));
        }
        let q_min = q.clone().symmetric_eigen().eigenvalues.min();
        if q_min < -1e-12 * q.amax() {
            return Err(DpcError::Config(format!(
                "q_bar is not positive semidefinite (eigenvalue {q_min:e})"
            )));
        }
        let r = self.r_step();
        if (&r - r.transpose()).amax() > 1e-12 * r.amax().max(1.0) || r.cholesky().is_none() {
            return Err(DpcError::Config("r_bar is not symmetric positive definite".into()));
        }
        Ok(())
    }

    pub fn q_step(&self) -> Mat {
        normalized(&self.q_bar, &self.q_norm)
    }

    pub fn r_step(&self) -> Mat {
        normalized(&self.r_bar, &self.r_norm)
    }

    /// Block-diagonal output weight over `tau_f` steps.
    pub fn q_full(&self, tau_f: usize) -> Mat {
        block_diag(&self.q_step(), tau_f)
    }

    pub fn r_full(&self, tau_f: usize) -> Mat {
        block_diag(&self.r_step(), tau_f)
    }
}

fn normalized(w: &[Vec<f64>], norm: &[f64]) -> Mat {
    let n = w.len();
    Mat::from_fn(n, n, |i, j| w[i][j] / (norm[i] * norm[j]))
}

fn block_diag(block: &Mat, reps: usize) -> Mat {
    let n = block.nrows();
    let mut out = Mat::zeros(n * reps, n * reps);
    for k in 0..reps {
        out.view_mut((k * n, k * n), (n, n)).copy_from(block);
    }
    out
}

/// Per-channel input box and optional output bounds, repeated over the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct OcpBounds {
    pub u_lb: Vector,
    pub u_ub: Vector,
    pub y_lb: Option<Vector>,
    pub y_ub: Option<Vector>,
}

impl OcpBounds {
    /// `|u_i| ≤ limit`, outputs unbounded.
    pub fn symmetric_input(m: usize, limit: f64) -> Self {
        Self {
            u_lb: Vector::from_element(m, -limit),
            u_ub: Vector::from_element(m, limit),
            y_lb: None,
            y_ub: None,
        }
    }

    pub fn inputs(&self) -> usize {
        self.u_lb.len()
    }

    pub fn has_output_bounds(&self) -> bool {
        self.y_lb.is_some() || self.y_ub.is_some()
    }

    pub fn validate(&self, p: usize, m: usize) -> Result<()> {
        if self.u_lb.len() != m || self.u_ub.len() != m {
            return Err(DpcError::dim("input bounds", m, self.u_lb.len().max(self.u_ub.len())));
        }
        for y in [&self.y_lb, &self.y_ub].into_iter().flatten() {
            if y.len() != p {
                return Err(DpcError::dim("output bounds", p, y.len()));
            }
        }
        let bad_u = self.u_lb.iter().zip(self.u_ub.iter()).any(|(l, u)| l > u);
        let bad_y = match (&self.y_lb, &self.y_ub) {
            (Some(l), Some(u)) => l.iter().zip(u.iter()).any(|(l, u)| l > u),
            _ => false,
        };
        if bad_u || bad_y {
            return Err(DpcError::Config("lower bound exceeds upper bound".into()));
        }
        Ok(())
    }

    /// Stacked `(lower, upper)` output bounds over `tau_f` steps, infinite where absent.
    pub(crate) fn y_stacked(&self, p: usize, tau_f: usize) -> (Vector, Vector) {
        let lo = self
            .y_lb
            .clone()
            .unwrap_or_else(|| Vector::from_element(p, f64::NEG_INFINITY));
        let hi = self
            .y_ub
            .clone()
            .unwrap_or_else(|| Vector::from_element(p, f64::INFINITY));
        (tile(&lo, tau_f), tile(&hi, tau_f))
    }

    pub(crate) fn u_stacked(&self, tau_f: usize) -> (Vector, Vector) {
        (tile(&self.u_lb, tau_f), tile(&self.u_ub, tau_f))
    }
}

pub(crate) fn tile(v: &Vector, reps: usize) -> Vector {
    let n = v.len();
    Vector::from_fn(n * reps, |i, _| v[i % n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_weights_validate() {
        WeightSpec::tpc_default().validate().unwrap();
        WeightSpec::deepc_default().validate().unwrap();
    }

    #[test]
    fn normalization_folds_into_step_weight() {
        let q = WeightSpec::tpc_default().q_step();
        assert!((q[(0, 0)] - 1.0 / 0.002f64.powi(2)).abs() < 1e-6);
        assert!((q[(1, 1)] - 1.0 / 0.04f64.powi(2)).abs() < 1e-9);
        assert_eq!(q[(0, 1)], 0.0);
        let r = WeightSpec::tpc_default().r_full(60);
        assert_eq!(r.shape(), (180, 180));
        assert!((r[(179, 179)] - 1.0 / 0.0025f64.powi(2)).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_weights() {
        let mut w = WeightSpec::tpc_default();
        w.r_bar[1][1] = 0.0;
        assert!(w.validate().is_err());
        let mut w = WeightSpec::tpc_default();
        w.q_bar[0][0] = -1.0;
        assert!(w.validate().is_err());
        let mut w = WeightSpec::deepc_default();
        w.lambda_sigma = 0.0;
        assert!(w.validate().is_err());
        let mut w = WeightSpec::tpc_default();
        w.q_norm[2] = 0.0;
        assert!(w.validate().is_err());
    }

    #[test]
    fn bounds_checks() {
        let b = OcpBounds::symmetric_input(3, 0.1);
        b.validate(3, 3).unwrap();
        assert!(b.validate(3, 2).is_err());
        let (lo, hi) = b.y_stacked(3, 2);
        assert!(lo.iter().all(|v| *v == f64::NEG_INFINITY) && hi.iter().all(|v| *v == f64::INFINITY));
        let mut bad = b.clone();
        bad.u_lb[0] = 0.2;
        assert!(bad.validate(3, 3).is_err());
    }
}
