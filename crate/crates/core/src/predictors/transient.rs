use super::{lq_lower_factor, propagate, training_hankel, FitOptions, MultiStepPredictor};
use crate::signals::{HankelConfig, Trajectory};
use crate::{DpcError, Mat, Result};

/// Increasing-length ARX predictor extracted jointly from one LQ factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientPredictor {
    pub h_p: Mat,
    pub h_u: Mat,
    /// `Φ̂`, one block row per future step, `(p·tau_f) × ((p+m)(tau_p+tau_f))`.
    pub phi: Mat,
    pub phi_p: Mat,
    pub phi_y: Mat,
    pub phi_u: Mat,
    pub config: HankelConfig,
    pub outputs: usize,
    pub inputs: usize,
}

impl MultiStepPredictor for TransientPredictor {
    fn h_p(&self) -> &Mat {
        &self.h_p
    }
    fn h_u(&self) -> &Mat {
        &self.h_u
    }
    fn config(&self) -> HankelConfig {
        self.config
    }
    fn outputs(&self) -> usize {
        self.outputs
    }
    fn inputs(&self) -> usize {
        self.inputs
    }
}

pub fn fit_transient_predictor(u: &Trajectory, y: &Trajectory, cfg: HankelConfig) -> Result<TransientPredictor> {
    fit_transient_predictor_with(u, y, cfg, FitOptions::default())
}

pub fn fit_transient_predictor_with(
    u: &Trajectory,
    y: &Trajectory,
    cfg: HankelConfig,
    opts: FitOptions,
) -> Result<TransientPredictor> {
    let (p, m) = (y.channels(), u.channels());
    let c = p + m;
    let z = training_hankel(u, y, &cfg)?;
    let z_norm = z.values.norm();
    let ridge = opts.ridge_rel * z_norm;
    let l = lq_lower_factor(&z.values, ridge);
    check_input_excitation(&l, p, m, cfg.window() - 1, ridge, opts.degeneracy_rel * z_norm)?;

    // L_y⁰ᵀ: future output rows of L, truncated before their own diagonal block
    let (tau_p, tau_f) = (cfg.tau_p, cfg.tau_f);
    let n_row = c * cfg.window();
    let mut rhs = Mat::zeros(n_row, p * tau_f);
    for k in 0..tau_f {
        let lead = c * (tau_p + k);
        for i in 0..p {
            let row = (tau_p + k) * c + i;
            rhs.view_mut((0, k * p + i), (lead, 1))
                .copy_from(&l.view((row, 0), (1, lead)).transpose());
        }
    }
    // Φ̂ L = L_y⁰  ⇔  Lᵀ Φ̂ᵀ = L_y⁰ᵀ
    let lt = l.transpose();
    if !lt.solve_upper_triangular_mut(&mut rhs) {
        return Err(DpcError::DegenerateData { lag: 0 });
    }
    TransientPredictor::from_phi(rhs.transpose(), cfg, p, m)
}

impl TransientPredictor {
    /// Partitions `Φ̂` and solves the unit lower-triangular recursion.
    pub fn from_phi(phi: Mat, cfg: HankelConfig, p: usize, m: usize) -> Result<Self> {
        let c = p + m;
        let (tau_p, tau_f) = (cfg.tau_p, cfg.tau_f);
        if phi.shape() != (p * tau_f, c * cfg.window()) {
            return Err(DpcError::dim(
                "transient predictor columns",
                c * cfg.window(),
                phi.ncols(),
            ));
        }
        let past_cols = c * tau_p;
        let mut phi_p = Mat::zeros(p * tau_f, past_cols);
        let mut phi_y = Mat::zeros(p * tau_f, p * tau_f);
        let mut phi_u = Mat::zeros(p * tau_f, m * tau_f);
        for k in 0..tau_f {
            phi_p
                .view_mut((k * p, 0), (p, past_cols))
                .copy_from(&phi.view((k * p, 0), (p, past_cols)));
            for j in 0..k {
                let col = c * (tau_p + j);
                phi_y
                    .view_mut((k * p, j * p), (p, p))
                    .copy_from(&phi.view((k * p, col), (p, p)));
                phi_u
                    .view_mut((k * p, j * m), (p, m))
                    .copy_from(&phi.view((k * p, col + p), (p, m)));
            }
        }
        let h_p = propagate(&phi_p, &phi_y, p, None);
        let h_u = propagate(&phi_u, &phi_y, p, Some(m));
        Ok(Self {
            h_p,
            h_u,
            phi,
            phi_p,
            phi_y,
            phi_u,
            config: cfg,
            outputs: p,
            inputs: m,
        })
    }
}

/// Input rows of `L` (steps `0..=last_step`) must carry innovation clearly above the ridge floor.
pub(crate) fn check_input_excitation(l: &Mat, p: usize, m: usize, steps: usize, ridge: f64, tol: f64) -> Result<()> {
    let c = p + m;
    for s in 0..steps {
        for i in 0..m {
            let r = s * c + p + i;
            let d = l[(r, r)];
            let innovation = (d * d - ridge * ridge).max(0.0).sqrt();
            if innovation <= tol {
                return Err(DpcError::DegenerateData { lag: s });
            }
        }
    }
    Ok(())
}
