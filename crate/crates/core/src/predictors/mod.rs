//! Offline predictor construction from one excitation experiment.
//!
//! All predictors share the window convention of [`HankelConfig`]: a past of
//! `tau_p` samples of `z(t) = [y(t); u(t)]` followed by `tau_f` future
//! samples. A predictor maps the stacked past `z_p` and the planned inputs
//! `u` (future steps `0..tau_f`) to the stacked future outputs,
//! `y = H_p z_p + H_u u`, with `H_u` block strictly lower triangular.

mod deepc;
mod lq;
mod persist;
mod single_arx;
mod transient;

pub use deepc::{build_deepc_data, DeePCData};
pub use lq::{lq_decompose, lq_lower_factor, LqFactors};
pub use persist::{MatrixDump, PredictorBundle, PREDICTOR_FORMAT_VERSION};
pub use single_arx::{expand_single_arx, fit_single_arx, fit_single_arx_with, SingleArxPredictor};
pub use transient::{fit_transient_predictor, fit_transient_predictor_with, TransientPredictor};

use crate::signals::{build_hankel, interleave, HankelConfig, HankelMatrix, Trajectory};
use crate::{DpcError, Mat, Result, Vector};

/// Numerical options shared by the ARX-type fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Tikhonov weight relative to `‖Z‖_F`. Noiseless LTI data makes the
    /// output rows of `Z` linearly dependent; the ridge keeps every
    /// triangular factor invertible while staying far below the data scale.
    pub ridge_rel: f64,
    /// Input-row innovation below this fraction of `‖Z‖_F` means the input
    /// is not persistently exciting.
    pub degeneracy_rel: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            ridge_rel: 1e-10,
            degeneracy_rel: 1e-7,
        }
    }
}

/// Common view of a multi-step linear predictor.
pub trait MultiStepPredictor {
    fn h_p(&self) -> &Mat;
    fn h_u(&self) -> &Mat;
    fn config(&self) -> HankelConfig;
    fn outputs(&self) -> usize;
    fn inputs(&self) -> usize;

    fn predict(&self, z_p: &Vector, u: &Vector) -> Result<Vector> {
        predict(self.h_p(), self.h_u(), z_p, u)
    }
}

/// `y = H_p z_p + H_u u`.
pub fn predict(h_p: &Mat, h_u: &Mat, z_p: &Vector, u: &Vector) -> Result<Vector> {
    if z_p.len() != h_p.ncols() {
        return Err(DpcError::dim("predict z_p", h_p.ncols(), z_p.len()));
    }
    if u.len() != h_u.ncols() {
        return Err(DpcError::dim("predict u", h_u.ncols(), u.len()));
    }
    Ok(h_p * z_p + h_u * u)
}

/// Interleaved training Hankel `Z` over the last `n_samples` samples.
pub(crate) fn training_hankel(u: &Trajectory, y: &Trajectory, cfg: &HankelConfig) -> Result<HankelMatrix> {
    cfg.validate()?;
    if u.len() < cfg.n_samples {
        return Err(DpcError::InsufficientData {
            needed: cfg.n_samples,
            available: u.len(),
        });
    }
    let z = interleave(y, u)?;
    let z = z.slice(z.len() - cfg.n_samples, cfg.n_samples)?;
    build_hankel(&z, 0, cfg.window() - 1, cfg.n_col())
}

/// Block forward substitution for `(I - Φ_y) H = Φ`.
///
/// `phi_y` is block strictly lower triangular with `p × p` blocks. When
/// `causal_cols` is set, `phi` has `tau_f` column blocks of that width and
/// block `(k, c)` is only formed for `c < k`; all other blocks stay exactly 0.
pub(crate) fn propagate(phi: &Mat, phi_y: &Mat, p: usize, causal_cols: Option<usize>) -> Mat {
    let tau_f = phi_y.nrows() / p;
    let mut h = Mat::zeros(phi.nrows(), phi.ncols());
    for k in 0..tau_f {
        let (c0, width) = match causal_cols {
            Some(w) => (0, k * w),
            None => (0, phi.ncols()),
        };
        if width == 0 {
            continue;
        }
        let mut block = phi.view((k * p, c0), (p, width)).into_owned();
        for j in 0..k {
            let coupling = phi_y.view((k * p, j * p), (p, p));
            let prev_width = match causal_cols {
                Some(w) => j * w,
                None => width,
            };
            if prev_width == 0 {
                continue;
            }
            let prev = h.view((j * p, c0), (p, prev_width)).into_owned();
            let mut target = block.columns_mut(0, prev_width);
            target.gemm(1.0, &coupling, &prev, 1.0);
        }
        h.view_mut((k * p, c0), (p, width)).copy_from(&block);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predict_checks_dimensions() {
        let h_p = Mat::zeros(4, 6);
        let h_u = Mat::zeros(4, 2);
        assert!(predict(&h_p, &h_u, &Vector::zeros(6), &Vector::zeros(2))
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        assert!(predict(&h_p, &h_u, &Vector::zeros(5), &Vector::zeros(2)).is_err());
        assert!(predict(&h_p, &h_u, &Vector::zeros(6), &Vector::zeros(3)).is_err());
    }

    #[test]
    fn propagate_matches_dense_inverse() {
        let p = 2;
        let tau_f = 4;
        let mut phi_y = Mat::zeros(p * tau_f, p * tau_f);
        for k in 0..tau_f {
            for j in 0..k {
                for r in 0..p {
                    for c in 0..p {
                        phi_y[(k * p + r, j * p + c)] = 0.1 * ((k + 2 * j + r + 3 * c) as f64).sin();
                    }
                }
            }
        }
        let phi = Mat::from_fn(p * tau_f, 5, |r, c| ((r * 7 + c) as f64).cos());
        let h = propagate(&phi, &phi_y, p, None);
        let dense = (Mat::identity(p * tau_f, p * tau_f) - &phi_y).try_inverse().unwrap() * &phi;
        assert!((h - dense).amax() < 1e-12);
    }
}
