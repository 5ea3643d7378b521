use super::weights::WeightSpec;
use crate::predictors::{DeePCData, MultiStepPredictor};
use crate::{DpcError, Mat, Result, Vector};

/// Gain `K` with `u* = K z_p` for the unconstrained ARX-type problem,
/// `K = −(H_uᵀQH_u + R)⁻¹ H_uᵀQH_p`.
pub fn closed_form_tpc_gain(pred: &dyn MultiStepPredictor, w: &WeightSpec) -> Result<Mat> {
    w.validate()?;
    let tau_f = pred.config().tau_f;
    let (h_p, h_u) = (pred.h_p(), pred.h_u());
    let hu_t_q = h_u.transpose() * w.q_full(tau_f);
    let m = &hu_t_q * h_u + w.r_full(tau_f);
    let m = (&m + m.transpose()) * 0.5;
    let chol = m
        .cholesky()
        .ok_or_else(|| DpcError::Config("H_uᵀQH_u + R is not positive definite".into()))?;
    Ok(-chol.solve(&(hu_t_q * h_p)))
}

pub fn closed_form_tpc(pred: &dyn MultiStepPredictor, w: &WeightSpec, z_p: &Vector) -> Result<Vector> {
    let k = closed_form_tpc_gain(pred, w)?;
    if z_p.len() != k.ncols() {
        return Err(DpcError::dim("closed-form past", k.ncols(), z_p.len()));
    }
    Ok(k * z_p)
}

/// Gain of the soft-past DeePC solution acting on interleaved `z_p`:
/// `u* = λ_σ U_f [Y_fᵀQY_f + U_fᵀRU_f + λ_g2 I + λ_σ Z_pᵀZ_p]^† Z_pᵀ [u_p; y_p]`.
///
/// Falls back to an SVD pseudoinverse when the bracket is singular.
pub fn closed_form_deepc_gain(data: &DeePCData, w: &WeightSpec) -> Result<Mat> {
    w.validate()?;
    let tau_f = data.config.tau_f;
    let zp = data.z_p();
    let bracket = data.y_f.transpose() * w.q_full(tau_f) * &data.y_f
        + data.u_f.transpose() * w.r_full(tau_f) * &data.u_f
        + Mat::identity(zp.ncols(), zp.ncols()) * w.lambda_g2
        + w.lambda_sigma * zp.transpose() * &zp;
    let bracket = (&bracket + bracket.transpose()) * 0.5;
    let rhs = zp.transpose() * w.lambda_sigma;
    let g_map = match bracket.clone().cholesky() {
        Some(chol) => chol.solve(&rhs),
        None => {
            let eps = 1e-12 * bracket.amax();
            let pinv = bracket
                .pseudo_inverse(eps)
                .map_err(|e| DpcError::Config(e.to_string()))?;
            pinv * rhs
        }
    };
    let stacked_gain = &data.u_f * g_map;
    // reorder columns from [u_p; y_p] to interleaved [y; u] per step
    let (p, m) = (data.outputs, data.inputs);
    let tau_p = data.config.tau_p;
    let c = p + m;
    let mut gain = Mat::zeros(stacked_gain.nrows(), c * tau_p);
    for s in 0..tau_p {
        for i in 0..m {
            gain.set_column(s * c + p + i, &stacked_gain.column(s * m + i));
        }
        for i in 0..p {
            gain.set_column(s * c + i, &stacked_gain.column(m * tau_p + s * p + i));
        }
    }
    Ok(gain)
}

pub fn closed_form_deepc(data: &DeePCData, w: &WeightSpec, z_p: &Vector) -> Result<Vector> {
    let k = closed_form_deepc_gain(data, w)?;
    if z_p.len() != k.ncols() {
        return Err(DpcError::dim("closed-form past", k.ncols(), z_p.len()));
    }
    Ok(k * z_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictors::{build_deepc_data, fit_transient_predictor};
    use crate::signals::{white_excitation, HankelConfig};

    #[test]
    fn zero_past_gives_zero_input() {
        let u = white_excitation(3, 160, 0.01, 0.1, 31).unwrap();
        let y = white_excitation(3, 160, 0.01, 0.1, 32).unwrap();
        let cfg = HankelConfig::new(3, 4, 160).unwrap();
        let tpc = fit_transient_predictor(&u, &y, cfg).unwrap();
        let z = Vector::zeros(18);
        assert!(closed_form_tpc(&tpc, &WeightSpec::tpc_default(), &z)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let data = build_deepc_data(&u, &y, cfg).unwrap();
        assert!(closed_form_deepc(&data, &WeightSpec::deepc_default(), &z)
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn no_output_weight_means_no_action() {
        let u = white_excitation(3, 160, 0.01, 0.1, 33).unwrap();
        let y = white_excitation(3, 160, 0.01, 0.1, 34).unwrap();
        let cfg = HankelConfig::new(3, 4, 160).unwrap();
        let tpc = fit_transient_predictor(&u, &y, cfg).unwrap();
        let mut w = WeightSpec::tpc_default();
        w.q_bar = vec![vec![0.0; 3]; 3];
        let z = Vector::from_element(18, 0.02);
        assert!(closed_form_tpc(&tpc, &w, &z).unwrap().iter().all(|&v| v == 0.0));
    }
}
