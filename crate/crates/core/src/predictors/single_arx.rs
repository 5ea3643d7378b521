use super::transient::check_input_excitation;
use super::{lq_lower_factor, propagate, training_hankel, FitOptions, MultiStepPredictor};
use crate::signals::{HankelConfig, Trajectory};
use crate::{DpcError, Mat, Result, Vector};

/// Fixed-length one-step ARX model replicated along the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleArxPredictor {
    /// `p × ((p+m)·tau_p)`, regressor blocks ordered oldest first.
    pub phi: Mat,
    /// RMS one-step residual per output on the training windows.
    pub residual_std: Vector,
    pub h_p: Mat,
    pub h_u: Mat,
    pub config: HankelConfig,
    pub outputs: usize,
    pub inputs: usize,
    pub warnings: Vec<String>,
}

impl MultiStepPredictor for SingleArxPredictor {
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

pub fn fit_single_arx(u: &Trajectory, y: &Trajectory, cfg: HankelConfig) -> Result<SingleArxPredictor> {
    fit_single_arx_with(u, y, cfg, FitOptions::default())
}

/// Least-squares fit of `y(t+1)` on the previous `tau_p` samples of `z`.
///
/// Uses the same Hankel columns as the transient predictor, restricted to
/// the first `tau_p + 1` block rows.
pub fn fit_single_arx_with(
    u: &Trajectory,
    y: &Trajectory,
    cfg: HankelConfig,
    opts: FitOptions,
) -> Result<SingleArxPredictor> {
    let (p, m) = (y.channels(), u.channels());
    let c = p + m;
    let tau_p = cfg.tau_p;
    let z = training_hankel(u, y, &cfg)?;
    let z_norm = z.values.norm();
    let ridge = opts.ridge_rel * z_norm;
    let lead = c * tau_p;
    let rows = z.values.rows(0, lead + p).into_owned();
    let l = lq_lower_factor(&rows, ridge);
    check_input_excitation(&l, p, m, tau_p, ridge, opts.degeneracy_rel * z_norm)?;

    let mut warnings = Vec::new();
    let l_reg = l.view((0, 0), (lead, lead));
    let floor = 1e-10 * l_reg.diagonal().amax();
    let deficient = l_reg
        .diagonal()
        .iter()
        .filter(|d| (d.powi(2) - ridge * ridge).max(0.0).sqrt() <= floor)
        .count();
    if deficient > 0 {
        warnings.push(format!(
            "regressor is rank deficient ({deficient} of {lead} directions); using the minimum-norm fit"
        ));
    }

    let mut rhs = l.view((lead, 0), (p, lead)).transpose();
    if !l_reg.transpose().solve_upper_triangular_mut(&mut rhs) {
        return Err(DpcError::DegenerateData { lag: 0 });
    }
    let phi = rhs.transpose();

    let target = z.values.rows(lead, p);
    let residual = target - &phi * z.values.rows(0, lead);
    let residual_std = Vector::from_iterator(p, residual.row_iter().map(|r| r.norm()));

    let (h_p, h_u) = expand_single_arx(&phi, p, m, cfg)?;
    Ok(SingleArxPredictor {
        phi,
        residual_std,
        h_p,
        h_u,
        config: cfg,
        outputs: p,
        inputs: m,
        warnings,
    })
}

/// Banded multi-step expansion of a one-step ARX block.
///
/// Row block `k` applies `phi` to the window of relative steps
/// `k..k + tau_p`; steps inside the past feed `Ψ_p`, later ones the
/// recursion blocks `Ψ_y`, `Ψ_u`.
pub fn expand_single_arx(phi: &Mat, p: usize, m: usize, cfg: HankelConfig) -> Result<(Mat, Mat)> {
    let c = p + m;
    let (tau_p, tau_f) = (cfg.tau_p, cfg.tau_f);
    if phi.shape() != (p, c * tau_p) {
        return Err(DpcError::dim("single-ARX coefficient columns", c * tau_p, phi.ncols()));
    }
    let mut psi_p = Mat::zeros(p * tau_f, c * tau_p);
    let mut psi_y = Mat::zeros(p * tau_f, p * tau_f);
    let mut psi_u = Mat::zeros(p * tau_f, m * tau_f);
    for k in 0..tau_f {
        for i in 0..tau_p {
            let s = k + i;
            let block = phi.view((0, i * c), (p, c));
            if s < tau_p {
                psi_p.view_mut((k * p, s * c), (p, c)).copy_from(&block);
            } else {
                let j = s - tau_p;
                psi_y.view_mut((k * p, j * p), (p, p)).copy_from(&block.columns(0, p));
                psi_u.view_mut((k * p, j * m), (p, m)).copy_from(&block.columns(p, m));
            }
        }
    }
    Ok((
        propagate(&psi_p, &psi_y, p, None),
        propagate(&psi_u, &psi_y, p, Some(m)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::white_excitation;

    #[test]
    fn scalar_recursion_unrolls_to_powers() {
        let (a, b) = (0.7, 0.3);
        let phi = Mat::from_row_slice(1, 2, &[a, b]);
        let cfg = HankelConfig::new(1, 6, 10).unwrap();
        let (h_p, h_u) = expand_single_arx(&phi, 1, 1, cfg).unwrap();
        for k in 0..6 {
            for j in 0..6 {
                let expected = if j < k { a.powi((k - j - 1) as i32) * b } else { 0.0 };
                assert!((h_u[(k, j)] - expected).abs() < 1e-15);
            }
            assert!((h_p[(k, 0)] - a.powi(k as i32 + 1)).abs() < 1e-15);
            assert!((h_p[(k, 1)] - a.powi(k as i32) * b).abs() < 1e-15);
        }
    }

    #[test]
    fn single_step_horizon_has_no_input_map() {
        let phi = Mat::from_fn(2, 12, |r, c| (r + c) as f64 * 0.01);
        let cfg = HankelConfig::new(3, 1, 10).unwrap();
        let (h_p, h_u) = expand_single_arx(&phi, 2, 2, cfg).unwrap();
        assert_eq!(h_p, phi);
        assert!(h_u.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn band_drops_oldest_blocks() {
        // no output feedback, so H_p is the band itself
        let mut phi = Mat::from_fn(1, 6, |_, c| (c + 1) as f64);
        for i in 0..3 {
            phi[(0, 2 * i)] = 0.0;
        }
        let cfg = HankelConfig::new(3, 3, 10).unwrap();
        let (h_p, _) = expand_single_arx(&phi, 1, 1, cfg).unwrap();
        assert_eq!(h_p.row(0), phi.row(0));
        assert!(h_p.row(1).columns(0, 2).iter().all(|&v| v == 0.0));
        assert_eq!(h_p.row(1).columns(2, 4), phi.row(0).columns(0, 4));
        assert!(h_p.row(2).columns(0, 4).iter().all(|&v| v == 0.0));
        assert_eq!(h_p.row(2).columns(4, 2), phi.row(0).columns(0, 2));
    }

    #[test]
    fn zero_output_gives_zero_phi() {
        let u = white_excitation(2, 150, 0.01, 0.1, 5).unwrap();
        let y = Trajectory::zeros(1, 150, 0.1).unwrap();
        let cfg = HankelConfig::new(4, 4, 150).unwrap();
        let arx = fit_single_arx(&u, &y, cfg).unwrap();
        assert!(arx.phi.iter().all(|&v| v == 0.0));
        assert!(arx.residual_std.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn recovers_known_arx_coefficients() {
        let n = 400;
        let u = white_excitation(1, n, 1.0, 5.0, 9).unwrap();
        let (a1, a2, b1, b2) = (0.5, -0.2, 1.0, 0.4);
        let mut y = vec![0.0; n];
        for t in 2..n {
            y[t] = a1 * y[t - 1] + a2 * y[t - 2] + b1 * u.get(0, t - 1) + b2 * u.get(0, t - 2);
        }
        let y = Trajectory::from_matrix(Mat::from_row_slice(1, n, &y), 0.1).unwrap();
        let cfg = HankelConfig::new(2, 3, n).unwrap();
        let arx = fit_single_arx(&u, &y, cfg).unwrap();
        // regressor blocks oldest first: [y(t-1), u(t-1), y(t), u(t)] for target y(t+1)
        let expected = [a2, b2, a1, b1];
        for (got, want) in arx.phi.iter().zip(expected) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }
}
