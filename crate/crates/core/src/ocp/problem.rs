use super::weights::{OcpBounds, WeightSpec};
use crate::predictors::{DeePCData, MultiStepPredictor};
use crate::{DpcError, Mat, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Condensed ARX-type problem in the stacked inputs.
    Tpc,
    /// `x = [g; σ]` with hard past equalities on `U_p` and slack on `Y_p`.
    DeePC,
    /// `x = g`, the past matched through the soft `λ_σ` penalty only.
    ModifiedDeePC,
    /// Assembled directly from matrices; has no past to refresh.
    Generic,
}

/// Data that changes from step to step, and how it enters the problem.
#[derive(Debug, Clone, PartialEq)]
enum RefreshMap {
    /// `q = F z_p`; output bound offsets `−H_p z_p` when outputs are bounded.
    Tpc {
        f: Mat,
        h_p: Option<Mat>,
    },
    /// `b_eq = [u_p; y_p]`.
    DeePC,
    /// `q = −λ_σ Z_pᵀ [u_p; y_p]`.
    ModifiedDeePC {
        f: Mat,
    },
    None,
}

/// Assembled QP with enough structure to refresh it per step.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub formulation: Formulation,
    pub p: Mat,
    pub q: Vector,
    pub a_eq: Mat,
    pub b_eq: Vector,
    pub g: Mat,
    pub g_lb: Vector,
    pub g_ub: Vector,
    pub x_lb: Vector,
    pub x_ub: Vector,
    pub outputs: usize,
    pub inputs: usize,
    pub tau_p: usize,
    pub tau_f: usize,
    /// Stacked planned inputs as a linear function of `x`.
    input_map: Mat,
    refresh: RefreshMap,
    /// Constant parts of `g_lb`/`g_ub` before the past-dependent offset.
    g_lb_base: Vector,
    g_ub_base: Vector,
}

impl QpProblem {
    /// A QP with equality rows, two-sided general rows and a box.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        p: Mat,
        q: Vector,
        a_eq: Mat,
        b_eq: Vector,
        g: Mat,
        g_lb: Vector,
        g_ub: Vector,
        x_lb: Vector,
        x_ub: Vector,
    ) -> Result<Self> {
        let n = p.nrows();
        if p.ncols() != n || q.len() != n || a_eq.ncols() != n || g.ncols() != n || x_lb.len() != n || x_ub.len() != n {
            return Err(DpcError::dim("QP decision size", n, q.len()));
        }
        if a_eq.nrows() != b_eq.len() || g.nrows() != g_lb.len() || g.nrows() != g_ub.len() {
            return Err(DpcError::dim("QP constraint rows", g.nrows(), g_lb.len()));
        }
        Ok(Self {
            formulation: Formulation::Generic,
            p,
            q,
            a_eq,
            b_eq,
            g,
            g_lb: g_lb.clone(),
            g_ub: g_ub.clone(),
            x_lb,
            x_ub,
            outputs: 0,
            inputs: 0,
            tau_p: 0,
            tau_f: 0,
            input_map: Mat::identity(n, n),
            refresh: RefreshMap::None,
            g_lb_base: g_lb,
            g_ub_base: g_ub,
        })
    }

    /// Unconstrained-by-default QP `½ xᵀPx + qᵀx` with an infinite box.
    pub fn unconstrained(p: Mat, q: Vector) -> Result<Self> {
        let n = p.nrows();
        Self::from_parts(
            p,
            q,
            Mat::zeros(0, n),
            Vector::zeros(0),
            Mat::zeros(0, n),
            Vector::zeros(0),
            Vector::zeros(0),
            Vector::from_element(n, f64::NEG_INFINITY),
            Vector::from_element(n, f64::INFINITY),
        )
    }

    pub fn n_dec(&self) -> usize {
        self.p.nrows()
    }

    pub fn n_eq(&self) -> usize {
        self.a_eq.nrows()
    }

    pub fn n_ineq(&self) -> usize {
        self.g.nrows()
    }

    pub fn past_len(&self) -> usize {
        (self.outputs + self.inputs) * self.tau_p
    }

    pub fn input_map(&self) -> &Mat {
        &self.input_map
    }

    /// Stacked planned inputs `u(0..tau_f)` from a decision vector.
    pub fn inputs_of(&self, x: &Vector) -> Vector {
        &self.input_map * x
    }

    /// First planned input, the one that is applied.
    pub fn first_input(&self, x: &Vector) -> Vector {
        self.input_map.rows(0, self.inputs) * x
    }

    /// `(g, σ)` for DeePC problems.
    pub fn deepc_parts(&self, x: &Vector) -> Option<(Vector, Vector)> {
        let n_g = self.input_map.ncols() - self.sigma_len();
        match self.formulation {
            Formulation::Tpc | Formulation::Generic => None,
            _ => Some((x.rows(0, n_g).into_owned(), x.rows(n_g, self.sigma_len()).into_owned())),
        }
    }

    fn sigma_len(&self) -> usize {
        match self.formulation {
            Formulation::DeePC => self.outputs * self.tau_p,
            _ => 0,
        }
    }

    /// `½ xᵀPx + qᵀx`.
    pub fn objective(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.p * x)) + self.q.dot(x)
    }
}

/// Splits interleaved `z_p` into stacked `(u_p, y_p)`.
pub fn split_past(z_p: &Vector, p: usize, m: usize) -> (Vector, Vector) {
    let c = p + m;
    let tau_p = z_p.len() / c;
    let mut u_p = Vector::zeros(m * tau_p);
    let mut y_p = Vector::zeros(p * tau_p);
    for s in 0..tau_p {
        y_p.rows_mut(s * p, p).copy_from(&z_p.rows(s * c, p));
        u_p.rows_mut(s * m, m).copy_from(&z_p.rows(s * c + p, m));
    }
    (u_p, y_p)
}

fn symmetrize(p: Mat) -> Mat {
    (&p + p.transpose()) * 0.5
}

fn check_past(qp_past: usize, z_p: &Vector) -> Result<()> {
    if z_p.len() != qp_past {
        return Err(DpcError::Contract(format!(
            "past vector has length {}, problem was built for {qp_past}",
            z_p.len()
        )));
    }
    Ok(())
}

/// Condensed problem in `u`: `P = H_uᵀQH_u + R`, `q = H_uᵀQH_p z_p`.
pub fn build_tpc_qp(pred: &dyn MultiStepPredictor, w: &WeightSpec, b: &OcpBounds, z_p: &Vector) -> Result<QpProblem> {
    w.validate()?;
    let (p, m) = (pred.outputs(), pred.inputs());
    let cfg = pred.config();
    let (tau_p, tau_f) = (cfg.tau_p, cfg.tau_f);
    if w.outputs() != p || w.inputs() != m {
        return Err(DpcError::dim("weight channels", p + m, w.outputs() + w.inputs()));
    }
    b.validate(p, m)?;
    let (h_p, h_u) = (pred.h_p(), pred.h_u());
    let q_full = w.q_full(tau_f);
    let hu_t_q = h_u.transpose() * &q_full;
    let p_mat = symmetrize(&hu_t_q * h_u + w.r_full(tau_f));
    let f = &hu_t_q * h_p;
    let n = m * tau_f;

    let (x_lb, x_ub) = b.u_stacked(tau_f);
    let (g, g_lb_base, g_ub_base, bounded_h_p) = if b.has_output_bounds() {
        let (lo, hi) = b.y_stacked(p, tau_f);
        (h_u.clone(), lo, hi, Some(h_p.clone()))
    } else {
        (Mat::zeros(0, n), Vector::zeros(0), Vector::zeros(0), None)
    };
    let mut qp = QpProblem {
        formulation: Formulation::Tpc,
        p: p_mat,
        q: Vector::zeros(n),
        a_eq: Mat::zeros(0, n),
        b_eq: Vector::zeros(0),
        g,
        g_lb: g_lb_base.clone(),
        g_ub: g_ub_base.clone(),
        x_lb,
        x_ub,
        outputs: p,
        inputs: m,
        tau_p,
        tau_f,
        input_map: Mat::identity(n, n),
        refresh: RefreshMap::Tpc { f, h_p: bounded_h_p },
        g_lb_base,
        g_ub_base,
    };
    refresh_qp(&mut qp, z_p)?;
    Ok(qp)
}

fn deepc_cost(data: &DeePCData, w: &WeightSpec) -> Result<Mat> {
    w.validate()?;
    if w.outputs() != data.outputs || w.inputs() != data.inputs {
        return Err(DpcError::dim(
            "weight channels",
            data.outputs + data.inputs,
            w.outputs() + w.inputs(),
        ));
    }
    let tau_f = data.config.tau_f;
    let mut h = data.y_f.transpose() * w.q_full(tau_f) * &data.y_f + data.u_f.transpose() * w.r_full(tau_f) * &data.u_f;
    for i in 0..h.nrows() {
        h[(i, i)] += w.lambda_g2;
    }
    Ok(h)
}

/// Inequality rows `[U_f; Y_f] g` (outputs only when bounded), padded with
/// `pad` zero columns.
fn deepc_inequalities(data: &DeePCData, b: &OcpBounds, pad: usize) -> (Mat, Vector, Vector) {
    let (p, m) = (data.outputs, data.inputs);
    let tau_f = data.config.tau_f;
    let n_col = data.n_col();
    let (ulo, uhi) = b.u_stacked(tau_f);
    let y_rows = if b.has_output_bounds() { p * tau_f } else { 0 };
    let mut g = Mat::zeros(m * tau_f + y_rows, n_col + pad);
    g.view_mut((0, 0), (m * tau_f, n_col)).copy_from(&data.u_f);
    let mut lo = ulo.as_slice().to_vec();
    let mut hi = uhi.as_slice().to_vec();
    if y_rows > 0 {
        g.view_mut((m * tau_f, 0), (y_rows, n_col)).copy_from(&data.y_f);
        let (ylo, yhi) = b.y_stacked(p, tau_f);
        lo.extend(ylo.iter());
        hi.extend(yhi.iter());
    }
    (g, Vector::from_vec(lo), Vector::from_vec(hi))
}

/// `x = [g; σ]`, `P = blockdiag(Y_fᵀQY_f + U_fᵀRU_f + λ_g2 I, λ_σ I)`, `q = 0`,
/// `[U_p 0; Y_p −I] x = [u_p; y_p]`.
pub fn build_deepc_qp(data: &DeePCData, w: &WeightSpec, b: &OcpBounds, z_p: &Vector) -> Result<QpProblem> {
    let h = deepc_cost(data, w)?;
    let (p, m) = (data.outputs, data.inputs);
    b.validate(p, m)?;
    let (tau_p, tau_f) = (data.config.tau_p, data.config.tau_f);
    let n_col = data.n_col();
    let n_sigma = p * tau_p;
    let n = n_col + n_sigma;

    let mut p_mat = Mat::zeros(n, n);
    p_mat.view_mut((0, 0), (n_col, n_col)).copy_from(&symmetrize(h));
    for i in n_col..n {
        p_mat[(i, i)] = w.lambda_sigma;
    }
    let mut a_eq = Mat::zeros((m + p) * tau_p, n);
    a_eq.view_mut((0, 0), (m * tau_p, n_col)).copy_from(&data.u_p);
    a_eq.view_mut((m * tau_p, 0), (n_sigma, n_col)).copy_from(&data.y_p);
    for i in 0..n_sigma {
        a_eq[(m * tau_p + i, n_col + i)] = -1.0;
    }
    let (g, g_lb, g_ub) = deepc_inequalities(data, b, n_sigma);
    let mut input_map = Mat::zeros(m * tau_f, n);
    input_map.view_mut((0, 0), (m * tau_f, n_col)).copy_from(&data.u_f);

    let mut qp = QpProblem {
        formulation: Formulation::DeePC,
        p: p_mat,
        q: Vector::zeros(n),
        a_eq,
        b_eq: Vector::zeros((m + p) * tau_p),
        g,
        g_lb: g_lb.clone(),
        g_ub: g_ub.clone(),
        x_lb: Vector::from_element(n, f64::NEG_INFINITY),
        x_ub: Vector::from_element(n, f64::INFINITY),
        outputs: p,
        inputs: m,
        tau_p,
        tau_f,
        input_map,
        refresh: RefreshMap::DeePC,
        g_lb_base: g_lb,
        g_ub_base: g_ub,
    };
    refresh_qp(&mut qp, z_p)?;
    Ok(qp)
}

/// `x = g` with the past enforced softly:
/// `P = Y_fᵀQY_f + U_fᵀRU_f + λ_g2 I + λ_σ Z_pᵀZ_p`, `q = −λ_σ Z_pᵀ z_p`.
pub fn build_modified_deepc_qp(data: &DeePCData, w: &WeightSpec, b: &OcpBounds, z_p: &Vector) -> Result<QpProblem> {
    let h = deepc_cost(data, w)?;
    let (p, m) = (data.outputs, data.inputs);
    b.validate(p, m)?;
    let (tau_p, tau_f) = (data.config.tau_p, data.config.tau_f);
    let n = data.n_col();
    let zp_mat = data.z_p();
    let p_mat = symmetrize(h + w.lambda_sigma * zp_mat.transpose() * &zp_mat);
    let f = -w.lambda_sigma * zp_mat.transpose();
    let (g, g_lb, g_ub) = deepc_inequalities(data, b, 0);
    let mut qp = QpProblem {
        formulation: Formulation::ModifiedDeePC,
        p: p_mat,
        q: Vector::zeros(n),
        a_eq: Mat::zeros(0, n),
        b_eq: Vector::zeros(0),
        g,
        g_lb: g_lb.clone(),
        g_ub: g_ub.clone(),
        x_lb: Vector::from_element(n, f64::NEG_INFINITY),
        x_ub: Vector::from_element(n, f64::INFINITY),
        outputs: p,
        inputs: m,
        tau_p,
        tau_f,
        input_map: data.u_f.clone(),
        refresh: RefreshMap::ModifiedDeePC { f },
        g_lb_base: g_lb,
        g_ub_base: g_ub,
    };
    refresh_qp(&mut qp, z_p)?;
    Ok(qp)
}

/// Writes the past-dependent vectors for a new interleaved `z_p`.
///
/// Only `q`, `b_eq` and the inequality bounds change; `P`, `A_eq` and `G`
/// are never touched, so a cached factorization stays valid.
pub fn refresh_qp(qp: &mut QpProblem, z_p: &Vector) -> Result<()> {
    check_past(qp.past_len(), z_p)?;
    let (p, m) = (qp.outputs, qp.inputs);
    match &qp.refresh {
        RefreshMap::Tpc { f, h_p } => {
            qp.q = f * z_p;
            if let Some(h_p) = h_p {
                let offset = h_p * z_p;
                qp.g_lb = &qp.g_lb_base - &offset;
                qp.g_ub = &qp.g_ub_base - &offset;
            }
        }
        RefreshMap::DeePC => {
            let (u_p, y_p) = split_past(z_p, p, m);
            qp.b_eq.rows_mut(0, u_p.len()).copy_from(&u_p);
            qp.b_eq.rows_mut(u_p.len(), y_p.len()).copy_from(&y_p);
        }
        RefreshMap::ModifiedDeePC { f } => {
            let (u_p, y_p) = split_past(z_p, p, m);
            let stacked = Vector::from_iterator(u_p.len() + y_p.len(), u_p.iter().chain(y_p.iter()).copied());
            qp.q = f * stacked;
        }
        RefreshMap::None => {
            return Err(DpcError::Contract("problem has no past-dependent data".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictors::{build_deepc_data, fit_transient_predictor};
    use crate::signals::{white_excitation, HankelConfig};

    fn small_data() -> (crate::signals::Trajectory, crate::signals::Trajectory) {
        let u = white_excitation(3, 200, 0.01, 0.1, 21).unwrap();
        let y = white_excitation(3, 200, 0.01, 0.1, 22).unwrap();
        (u, y)
    }

    #[test]
    fn split_past_orders_inputs_first() {
        let z = Vector::from_vec(vec![1.0, 2.0, 9.0, 3.0, 4.0, 8.0]);
        let (u, y) = split_past(&z, 2, 1);
        assert_eq!(u.as_slice(), &[9.0, 8.0]);
        assert_eq!(y.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn tpc_refresh_touches_q_only() {
        let (u, y) = small_data();
        let cfg = HankelConfig::new(4, 5, 200).unwrap();
        let tpc = fit_transient_predictor(&u, &y, cfg).unwrap();
        let b = OcpBounds::symmetric_input(3, 0.1);
        let z0 = Vector::from_fn(24, |i, _| (i as f64 * 0.3).sin() * 0.01);
        let mut qp = build_tpc_qp(&tpc, &WeightSpec::tpc_default(), &b, &z0).unwrap();
        assert_eq!(qp.n_dec(), 15);
        assert_eq!(qp.n_ineq(), 0);
        let before = qp.clone();
        refresh_qp(&mut qp, &z0).unwrap();
        assert_eq!(qp, before);
        refresh_qp(&mut qp, &(z0 * 2.0)).unwrap();
        assert_ne!(qp.q, before.q);
        let mut same = qp.clone();
        same.q = before.q.clone();
        assert_eq!(same, before);
        assert!(refresh_qp(&mut qp, &Vector::zeros(23)).is_err());
    }

    #[test]
    fn deepc_refresh_touches_b_eq_only() {
        let (u, y) = small_data();
        let cfg = HankelConfig::new(4, 5, 150).unwrap();
        let data = build_deepc_data(&u, &y, cfg).unwrap();
        let b = OcpBounds::symmetric_input(3, 0.1);
        let z0 = Vector::from_fn(24, |i, _| i as f64);
        let mut qp = build_deepc_qp(&data, &WeightSpec::deepc_default(), &b, &z0).unwrap();
        assert_eq!(qp.n_dec(), cfg.n_col() + 12);
        assert!(qp.q.iter().all(|&v| v == 0.0));
        // inputs first, then outputs
        assert_eq!(qp.b_eq[0], 3.0);
        assert_eq!(qp.b_eq[12], 0.0);
        let before = qp.clone();
        refresh_qp(&mut qp, &(z0 * -1.0)).unwrap();
        let mut same = qp.clone();
        same.b_eq = before.b_eq.clone();
        assert_eq!(same, before);
    }

    #[test]
    fn output_bounds_become_h_u_rows() {
        let (u, y) = small_data();
        let cfg = HankelConfig::new(3, 4, 200).unwrap();
        let tpc = fit_transient_predictor(&u, &y, cfg).unwrap();
        let mut b = OcpBounds::symmetric_input(3, 0.1);
        b.y_ub = Some(Vector::from_element(3, 0.5));
        let z = Vector::from_element(18, 0.01);
        let qp = build_tpc_qp(&tpc, &WeightSpec::tpc_default(), &b, &z).unwrap();
        assert_eq!(qp.g, tpc.h_u);
        let expected = Vector::from_element(12, 0.5) - &tpc.h_p * &z;
        assert!((qp.g_ub.clone() - expected).amax() < 1e-15);
        assert!(qp.g_lb.iter().all(|v| *v == f64::NEG_INFINITY));
    }
}
