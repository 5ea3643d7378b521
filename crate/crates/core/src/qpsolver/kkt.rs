use crate::ocp::QpProblem;
use crate::{Mat, Vector};

use super::admm::stacked_constraints;

/// Residuals of the first-order optimality conditions at a candidate point.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    /// `‖Px + q + Mᵀλ‖∞` with the best sign-feasible multipliers.
    pub stationarity: f64,
    /// Largest bound violation of `M x`.
    pub primal: f64,
    /// Largest `|λ_i| · slack_i`.
    pub complementarity: f64,
    pub multipliers: Vector,
    pub passed: bool,
}

/// Certifies optimality of `x` without trusting any solver output.
///
/// Rows within `tol` of a bound are treated as active; their multipliers
/// come from a sign-constrained least-squares fit of the stationarity
/// condition (Lawson–Hanson on the signed, split columns).
pub fn kkt_oracle_check(qp: &QpProblem, x: &Vector, tol: f64) -> KktReport {
    let (m, l, u) = stacked_constraints(qp);
    let mx = &m * x;
    let grad = &qp.p * x + &qp.q;
    let mut primal: f64 = 0.0;
    for i in 0..mx.len() {
        primal = primal.max(l[i] - mx[i]).max(mx[i] - u[i]);
    }

    // candidate columns: (row, sign) with λ_row = sign · μ, μ ≥ 0
    let mut cols: Vec<(usize, f64)> = Vec::new();
    for i in 0..mx.len() {
        let near_l = l[i].is_finite() && (mx[i] - l[i]).abs() <= tol * (1.0 + l[i].abs());
        let near_u = u[i].is_finite() && (u[i] - mx[i]).abs() <= tol * (1.0 + u[i].abs());
        if near_l {
            cols.push((i, -1.0));
        }
        if near_u {
            cols.push((i, 1.0));
        }
    }
    let a = Mat::from_fn(x.len(), cols.len(), |r, c| cols[c].1 * m[(cols[c].0, r)]);
    let mu = nnls(&a, &(-&grad));
    let mut lambda = Vector::zeros(mx.len());
    for (k, &(i, s)) in cols.iter().enumerate() {
        lambda[i] += s * mu[k];
    }
    let stationarity = (&grad + m.tr_mul(&lambda)).amax();
    let mut complementarity: f64 = 0.0;
    for i in 0..mx.len() {
        if lambda[i] > 0.0 {
            complementarity = complementarity.max(lambda[i] * (u[i] - mx[i]).abs());
        } else if lambda[i] < 0.0 {
            complementarity = complementarity.max(-lambda[i] * (mx[i] - l[i]).abs());
        }
    }
    let passed = stationarity <= tol && primal <= tol && complementarity <= tol;
    KktReport {
        stationarity,
        primal,
        complementarity,
        multipliers: lambda,
        passed,
    }
}

/// Lawson–Hanson nonnegative least squares `min ‖A μ − b‖, μ ≥ 0`.
pub(crate) fn nnls(a: &Mat, b: &Vector) -> Vector {
    let n = a.ncols();
    let mut mu = Vector::zeros(n);
    if n == 0 {
        return mu;
    }
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.amax().max(1.0) * b.amax().max(1.0);
    for _ in 0..3 * n + 10 {
        let w = a.tr_mul(&(b - a * &mu));
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let ap = Mat::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
            let s_p = match ap.clone().svd(true, true).solve(b, 1e-14 * ap.amax().max(1e-300)) {
                Ok(s) => s,
                Err(_) => return mu,
            };
            if s_p.iter().all(|&v| v > 0.0) {
                mu.fill(0.0);
                for (c, &k) in idx.iter().enumerate() {
                    mu[k] = s_p[c];
                }
                break;
            }
            let mut step = f64::INFINITY;
            for (c, &k) in idx.iter().enumerate() {
                if s_p[c] <= 0.0 {
                    step = step.min(mu[k] / (mu[k] - s_p[c]));
                }
            }
            for (c, &k) in idx.iter().enumerate() {
                mu[k] += step * (s_p[c] - mu[k]);
                if mu[k] <= 1e-15 {
                    mu[k] = 0.0;
                    passive[k] = false;
                }
            }
        }
    }
    mu
}
