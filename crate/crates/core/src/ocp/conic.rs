use super::problem::QpProblem;
use crate::{Mat, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeTag {
    Zero,
    Nonneg,
}

/// `min ½ xᵀPx + qᵀx` s.t. `A x + s = b`, `s ∈ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeProblem {
    pub p: Mat,
    pub q: Vector,
    pub a: Mat,
    pub b: Vector,
    pub cones: Vec<ConeTag>,
}

impl ConeProblem {
    pub fn zero_rows(&self) -> usize {
        self.cones.iter().filter(|c| **c == ConeTag::Zero).count()
    }
}

/// Equalities become zero-cone rows; every finite upper bound becomes a
/// row `(M, ub)` and every finite lower bound a row `(−M, −lb)`. Upper
/// rows (box, then general) precede lower rows in the same order.
pub fn to_conic(qp: &QpProblem) -> ConeProblem {
    let n = qp.n_dec();
    let mut rows: Vec<(Vec<f64>, f64, ConeTag)> = Vec::new();
    for i in 0..qp.n_eq() {
        rows.push((qp.a_eq.row(i).iter().copied().collect(), qp.b_eq[i], ConeTag::Zero));
    }
    let unit = |j: usize, sign: f64| {
        let mut r = vec![0.0; n];
        r[j] = sign;
        r
    };
    for sign in [1.0, -1.0] {
        for j in 0..n {
            let bound = if sign > 0.0 { qp.x_ub[j] } else { qp.x_lb[j] };
            if bound.is_finite() {
                rows.push((unit(j, sign), sign * bound, ConeTag::Nonneg));
            }
        }
        for i in 0..qp.n_ineq() {
            let bound = if sign > 0.0 { qp.g_ub[i] } else { qp.g_lb[i] };
            if bound.is_finite() {
                rows.push((
                    qp.g.row(i).iter().map(|v| sign * v).collect(),
                    sign * bound,
                    ConeTag::Nonneg,
                ));
            }
        }
    }
    let a = Mat::from_fn(rows.len(), n, |r, c| rows[r].0[c]);
    let b = Vector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    ConeProblem {
        p: qp.p.clone(),
        q: qp.q.clone(),
        a,
        b,
        cones: rows.into_iter().map(|r| r.2).collect(),
    }
}
