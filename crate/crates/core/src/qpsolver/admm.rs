use std::time::{Duration, Instant};

use nalgebra::Cholesky;

use super::polish::{polish, PolishCache};
use super::scaling::{ruiz, Scaling};
use super::{Solution, SolveStats, SolveStatus, SolverSettings};
use crate::ocp::QpProblem;
use crate::{DpcError, Mat, Result, Vector};

const RHO_MIN: f64 = 1e-6;
const RHO_MAX: f64 = 1e6;
const RHO_EQ_FACTOR: f64 = 1e3;
/// Bounds beyond this magnitude are treated as absent.
const INF_BOUND: f64 = 1e20;

/// Cholesky factor kept as `L` and an explicit `Lᵀ`, so both triangular
/// solves run column-oriented.
#[derive(Debug, Clone)]
pub(crate) struct SpdFactor {
    l: Mat,
    lt: Mat,
}

impl SpdFactor {
    pub(crate) fn new(k: Mat) -> Option<Self> {
        let l = Cholesky::new(k)?.unpack();
        let lt = l.transpose();
        Some(Self { l, lt })
    }

    pub(crate) fn solve_mut(&self, b: &mut Vector) {
        self.l.solve_lower_triangular_mut(b);
        self.lt.solve_upper_triangular_mut(b);
    }

    fn values(&self) -> impl Iterator<Item = &f64> {
        self.l.iter()
    }
}

/// Constraint matrices sparser than this use the compressed products.
const SPARSE_DENSITY: f64 = 0.25;

/// Compressed-row copy of the scaled constraint matrix.
#[derive(Debug, Clone)]
struct Csr {
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn from_dense(m: &Mat) -> Self {
        let mut row_ptr = vec![0];
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            ncols: m.ncols(),
            row_ptr,
            cols,
            vals,
        }
    }

    fn mul(&self, x: &Vector) -> Vector {
        Vector::from_fn(self.row_ptr.len() - 1, |i, _| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| self.vals[k] * x[self.cols[k]])
                .sum()
        })
    }

    fn tr_mul(&self, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.ncols);
        for i in 0..self.row_ptr.len() - 1 {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[self.cols[k]] += self.vals[k] * y[i];
            }
        }
        out
    }
}

/// Order-sensitive FNV-style hash over the bit patterns of the values.
#[derive(Debug, Clone, Copy)]
struct BitHash(u64);

impl BitHash {
    fn new() -> Self {
        BitHash(0xcbf2_9ce4_8422_2325)
    }

    fn add(&mut self, v: u64) {
        self.0 = (self.0 ^ v).wrapping_mul(0x0000_0100_0000_01b3);
    }

    fn add_f64(&mut self, v: f64) {
        self.add(v.to_bits());
    }
}

/// Stacks a QP's constraints as `l ≤ M x ≤ u`: equalities, general rows,
/// then one identity row per variable with a finite box side.
pub fn stacked_constraints(qp: &QpProblem) -> (Mat, Vector, Vector) {
    let n = qp.n_dec();
    let boxed: Vec<usize> = (0..n)
        .filter(|&j| qp.x_lb[j].is_finite() || qp.x_ub[j].is_finite())
        .collect();
    let rows = qp.n_eq() + qp.n_ineq() + boxed.len();
    let mut m = Mat::zeros(rows, n);
    let mut l = Vector::zeros(rows);
    let mut u = Vector::zeros(rows);
    m.rows_mut(0, qp.n_eq()).copy_from(&qp.a_eq);
    l.rows_mut(0, qp.n_eq()).copy_from(&qp.b_eq);
    u.rows_mut(0, qp.n_eq()).copy_from(&qp.b_eq);
    let r0 = qp.n_eq();
    m.rows_mut(r0, qp.n_ineq()).copy_from(&qp.g);
    l.rows_mut(r0, qp.n_ineq()).copy_from(&qp.g_lb);
    u.rows_mut(r0, qp.n_ineq()).copy_from(&qp.g_ub);
    let r1 = r0 + qp.n_ineq();
    for (k, &j) in boxed.iter().enumerate() {
        m[(r1 + k, j)] = 1.0;
        l[r1 + k] = qp.x_lb[j];
        u[r1 + k] = qp.x_ub[j];
    }
    (m, l, u)
}

/// Solver workspace: scaled data, cached factorization and iterates.
#[derive(Debug, Clone)]
pub struct QpSolver {
    settings: SolverSettings,
    /// Scaled problem data.
    p: Mat,
    q: Vector,
    m: Mat,
    /// `Mᵀ`, for the column-oriented transposed product.
    mt: Mat,
    m_sparse: Option<Csr>,
    l: Vector,
    u: Vector,
    scaling: Scaling,
    rho: f64,
    rho_vec: Vector,
    factor: SpdFactor,
    x: Vector,
    z: Vector,
    y: Vector,
    factorizations: usize,
    /// Set once a solve has run long enough to reach a `ρ` check; trivial
    /// solves (a quiescent plant) leave `ρ` untuned.
    rho_tuned: bool,
    structure: u64,
    setup_time: Duration,
    pub(crate) polish_cache: Option<PolishCache>,
}

fn structure_hash(p: &Mat, m: &Mat) -> u64 {
    let mut h = BitHash::new();
    for d in [p.nrows(), p.ncols(), m.nrows(), m.ncols()] {
        h.add(d as u64);
    }
    for v in p.iter().chain(m.iter()) {
        h.add_f64(*v);
    }
    h.0
}

/// Same value as `structure_hash(&qp.p, &stacked_constraints(qp).0)`
/// without assembling the stacked matrix.
fn qp_structure_hash(qp: &QpProblem) -> u64 {
    let n = qp.n_dec();
    let boxed: Vec<usize> = (0..n)
        .filter(|&j| qp.x_lb[j].is_finite() || qp.x_ub[j].is_finite())
        .collect();
    let rows = qp.n_eq() + qp.n_ineq() + boxed.len();
    let mut h = BitHash::new();
    for d in [n, n, rows, n] {
        h.add(d as u64);
    }
    for v in qp.p.iter() {
        h.add_f64(*v);
    }
    for j in 0..n {
        for v in qp.a_eq.column(j).iter().chain(qp.g.column(j).iter()) {
            h.add_f64(*v);
        }
        for &b in &boxed {
            h.add_f64(if b == j { 1.0 } else { 0.0 });
        }
    }
    h.0
}

fn clip_bound(v: f64) -> f64 {
    v.clamp(-INF_BOUND, INF_BOUND)
}

pub fn setup(qp: &QpProblem, settings: SolverSettings) -> Result<QpSolver> {
    let (m, l, u) = stacked_constraints(qp);
    QpSolver::new(&qp.p, &qp.q, &m, &l, &u, settings)
}

impl QpSolver {
    /// Sets up `min ½ xᵀPx + qᵀx` s.t. `l ≤ M x ≤ u` directly.
    pub fn new(p: &Mat, q: &Vector, m: &Mat, l: &Vector, u: &Vector, settings: SolverSettings) -> Result<Self> {
        let start = Instant::now();
        settings.validate()?;
        let n = p.nrows();
        if p.ncols() != n || q.len() != n || m.ncols() != n {
            return Err(DpcError::dim("QP decision size", n, q.len()));
        }
        if l.len() != m.nrows() || u.len() != m.nrows() {
            return Err(DpcError::dim("QP constraint rows", m.nrows(), l.len()));
        }
        if l.iter().zip(u.iter()).any(|(a, b)| a > b) {
            return Err(DpcError::Setup("lower bound exceeds upper bound".into()));
        }
        let structure = structure_hash(p, m);
        let (mut ps, mut qs, mut ms) = (p.clone(), q.clone(), m.clone());
        let scaling = ruiz(&mut ps, &mut qs, &mut ms, settings.scaling_iters);
        let ls = l.zip_map(&scaling.e, |v, e| clip_bound(v) * e);
        let us = u.zip_map(&scaling.e, |v, e| clip_bound(v) * e);
        let rows = m.nrows();
        let nnz = ms.iter().filter(|v| **v != 0.0).count();
        let m_sparse = ((nnz as f64) <= SPARSE_DENSITY * (ms.len() as f64)).then(|| Csr::from_dense(&ms));
        let mut solver = Self {
            settings,
            p: ps,
            q: qs,
            mt: ms.transpose(),
            m: ms,
            m_sparse,
            l: ls,
            u: us,
            scaling,
            rho: settings.rho,
            rho_vec: Vector::zeros(rows),
            factor: SpdFactor::new(Mat::identity(1, 1)).expect("identity is positive definite"),
            x: Vector::zeros(n),
            z: Vector::zeros(rows),
            y: Vector::zeros(rows),
            factorizations: 0,
            rho_tuned: false,
            structure,
            setup_time: Duration::ZERO,
            polish_cache: None,
        };
        solver.refactor()?;
        solver.setup_time = start.elapsed();
        Ok(solver)
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn n_constraints(&self) -> usize {
        self.m.nrows()
    }

    /// Number of ADMM system factorizations since setup.
    pub fn factorizations(&self) -> usize {
        self.factorizations
    }

    pub fn polish_factorizations(&self) -> usize {
        self.polish_cache.as_ref().map_or(0, |c| c.factorizations)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn setup_time(&self) -> Duration {
        self.setup_time
    }

    /// Hash of the cached factor, for determinism checks.
    pub fn factorization_fingerprint(&self) -> u64 {
        let mut h = BitHash::new();
        for v in self.factor.values() {
            h.add_f64(*v);
        }
        h.0
    }

    fn m_mul(&self, x: &Vector) -> Vector {
        match &self.m_sparse {
            Some(csr) => csr.mul(x),
            None => &self.m * x,
        }
    }

    fn m_tr_mul(&self, y: &Vector) -> Vector {
        match &self.m_sparse {
            Some(csr) => csr.tr_mul(y),
            None => &self.mt * y,
        }
    }

    fn set_rho_vec(&mut self) {
        for i in 0..self.rho_vec.len() {
            let (l, u) = (self.l[i], self.u[i]);
            self.rho_vec[i] = if l <= -INF_BOUND * 0.5 && u >= INF_BOUND * 0.5 {
                RHO_MIN
            } else if (u - l).abs() < 1e-12 * (1.0 + l.abs()) {
                RHO_EQ_FACTOR * self.rho
            } else {
                self.rho
            };
        }
    }

    fn refactor(&mut self) -> Result<()> {
        self.set_rho_vec();
        let n = self.n();
        let mut k = self.p.clone();
        for i in 0..n {
            k[(i, i)] += self.settings.sigma;
        }
        let mut scaled_mt = self.mt.clone();
        for (i, mut col) in scaled_mt.column_iter_mut().enumerate() {
            col *= self.rho_vec[i];
        }
        k.gemm(1.0, &scaled_mt, &self.m, 1.0);
        let k = (&k + k.transpose()) * 0.5;
        self.factor = SpdFactor::new(k).ok_or_else(|| DpcError::Setup("KKT system is not positive definite".into()))?;
        self.factorizations += 1;
        Ok(())
    }

    fn check_structure(&self, q: &Vector, l: &Vector, u: &Vector) -> Result<()> {
        if q.len() != self.n() || l.len() != self.n_constraints() || u.len() != self.n_constraints() {
            return Err(DpcError::Contract(format!(
                "update dimensions ({}, {}, {}) differ from setup ({}, {})",
                q.len(),
                l.len(),
                u.len(),
                self.n(),
                self.n_constraints()
            )));
        }
        Ok(())
    }

    /// Replaces `q`, `l`, `u` without touching the factorization.
    pub fn update(&mut self, q: &Vector, l: &Vector, u: &Vector) -> Result<()> {
        self.check_structure(q, l, u)?;
        if l.iter().zip(u.iter()).any(|(a, b)| a > b) {
            return Err(DpcError::Contract("lower bound exceeds upper bound".into()));
        }
        let (d, e, c) = (&self.scaling.d, &self.scaling.e, self.scaling.c);
        self.q = q.zip_map(d, |v, d| c * d * v);
        self.l = l.zip_map(e, |v, e| clip_bound(v) * e);
        self.u = u.zip_map(e, |v, e| clip_bound(v) * e);
        Ok(())
    }

    pub fn update_and_resolve(&mut self, q: &Vector, l: &Vector, u: &Vector) -> Result<Solution> {
        self.update(q, l, u)?;
        Ok(self.solve())
    }

    /// Takes the refreshed vectors of a problem built with the same `P` and
    /// constraint matrices as at setup.
    pub fn update_from_qp(&mut self, qp: &QpProblem) -> Result<()> {
        if qp_structure_hash(qp) != self.structure {
            return Err(DpcError::Contract("P or constraint matrix changed since setup".into()));
        }
        let boxed: Vec<usize> = (0..qp.n_dec())
            .filter(|&j| qp.x_lb[j].is_finite() || qp.x_ub[j].is_finite())
            .collect();
        let stack = |eq: &Vector, g: &Vector, bx: &Vector| -> Vector {
            let v: Vec<f64> = eq
                .iter()
                .chain(g.iter())
                .copied()
                .chain(boxed.iter().map(|&j| bx[j]))
                .collect();
            Vector::from_vec(v)
        };
        let l = stack(&qp.b_eq, &qp.g_lb, &qp.x_lb);
        let u = stack(&qp.b_eq, &qp.g_ub, &qp.x_ub);
        self.update(&qp.q, &l, &u)
    }

    /// Zeroes the iterates so the next solve starts cold.
    pub fn reset_iterates(&mut self) {
        self.x.fill(0.0);
        self.z.fill(0.0);
        self.y.fill(0.0);
    }

    /// Sets a starting point in unscaled variables.
    pub fn warm_start(&mut self, x: &Vector, y: &Vector) -> Result<()> {
        if x.len() != self.n() || y.len() != self.n_constraints() {
            return Err(DpcError::Contract("warm start dimensions differ from setup".into()));
        }
        let (d, e, c) = (&self.scaling.d, &self.scaling.e, self.scaling.c);
        self.x = x.zip_map(d, |v, d| v / d);
        self.z = self
            .m_mul(&self.x)
            .zip_zip_map(&self.l, &self.u, |v, l, u| v.clamp(l, u));
        self.y = y.zip_map(e, |v, e| c * v / e);
        Ok(())
    }

    fn unscaled_x(&self, x: &Vector) -> Vector {
        x.component_mul(&self.scaling.d)
    }

    fn unscaled_y(&self, y: &Vector) -> Vector {
        y.component_mul(&self.scaling.e) / self.scaling.c
    }

    /// Unscaled residuals and their tolerances.
    fn residuals(&self, x: &Vector, mx: &Vector, z: &Vector, y: &Vector) -> (f64, f64, f64, f64) {
        let (d, e, c) = (&self.scaling.d, &self.scaling.e, self.scaling.c);
        let e_inv = e.map(|v| 1.0 / v);
        let prim = (mx - z).component_mul(&e_inv).amax();
        let mx_norm = mx.component_mul(&e_inv).amax();
        let z_norm = z.component_mul(&e_inv).amax();
        let d_inv = d.map(|v| 1.0 / (c * v));
        let px = (&self.p * x).component_mul(&d_inv);
        let mty = self.m_tr_mul(y).component_mul(&d_inv);
        let qn = self.q.component_mul(&d_inv);
        let dual = (&px + &mty + &qn).amax();
        let eps_p = self.settings.eps_abs + self.settings.eps_rel * mx_norm.max(z_norm);
        let eps_d = self.settings.eps_abs + self.settings.eps_rel * px.amax().max(mty.amax()).max(qn.amax());
        (prim, dual, eps_p, eps_d)
    }

    /// Scaled residual ratio used to rebalance `ρ`.
    fn rho_estimate(&self) -> f64 {
        let mx = self.m_mul(&self.x);
        let prim = (&mx - &self.z).amax() / mx.amax().max(self.z.amax()).max(1e-30);
        let px = &self.p * &self.x;
        let mty = self.m_tr_mul(&self.y);
        let dual = (&px + &mty + &self.q).amax() / px.amax().max(mty.amax()).max(self.q.amax()).max(1e-30);
        (self.rho * (prim / dual.max(1e-30)).sqrt()).clamp(RHO_MIN, RHO_MAX)
    }

    fn primal_infeasible(&self, dy: &Vector) -> bool {
        let norm = dy.amax();
        if norm <= 1e-30 {
            return false;
        }
        let eps = self.settings.eps_prim_inf * norm;
        let mut support = 0.0;
        for i in 0..dy.len() {
            let v = dy[i];
            if v > 0.0 {
                if self.u[i] >= INF_BOUND * 0.5 {
                    return false;
                }
                support += self.u[i] * v;
            } else if v < 0.0 {
                if self.l[i] <= -INF_BOUND * 0.5 {
                    return false;
                }
                support += self.l[i] * v;
            }
        }
        self.m_tr_mul(dy).amax() <= eps && support < -eps
    }

    /// Iterates from the current state until the residual tolerances hold.
    pub fn solve(&mut self) -> Solution {
        let start = Instant::now();
        if !self.settings.warm_start {
            self.reset_iterates();
        }
        let adapt = self.settings.adaptive_rho && (!self.rho_tuned || self.settings.adaptive_rho_on_update);
        let (sigma, alpha) = (self.settings.sigma, self.settings.alpha);
        let mut status = SolveStatus::MaxIterations;
        let mut iterations = self.settings.max_iter;
        let (mut prim, mut dual) = (f64::INFINITY, f64::INFINITY);
        let mut mx = self.m_mul(&self.x);
        for k in 1..=self.settings.max_iter {
            let y_prev = self.y.clone();

            let w = self.z.component_mul(&self.rho_vec) - &self.y;
            let mut rhs = &self.x * sigma - &self.q + self.m_tr_mul(&w);
            self.factor.solve_mut(&mut rhs);
            let x_tilde = rhs;
            let z_tilde = self.m_mul(&x_tilde);

            self.x = &x_tilde * alpha + &self.x * (1.0 - alpha);
            mx = &z_tilde * alpha + &mx * (1.0 - alpha);
            let z_relaxed = &z_tilde * alpha + &self.z * (1.0 - alpha);
            let y_over_rho = self.y.component_div(&self.rho_vec);
            self.z = (&z_relaxed + &y_over_rho).zip_zip_map(&self.l, &self.u, |v, l, u| v.clamp(l, u));
            self.y += (&z_relaxed - &self.z).component_mul(&self.rho_vec);

            let (p_res, d_res, eps_p, eps_d) = self.residuals(&self.x, &mx, &self.z, &self.y);
            prim = p_res;
            dual = d_res;
            if p_res <= eps_p && d_res <= eps_d {
                status = SolveStatus::Solved;
                iterations = k;
                break;
            }
            if self.primal_infeasible(&(&self.y - &y_prev)) {
                status = SolveStatus::PrimalInfeasible;
                iterations = k;
                break;
            }
            let stalled = self.settings.adaptive_rho && k >= self.settings.adaptive_rho_stall;
            if (adapt || stalled) && k % self.settings.adaptive_rho_interval == 0 {
                let new_rho = self.rho_estimate();
                let ratio = new_rho / self.rho;
                if ratio > self.settings.adaptive_rho_tolerance || ratio < 1.0 / self.settings.adaptive_rho_tolerance {
                    self.rho = new_rho;
                    if self.refactor().is_err() {
                        break;
                    }
                }
            }
        }
        self.rho_tuned |= iterations >= self.settings.adaptive_rho_interval;

        let mut x = self.unscaled_x(&self.x);
        let mut y = self.unscaled_y(&self.y);
        let mut polished = false;
        if status == SolveStatus::Solved && self.settings.polish {
            if let Some((xs, ys)) = polish(self) {
                let mxs = self.m_mul(&xs);
                let zs = mxs.zip_zip_map(&self.l, &self.u, |v, l, u| v.clamp(l, u));
                let (p_res, d_res, eps_p, eps_d) = self.residuals(&xs, &mxs, &zs, &ys);
                if p_res <= eps_p.max(prim) && d_res <= eps_d.max(dual) {
                    x = self.unscaled_x(&xs);
                    y = self.unscaled_y(&ys);
                    prim = p_res;
                    dual = d_res;
                    polished = true;
                }
            }
        }
        Solution {
            x,
            y,
            status,
            stats: SolveStats {
                iterations,
                setup_time: self.setup_time,
                solve_time: start.elapsed(),
                primal_res: prim,
                dual_res: dual,
                rho: self.rho,
                polished,
            },
        }
    }

    /// Solve from zero iterates, leaving the workspace warm afterwards.
    pub fn solve_cold(&mut self) -> Solution {
        self.reset_iterates();
        self.solve()
    }

    pub(crate) fn scaled(&self) -> (&Mat, &Vector, &Mat, &Vector, &Vector) {
        (&self.p, &self.q, &self.m, &self.l, &self.u)
    }

    pub(crate) fn iterates(&self) -> (&Vector, &Vector, &Vector) {
        (&self.x, &self.z, &self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(q: f64, lo: f64, hi: f64) -> QpSolver {
        QpSolver::new(
            &Mat::from_element(1, 1, 1.0),
            &Vector::from_element(1, q),
            &Mat::from_element(1, 1, 1.0),
            &Vector::from_element(1, lo),
            &Vector::from_element(1, hi),
            SolverSettings::default(),
        )
        .unwrap()
    }

    #[test]
    fn one_dimensional_interior_optimum() {
        let sol = scalar(-1.0, -10.0, 10.0).solve();
        assert_eq!(sol.status, SolveStatus::Solved);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn one_dimensional_active_bound() {
        let sol = scalar(-1.0, f64::NEG_INFINITY, 0.5).solve();
        assert_eq!(sol.status, SolveStatus::Solved);
        assert!((sol.x[0] - 0.5).abs() < 1e-9);
        assert!((sol.y[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn no_constraints_factorizes_p_only() {
        let p = Mat::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let q = Vector::from_vec(vec![1.0, -1.0]);
        let mut s = QpSolver::new(
            &p,
            &q,
            &Mat::zeros(0, 2),
            &Vector::zeros(0),
            &Vector::zeros(0),
            SolverSettings::default(),
        )
        .unwrap();
        let sol = s.solve();
        let exact = p.cholesky().unwrap().solve(&-q);
        assert!((sol.x - exact).amax() < 1e-9);
        assert_eq!(s.factorizations(), 1);
    }

    #[test]
    fn detects_infeasible_bounds() {
        // x ≥ 1 and x ≤ -1 through two separate rows
        let m = Mat::from_row_slice(2, 1, &[1.0, 1.0]);
        let l = Vector::from_vec(vec![1.0, f64::NEG_INFINITY]);
        let u = Vector::from_vec(vec![f64::INFINITY, -1.0]);
        let mut s = QpSolver::new(
            &Mat::from_element(1, 1, 1.0),
            &Vector::zeros(1),
            &m,
            &l,
            &u,
            SolverSettings::default(),
        )
        .unwrap();
        assert_eq!(s.solve().status, SolveStatus::PrimalInfeasible);
    }

    #[test]
    fn repeated_setup_is_deterministic() {
        let a = scalar(-1.0, -2.0, 3.0);
        let b = scalar(-1.0, -2.0, 3.0);
        assert_eq!(a.factorization_fingerprint(), b.factorization_fingerprint());
    }

    #[test]
    fn structure_hash_without_stacking() {
        let p = Mat::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let q = Vector::from_vec(vec![1.0, -1.0]);
        let qp = QpProblem::from_parts(
            p,
            q,
            Mat::from_row_slice(1, 2, &[1.0, 1.0]),
            Vector::from_vec(vec![0.5]),
            Mat::from_row_slice(1, 2, &[1.0, -2.0]),
            Vector::from_vec(vec![-1.0]),
            Vector::from_vec(vec![f64::INFINITY]),
            Vector::from_vec(vec![f64::NEG_INFINITY, 0.0]),
            Vector::from_vec(vec![f64::INFINITY, 3.0]),
        )
        .unwrap();
        let (m, _, _) = stacked_constraints(&qp);
        assert_eq!(m.nrows(), 3);
        assert_eq!(qp_structure_hash(&qp), structure_hash(&qp.p, &m));
    }

    #[test]
    fn unchanged_data_resolves_immediately() {
        let mut s = scalar(-1.0, -10.0, 0.5);
        let first = s.solve();
        let again = s
            .update_and_resolve(
                &Vector::from_element(1, -1.0),
                &Vector::from_element(1, -10.0),
                &Vector::from_element(1, 0.5),
            )
            .unwrap();
        assert!(again.stats.iterations <= 2, "{} iterations", again.stats.iterations);
        assert!((again.x[0] - first.x[0]).abs() < 1e-9);
        assert!(s
            .update(&Vector::zeros(2), &Vector::zeros(1), &Vector::zeros(1))
            .is_err());
    }
}
