//! Dense ADMM solver for the control QPs, in the operator-splitting form
//! `min ½ xᵀPx + qᵀx` s.t. `l ≤ M x ≤ u`.
//!
//! The linear system of each iteration is reduced to
//! `(P + σI + Mᵀ diag(ρ) M) x = rhs` and factorized once by Cholesky. The
//! factor is reused by every later solve until `ρ` changes. Warm starts
//! keep the previous primal and dual iterates.

mod admm;
mod kkt;
mod polish;
mod scaling;

pub use admm::{setup, stacked_constraints, QpSolver};
pub use kkt::{kkt_oracle_check, KktReport};

use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub rho: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub eps_prim_inf: f64,
    pub max_iter: usize,
    pub warm_start: bool,
    /// Rebalance `ρ` from the residual ratio until one solve has run past
    /// the first check interval. Each change costs one refactorization.
    pub adaptive_rho: bool,
    /// Also rebalance during warm-started re-solves.
    pub adaptive_rho_on_update: bool,
    /// A re-solve still running after this many iterations rebalances `ρ`
    /// regardless, so a `ρ` picked on unrepresentative data cannot stall.
    pub adaptive_rho_stall: usize,
    pub adaptive_rho_interval: usize,
    pub adaptive_rho_tolerance: f64,
    pub scaling_iters: usize,
    pub polish: bool,
    pub polish_delta: f64,
    pub polish_refine_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            rho: 0.1,
            sigma: 1e-6,
            alpha: 1.6,
            eps_abs: 1e-6,
            eps_rel: 1e-4,
            eps_prim_inf: 1e-5,
            max_iter: 4000,
            warm_start: true,
            adaptive_rho: true,
            adaptive_rho_on_update: false,
            adaptive_rho_stall: 200,
            adaptive_rho_interval: 25,
            adaptive_rho_tolerance: 5.0,
            scaling_iters: 10,
            polish: true,
            polish_delta: 1e-6,
            polish_refine_iter: 4,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> crate::Result<()> {
        let positive = [self.rho, self.sigma, self.eps_abs, self.polish_delta];
        if positive.iter().any(|v| !(*v > 0.0)) || self.eps_rel < 0.0 || self.max_iter == 0 {
            return Err(crate::DpcError::Config("solver settings must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(crate::DpcError::Config(format!(
                "alpha must lie in (0, 2), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    MaxIterations,
    PrimalInfeasible,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Solved => "solved",
            SolveStatus::MaxIterations => "max_iter",
            SolveStatus::PrimalInfeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub setup_time: Duration,
    pub solve_time: Duration,
    pub primal_res: f64,
    pub dual_res: f64,
    pub rho: f64,
    pub polished: bool,
}

impl SolveStats {
    pub fn setup_ms(&self) -> f64 {
        self.setup_time.as_secs_f64() * 1e3
    }

    pub fn solve_ms(&self) -> f64 {
        self.solve_time.as_secs_f64() * 1e3
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: crate::Vector,
    /// Multipliers of `l ≤ M x ≤ u`; negative on active lower bounds.
    pub y: crate::Vector,
    pub status: SolveStatus,
    pub stats: SolveStats,
}
