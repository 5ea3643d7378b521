//! Data-driven predictive control for power oscillation damping.
//!
//! The crate covers the full offline/online pipeline:
//!
//! * [`signals`]: trajectories, scaled Hankel matrices, the measurement
//!   band-pass, and excitation / load-noise generators.
//! * [`plant`]: a discrete modal surrogate of a weakly damped grid with
//!   disturbance scenarios and an input saturation.
//! * [`predictors`]: DeePC Hankel data, the LQ-based transient predictor and
//!   the fixed-length (single) ARX predictor.
//! * [`ocp`]: DeePC / TPC optimal control problems in QP and conic form,
//!   per-step refresh, closed-form unconstrained solutions.
//! * [`qpsolver`]: an ADMM QP solver with a cached factorization, warm
//!   starting and active-set polishing, plus a KKT certificate check.
//! * [`closed_loop`]: receding-horizon simulation, metrics and the doublet
//!   linearity test.
//!
//! Batch work (scenario sweeps, random problem sets) goes through [`par`],
//! which uses rayon when the `parallel` feature is enabled and falls back to
//! plain iteration otherwise.

// `!(x > 0.0)` is how the validators reject NaN along with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_loop;
pub mod error;
pub mod ocp;
pub mod par;
pub mod plant;
pub mod predictors;
pub mod qpsolver;
pub mod signals;

pub use error::{DpcError, Result};

/// Dense matrix type used throughout the crate.
pub type Mat = nalgebra::DMatrix<f64>;
/// Dense vector type used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
