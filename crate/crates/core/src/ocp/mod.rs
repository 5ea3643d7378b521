//! Optimal control problem assembly for DeePC and the ARX-type predictors.
//!
//! Every problem is a convex QP `min ½ xᵀPx + qᵀx` subject to
//! `A_eq x = b_eq`, `g_lb ≤ G x ≤ g_ub` and `x_lb ≤ x ≤ x_ub`. Infinite
//! bounds mean "no constraint". Past data is always passed interleaved,
//! `z_p = [y; u]` per step, oldest first.

mod closed_form;
mod conic;
mod problem;
mod weights;

pub use closed_form::{closed_form_deepc, closed_form_deepc_gain, closed_form_tpc, closed_form_tpc_gain};
pub use conic::{to_conic, ConeProblem, ConeTag};
pub use problem::{
    build_deepc_qp, build_modified_deepc_qp, build_tpc_qp, refresh_qp, split_past, Formulation, QpProblem,
};
pub use weights::{OcpBounds, WeightSpec};
