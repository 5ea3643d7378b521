use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::buffer::PastBuffer;
use crate::ocp::{
    build_deepc_qp, build_tpc_qp, closed_form_deepc_gain, closed_form_tpc_gain, refresh_qp, OcpBounds, QpProblem,
    WeightSpec,
};
use crate::predictors::{DeePCData, MultiStepPredictor};
use crate::qpsolver::{setup, QpSolver, SolveStatus, SolverSettings};
use crate::{DpcError, Mat, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    #[serde(rename = "deepc")]
    DeePC,
    Tpc,
    SingleArx,
    ClosedFormTpc,
    #[serde(rename = "closed_form_deepc")]
    ClosedFormDeePC,
    Zero,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 6] = [
        ControllerKind::DeePC,
        ControllerKind::Tpc,
        ControllerKind::SingleArx,
        ControllerKind::ClosedFormTpc,
        ControllerKind::ClosedFormDeePC,
        ControllerKind::Zero,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ControllerKind::DeePC => "deepc",
            ControllerKind::Tpc => "tpc",
            ControllerKind::SingleArx => "single_arx",
            ControllerKind::ClosedFormTpc => "closed_form_tpc",
            ControllerKind::ClosedFormDeePC => "closed_form_deepc",
            ControllerKind::Zero => "zero",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| DpcError::Config(format!("unknown controller `{name}`")))
    }
}

impl std::fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    /// Buffer still filling; zero input.
    Bootstrap,
    Solved,
    /// Solver failed; previous input held.
    Held,
    /// Closed-form gain or zero controller; no iterations.
    Direct,
}

impl StepStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepStatus::Bootstrap => "bootstrap",
            StepStatus::Solved => "solved",
            StepStatus::Held => "held",
            StepStatus::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub u: Vector,
    pub solve_ms: f64,
    pub iterations: usize,
    pub status: StepStatus,
}

#[derive(Debug, Clone)]
enum Law {
    Qp { qp: Box<QpProblem>, solver: Box<QpSolver> },
    Gain(Mat),
    Zero,
}

/// One receding-horizon controller instance.
#[derive(Debug, Clone)]
pub struct Controller {
    kind: ControllerKind,
    law: Law,
    tau_p: usize,
    outputs: usize,
    inputs: usize,
    u_lb: Vector,
    u_ub: Vector,
    last_u: Vector,
    failures: usize,
}

impl Controller {
    fn with_law(kind: ControllerKind, law: Law, tau_p: usize, p: usize, b: &OcpBounds) -> Self {
        let m = b.inputs();
        Self {
            kind,
            law,
            tau_p,
            outputs: p,
            inputs: m,
            u_lb: b.u_lb.clone(),
            u_ub: b.u_ub.clone(),
            last_u: Vector::zeros(m),
            failures: 0,
        }
    }

    /// QP controller on an ARX-type predictor (`Tpc` or `SingleArx`).
    pub fn predictive(
        kind: ControllerKind,
        pred: &dyn MultiStepPredictor,
        w: &WeightSpec,
        b: &OcpBounds,
        settings: SolverSettings,
    ) -> Result<Self> {
        let tau_p = pred.config().tau_p;
        let p = pred.outputs();
        let law = match kind {
            ControllerKind::Tpc | ControllerKind::SingleArx => {
                let z0 = Vector::zeros((p + pred.inputs()) * tau_p);
                let qp = build_tpc_qp(pred, w, b, &z0)?;
                let solver = setup(&qp, settings)?;
                Law::Qp {
                    qp: Box::new(qp),
                    solver: Box::new(solver),
                }
            }
            ControllerKind::ClosedFormTpc => Law::Gain(closed_form_tpc_gain(pred, w)?),
            other => return Err(DpcError::Config(format!("{other} does not run on an ARX predictor"))),
        };
        Ok(Self::with_law(kind, law, tau_p, p, b))
    }

    /// DeePC with slack, or its soft-past closed form.
    pub fn deepc(
        kind: ControllerKind,
        data: &DeePCData,
        w: &WeightSpec,
        b: &OcpBounds,
        settings: SolverSettings,
    ) -> Result<Self> {
        let tau_p = data.config.tau_p;
        let law = match kind {
            ControllerKind::DeePC => {
                let z0 = Vector::zeros((data.outputs + data.inputs) * tau_p);
                let qp = build_deepc_qp(data, w, b, &z0)?;
                let solver = setup(&qp, settings)?;
                Law::Qp {
                    qp: Box::new(qp),
                    solver: Box::new(solver),
                }
            }
            ControllerKind::ClosedFormDeePC => Law::Gain(closed_form_deepc_gain(data, w)?),
            other => return Err(DpcError::Config(format!("{other} does not run on DeePC data"))),
        };
        Ok(Self::with_law(kind, law, tau_p, data.outputs, b))
    }

    pub fn zero(tau_p: usize, outputs: usize, inputs: usize) -> Self {
        let b = OcpBounds::symmetric_input(inputs, 0.0);
        Self::with_law(ControllerKind::Zero, Law::Zero, tau_p, outputs, &b)
    }

    pub fn kind(&self) -> ControllerKind {
        self.kind
    }

    pub fn tau_p(&self) -> usize {
        self.tau_p
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Solver failures so far (each one held the previous input).
    pub fn failures(&self) -> usize {
        self.failures
    }

    pub fn solver(&self) -> Option<&QpSolver> {
        match &self.law {
            Law::Qp { solver, .. } => Some(solver),
            _ => None,
        }
    }

    pub fn problem(&self) -> Option<&QpProblem> {
        match &self.law {
            Law::Qp { qp, .. } => Some(qp),
            _ => None,
        }
    }

    fn clip(&self, u: &Vector) -> Vector {
        u.zip_zip_map(&self.u_lb, &self.u_ub, |v, l, h| v.clamp(l, h))
    }

    /// Next input to commit given the current past. For QP laws `solve_ms`
    /// covers the solver call only, not the refresh.
    pub fn step(&mut self, buffer: &PastBuffer) -> Result<StepOutcome> {
        if matches!(self.law, Law::Zero) {
            return Ok(StepOutcome {
                u: Vector::zeros(self.inputs),
                solve_ms: 0.0,
                iterations: 0,
                status: StepStatus::Direct,
            });
        }
        if !buffer.is_full() {
            self.last_u = Vector::zeros(self.inputs);
            return Ok(StepOutcome {
                u: self.last_u.clone(),
                solve_ms: 0.0,
                iterations: 0,
                status: StepStatus::Bootstrap,
            });
        }
        let z_p = buffer.z_p();
        let start = Instant::now();
        let outcome = match &mut self.law {
            Law::Gain(k) => {
                if z_p.len() != k.ncols() {
                    return Err(DpcError::dim("controller past", k.ncols(), z_p.len()));
                }
                let plan = &*k * &z_p;
                let u = plan.rows(0, self.inputs).into_owned();
                (u, 0, StepStatus::Direct, start.elapsed())
            }
            Law::Qp { qp, solver } => {
                refresh_qp(qp, &z_p)?;
                solver.update_from_qp(qp)?;
                let sol = solver.solve();
                let t = sol.stats.solve_time;
                if sol.status == SolveStatus::Solved && sol.x.iter().all(|v| v.is_finite()) {
                    (qp.first_input(&sol.x), sol.stats.iterations, StepStatus::Solved, t)
                } else {
                    (self.last_u.clone(), sol.stats.iterations, StepStatus::Held, t)
                }
            }
            Law::Zero => unreachable!("handled above"),
        };
        let (u, iterations, status, elapsed) = outcome;
        let solve_ms = elapsed.as_secs_f64() * 1e3;
        if status == StepStatus::Held {
            self.failures += 1;
        }
        let u = self.clip(&u);
        self.last_u = u.clone();
        Ok(StepOutcome {
            u,
            solve_ms,
            iterations,
            status,
        })
    }
}
