//! Receding-horizon closed loop: plant, measurement filter, controller and
//! solver wired together, plus episode metrics and the superposition test.
//!
//! Timing: at step `t` the output `y(t)` is measured and filtered, then
//! `(y_f(t), u(t))` enters the past buffer, where `u(t)` is the input
//! already committed for the interval `[t, t+1)`. The controller plans
//! `u(t+1), …, u(t+tau_f)` and commits the first of them.

mod batch;
mod buffer;
mod controller;
mod episode;
mod linearity;
mod training;

pub use batch::{run_batch, BatchJob};
pub use buffer::PastBuffer;
pub use controller::{Controller, ControllerKind, StepOutcome, StepStatus};
pub use episode::{
    calibrate_trip_magnitude, metrics, run_episode, EpisodeConfig, EpisodeLog, EpisodeReport, EpisodeStatus,
    DIVERGENCE_LIMIT,
};
pub use linearity::{linearity_test, standard_combos, LinearityConfig, LinearityReport};
pub use training::{excite, excite_and_fit, fit_models, measured_outputs, ExcitationConfig, TrainedModels};
