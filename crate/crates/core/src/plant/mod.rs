//! Discrete-time modal surrogate of a weakly damped transmission grid.
//!
//! Each oscillatory mode is a 2×2 continuous block discretized exactly with
//! its matrix exponential, so the discrete eigenvalues carry the specified
//! frequency and damping ratio without warping.

mod modal;
mod scenario;
mod spec_file;

pub use modal::{build_modal_plant, doublet, eigen_damping, ModalDamping, ModeSpec, PlantModel, PlantState};
pub use scenario::{scenario_disturbance, DisturbanceKind, Scenario};
pub use spec_file::{benchmark_plant_spec, benchmark_seed, generate_benchmark_spec, PlantSpec, BENCHMARK_PLANT_TOML};
