use super::controller::Controller;
use super::episode::{run_episode, EpisodeConfig, EpisodeReport};
use crate::par::{map, ExecMode};
use crate::plant::PlantModel;
use crate::Result;

/// One independent episode: its own plant, controller and configuration.
#[derive(Debug, Clone)]
pub struct BatchJob {
    pub name: String,
    pub plant: PlantModel,
    pub controller: Controller,
    pub config: EpisodeConfig,
}

/// Runs every job, in parallel when `mode` allows; results keep job order.
pub fn run_batch(mode: ExecMode, jobs: &[BatchJob]) -> Vec<Result<EpisodeReport>> {
    map(mode, jobs, |job| {
        let mut ctrl = job.controller.clone();
        run_episode(&job.plant, &mut ctrl, &job.config)
    })
}
