use serde::{Deserialize, Serialize};

use crate::signals::Trajectory;
use crate::{DpcError, Mat, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisturbanceKind {
    /// One sample of `magnitude` at `at`.
    Impulse,
    /// Zero before `at`, `magnitude` from `at` on.
    Step,
    /// Linear rise from zero at `at` to `magnitude` one second later, then held.
    Ramp,
}

/// A disturbance event applied to one disturbance channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub kind: DisturbanceKind,
    pub magnitude: f64,
    pub at_s: f64,
    #[serde(default)]
    pub channel: usize,
}

impl Scenario {
    pub fn trajectory(&self, channels: usize, duration: f64, ts: f64) -> Result<Trajectory> {
        if self.channel >= channels {
            return Err(DpcError::OutOfRange(format!(
                "scenario `{}` targets disturbance channel {} of {channels}",
                self.name, self.channel
            )));
        }
        let single = scenario_disturbance(self.kind, self.magnitude, self.at_s, duration, ts)?;
        let mut data = Mat::zeros(channels, single.len());
        data.row_mut(self.channel).copy_from(&single.as_matrix().row(0));
        Trajectory::from_matrix(data, ts)
    }
}

/// Single-channel disturbance trajectory lasting `duration` seconds.
pub fn scenario_disturbance(
    kind: DisturbanceKind,
    magnitude: f64,
    at: f64,
    duration: f64,
    ts: f64,
) -> Result<Trajectory> {
    if !magnitude.is_finite() {
        return Err(DpcError::Config("disturbance magnitude must be finite".into()));
    }
    let n = ((duration / ts).round() as usize).max(1);
    let k0 = (at / ts).round() as usize;
    let ramp_len = (1.0 / ts).round().max(1.0);
    let mut data = Mat::zeros(1, n);
    for t in k0..n {
        data[(0, t)] = match kind {
            DisturbanceKind::Impulse if t == k0 => magnitude,
            DisturbanceKind::Impulse => 0.0,
            DisturbanceKind::Step => magnitude,
            DisturbanceKind::Ramp => magnitude * ((t - k0) as f64 / ramp_len).min(1.0),
        };
    }
    Trajectory::from_matrix(data, ts)
}
