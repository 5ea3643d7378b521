use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Trajectory, DEFAULT_SAMPLE_PERIOD};
use crate::{DpcError, Mat, Result};

/// Registers mixed per load-noise channel.
pub const PRBS_REGISTERS_PER_CHANNEL: usize = 5;
const PRBS_MIN_HZ: f64 = 0.01;
const PRBS_MAX_HZ: f64 = 10.0;

/// 32-bit Galois LFSR with the maximal-length polynomial x³² + x²² + x² + x + 1.
#[derive(Debug, Clone)]
pub struct Lfsr {
    state: u32,
}

impl Lfsr {
    const TAPS: u32 = 0x8020_0003;

    pub fn new(seed: u32) -> Self {
        // the all-zero state is a fixed point
        Self {
            state: if seed == 0 { 0xACE1_u32 } else { seed },
        }
    }

    pub fn next_bit(&mut self) -> bool {
        let out = self.state & 1 == 1;
        self.state >>= 1;
        if out {
            self.state ^= Self::TAPS;
        }
        out
    }
}

/// Gaussian white excitation, hard-clipped to `±clip`, sampled at the default Ts.
pub fn white_excitation(m: usize, n_samples: usize, std: f64, clip: f64, seed: u64) -> Result<Trajectory> {
    if !(std > 0.0) || !(clip > 0.0) {
        return Err(DpcError::Config(format!(
            "excitation needs std > 0 and clip > 0 (got {std}, {clip})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).map_err(|e| DpcError::Config(e.to_string()))?;
    let mut data = Mat::zeros(m, n_samples);
    for t in 0..n_samples {
        for ch in 0..m {
            data[(ch, t)] = normal.sample(&mut rng).clamp(-clip, clip);
        }
    }
    Trajectory::from_matrix(data, DEFAULT_SAMPLE_PERIOD)
}

/// Load-variation noise: per channel, a bank of low-pass filtered PRBS
/// registers with switching rates log-spaced over 0.01–10 Hz, summed and
/// rescaled to the requested empirical standard deviation.
pub fn prbs_load_noise(n_channels: usize, duration: f64, std: f64, seed: u64) -> Result<Trajectory> {
    prbs_load_noise_with_period(n_channels, duration, std, seed, DEFAULT_SAMPLE_PERIOD)
}

pub fn prbs_load_noise_with_period(
    n_channels: usize,
    duration: f64,
    std: f64,
    seed: u64,
    ts: f64,
) -> Result<Trajectory> {
    if !(duration > 0.0) || !(std >= 0.0) {
        return Err(DpcError::Config(format!(
            "load noise needs duration > 0 and std >= 0 (got {duration}, {std})"
        )));
    }
    let n = ((duration / ts).round() as usize).max(1);
    let mut data = Mat::zeros(n_channels, n);
    if std == 0.0 {
        return Trajectory::from_matrix(data, ts);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratio = PRBS_MAX_HZ / PRBS_MIN_HZ;
    for ch in 0..n_channels {
        for r in 0..PRBS_REGISTERS_PER_CHANNEL {
            let f = PRBS_MIN_HZ * ratio.powf(r as f64 / (PRBS_REGISTERS_PER_CHANNEL - 1) as f64);
            let hold = ((1.0 / (f * ts)).round() as usize).max(1);
            let alpha = (-2.0 * PI * f * ts).exp();
            // random phase so registers do not switch in lockstep
            let mut countdown = rng.random_range(0..hold);
            let mut lfsr = Lfsr::new(rng.random());
            let mut level = if lfsr.next_bit() { 1.0 } else { -1.0 };
            let mut state = 0.0;
            for t in 0..n {
                if countdown == 0 {
                    level = if lfsr.next_bit() { 1.0 } else { -1.0 };
                    countdown = hold;
                }
                countdown -= 1;
                state = alpha * state + (1.0 - alpha) * level;
                data[(ch, t)] += state;
            }
        }
        let mut row = data.row_mut(ch);
        let mean = row.mean();
        row.add_scalar_mut(-mean);
        let sd = (row.norm_squared() / n as f64).sqrt();
        if sd > 0.0 {
            row *= std / sd;
        }
    }
    Trajectory::from_matrix(data, ts)
}
