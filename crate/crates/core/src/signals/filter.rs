use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Trajectory, DEFAULT_SAMPLE_PERIOD};
use crate::{DpcError, Result, Vector};

/// Design parameters of the measurement band-pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterDesign {
    pub low_cutoff: f64,
    pub high_cutoff: f64,
    /// Total band-pass order; split evenly between the high-pass and low-pass halves.
    pub order: usize,
    pub internal_rate: f64,
    pub sample_period: f64,
}

impl Default for FilterDesign {
    fn default() -> Self {
        Self {
            low_cutoff: 0.05,
            high_cutoff: 5.0,
            order: 4,
            internal_rate: 100.0,
            sample_period: DEFAULT_SAMPLE_PERIOD,
        }
    }
}

impl FilterDesign {
    /// Upper cutoff after clamping to 45% of the internal rate.
    pub fn effective_high_cutoff(&self) -> f64 {
        self.high_cutoff.min(0.45 * self.internal_rate)
    }

    /// Internal sub-steps per outer sample.
    pub fn upsample_factor(&self) -> Result<usize> {
        let ratio = self.internal_rate * self.sample_period;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 {
            return Err(DpcError::Config(format!(
                "internal rate {} Hz is not an integer multiple of 1/Ts = {} Hz",
                self.internal_rate,
                1.0 / self.sample_period
            )));
        }
        Ok(n as usize)
    }

    fn validate(&self) -> Result<()> {
        let hi = self.effective_high_cutoff();
        if !(self.low_cutoff > 0.0 && self.low_cutoff < hi) {
            return Err(DpcError::Config(format!(
                "band-pass needs 0 < low ({}) < high ({hi})",
                self.low_cutoff
            )));
        }
        if self.order < 2 || !self.order.is_multiple_of(2) {
            return Err(DpcError::Config(format!(
                "band-pass order must be even and >= 2, got {}",
                self.order
            )));
        }
        Ok(())
    }
}

/// One second-order section, `H(z) = (b0 + b1 z⁻¹ + b2 z⁻²) / (1 + a1 z⁻¹ + a2 z⁻²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiquadSection {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl BiquadSection {
    fn butterworth(kind: Kind, k: f64, q: Option<f64>) -> Self {
        match q {
            Some(q) => {
                let norm = 1.0 / (1.0 + k / q + k * k);
                let a = [2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm];
                let b = match kind {
                    Kind::LowPass => [k * k * norm, 2.0 * k * k * norm, k * k * norm],
                    Kind::HighPass => [norm, -2.0 * norm, norm],
                };
                Self { b, a }
            }
            // first-order section stored as a degenerate biquad
            None => {
                let norm = 1.0 / (1.0 + k);
                let a = [(k - 1.0) * norm, 0.0];
                let b = match kind {
                    Kind::LowPass => [k * norm, k * norm, 0.0],
                    Kind::HighPass => [norm, -norm, 0.0],
                };
                Self { b, a }
            }
        }
    }

    #[inline]
    fn step(&self, state: &mut [f64; 2], x: f64) -> f64 {
        let y = self.b[0] * x + state[0];
        state[0] = self.b[1] * x - self.a[0] * y + state[1];
        state[1] = self.b[2] * x - self.a[1] * y;
        y
    }
}

#[derive(Clone, Copy)]
enum Kind {
    LowPass,
    HighPass,
}

fn butterworth_sections(kind: Kind, order: usize, cutoff: f64, rate: f64) -> Vec<BiquadSection> {
    let k = (PI * cutoff / rate).tan();
    let mut out = Vec::new();
    for i in 0..order / 2 {
        let phi = PI * (2 * i + 1) as f64 / (2 * order) as f64;
        out.push(BiquadSection::butterworth(kind, k, Some(1.0 / (2.0 * phi.cos()))));
    }
    if order % 2 == 1 {
        out.push(BiquadSection::butterworth(kind, k, None));
    }
    out
}

/// Streaming Butterworth band-pass for multi-channel samples.
///
/// Each outer sample is held for `internal_rate · Ts` sub-steps and the last
/// sub-step output is returned. The filter has no DC gain, which also removes
/// the signal mean.
#[derive(Debug, Clone)]
pub struct BandPassFilter {
    design: FilterDesign,
    sections: Vec<BiquadSection>,
    state: Vec<[f64; 2]>,
    channels: usize,
    upsample: usize,
}

impl BandPassFilter {
    pub fn new(design: FilterDesign, channels: usize) -> Result<Self> {
        design.validate()?;
        let upsample = design.upsample_factor()?;
        let half = design.order / 2;
        let mut sections = butterworth_sections(Kind::HighPass, half, design.low_cutoff, design.internal_rate);
        sections.extend(butterworth_sections(
            Kind::LowPass,
            half,
            design.effective_high_cutoff(),
            design.internal_rate,
        ));
        Ok(Self {
            state: vec![[0.0; 2]; sections.len() * channels],
            design,
            sections,
            channels,
            upsample,
        })
    }

    pub fn with_defaults(channels: usize) -> Result<Self> {
        Self::new(FilterDesign::default(), channels)
    }

    pub fn design(&self) -> &FilterDesign {
        &self.design
    }

    pub fn sections(&self) -> &[BiquadSection] {
        &self.sections
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|s| *s = [0.0; 2]);
    }

    /// Filters one outer sample and advances the state.
    pub fn apply(&mut self, sample: &Vector) -> Result<Vector> {
        if sample.len() != self.channels {
            return Err(DpcError::dim("band-pass sample", self.channels, sample.len()));
        }
        let ns = self.sections.len();
        let mut out = Vector::zeros(self.channels);
        for ch in 0..self.channels {
            let state = &mut self.state[ch * ns..(ch + 1) * ns];
            let mut y = 0.0;
            for _ in 0..self.upsample {
                y = sample[ch];
                for (sec, st) in self.sections.iter().zip(state.iter_mut()) {
                    y = sec.step(st, y);
                }
            }
            out[ch] = y;
        }
        Ok(out)
    }

    /// Filters a whole trajectory starting from the current state.
    pub fn apply_trajectory(&mut self, traj: &Trajectory) -> Result<Trajectory> {
        let mut out = traj.clone();
        for t in 0..traj.len() {
            let y = self.apply(&traj.sample(t))?;
            out.set_sample(t, &y);
        }
        Ok(out)
    }
}
