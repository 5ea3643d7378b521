use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{build_modal_plant, ModeSpec, PlantModel};
use crate::signals::{prbs_load_noise_with_period, Trajectory, DEFAULT_SAMPLE_PERIOD};
use crate::{DpcError, Result};

/// Canonical benchmark surrogate shipped with the crate.
pub const BENCHMARK_PLANT_TOML: &str = include_str!("../../fixtures/benchmark_plant.toml");

const BENCHMARK_MODES: [(f64, f64); 4] = [(0.44, 0.002), (0.77, 0.03), (0.77, 0.035), (1.3, 0.08)];
const BENCHMARK_SEED: u64 = 2024;
const NOISE_OUTPUT_STD: f64 = 0.01;
const LOAD_NOISE_STD: f64 = 0.01;
/// Input residues relative to disturbance residues; the excitation std is a
/// quarter of the load-noise std, so both reach the outputs at similar levels.
const INPUT_GAIN: f64 = 4.0;

/// On-disk description of a modal plant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub sample_period: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation_limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub modes: Vec<ModeSpec>,
}

impl PlantSpec {
    pub fn build(&self) -> Result<PlantModel> {
        Ok(build_modal_plant(&self.modes, self.sample_period)?.with_saturation(self.saturation_limit))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| DpcError::parse("<plant spec>", e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| DpcError::io(path, e))?;
        toml::from_str(&text).map_err(|e| DpcError::parse(path, e))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| DpcError::Config(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?).map_err(|e| DpcError::io(path, e))
    }

    /// Index of the lowest-frequency mode (the inter-area mode of interest).
    pub fn dominant_mode(&self) -> usize {
        self.modes
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.freq_hz.total_cmp(&b.1.freq_hz))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    pub fn with_mode_damping(mut self, index: usize, zeta: f64) -> Self {
        if let Some(m) = self.modes.get_mut(index) {
            m.damping_ratio = zeta;
        }
        self
    }

    /// Same spec with the dominant mode's damping ratio replaced.
    pub fn with_dominant_damping(self, zeta: f64) -> Self {
        let i = self.dominant_mode();
        self.with_mode_damping(i, zeta)
    }

    pub fn with_saturation(mut self, limit: Option<f64>) -> Self {
        self.saturation_limit = limit;
        self
    }

    /// Disturbance channel that excites the dominant mode most strongly.
    pub fn dominant_disturbance_channel(&self) -> usize {
        let mode = &self.modes[self.dominant_mode()];
        mode.disturbance_residues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

pub fn benchmark_plant_spec() -> PlantSpec {
    PlantSpec::from_toml_str(BENCHMARK_PLANT_TOML).expect("bundled benchmark plant parses")
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Regenerates the benchmark spec: seeded Gaussian residues, output residues
/// rescaled so that load noise of 0.01 pu gives roughly 0.01 pu output std.
pub fn generate_benchmark_spec(seed: u64) -> Result<PlantSpec> {
    let (m, p, d) = (3, 3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let mut modes: Vec<ModeSpec> = BENCHMARK_MODES
        .iter()
        .map(|&(f, z)| {
            let dist = draw(d);
            let input = draw(m).into_iter().map(|v: f64| INPUT_GAIN * v).collect();
            ModeSpec {
                freq_hz: f,
                damping_ratio: z,
                input_residues: input,
                output_residues: draw(p),
                disturbance_residues: dist,
            }
        })
        .collect();
    let ts = DEFAULT_SAMPLE_PERIOD;
    let plant = build_modal_plant(&modes, ts)?;
    let noise = prbs_load_noise_with_period(d, 600.0, LOAD_NOISE_STD, seed, ts)?;
    let u = Trajectory::zeros(m, noise.len(), ts)?;
    let y = plant.simulate(&u, Some(&noise))?;
    for ch in 0..p {
        let row = y.channel(ch);
        let mean = row.iter().sum::<f64>() / row.len() as f64;
        let sd = (row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / row.len() as f64).sqrt();
        let scale = NOISE_OUTPUT_STD / sd;
        for mode in &mut modes {
            mode.output_residues[ch] *= scale;
        }
    }
    for mode in &mut modes {
        for v in mode
            .input_residues
            .iter_mut()
            .chain(mode.output_residues.iter_mut())
            .chain(mode.disturbance_residues.iter_mut())
        {
            *v = round6(*v);
        }
    }
    Ok(PlantSpec {
        sample_period: ts,
        saturation_limit: None,
        seed: Some(seed),
        modes,
    })
}

/// Seed used for the bundled fixture.
pub const fn benchmark_seed() -> u64 {
    BENCHMARK_SEED
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::eigen_damping;

    #[test]
    fn fixture_matches_generator() {
        let generated = generate_benchmark_spec(benchmark_seed()).unwrap();
        assert_eq!(
            generated,
            benchmark_plant_spec(),
            "regenerate fixtures/benchmark_plant.toml"
        );
    }

    #[test]
    fn benchmark_mode_inventory() {
        let plant = benchmark_plant_spec().build().unwrap();
        assert_eq!(
            (plant.states(), plant.inputs(), plant.outputs(), plant.disturbances()),
            (8, 3, 3, 3)
        );
        let modes = eigen_damping(&plant);
        assert!((modes[0].freq_hz - 0.44).abs() < 1e-9);
        assert!((modes[0].damping_ratio - 0.002).abs() < 1e-9);
        let freqs: Vec<f64> = modes.iter().map(|m| (m.freq_hz * 100.0).round() / 100.0).collect();
        assert_eq!(freqs, vec![0.44, 0.77, 0.77, 1.3]);
    }

    #[test]
    fn unstable_variant_flips_dominant_damping() {
        let spec = benchmark_plant_spec().with_dominant_damping(-0.002);
        let modes = eigen_damping(&spec.build().unwrap());
        assert!((modes[0].damping_ratio + 0.002).abs() < 1e-9);
    }

    #[test]
    fn toml_round_trip() {
        let spec = benchmark_plant_spec().with_saturation(Some(0.1));
        let back = PlantSpec::from_toml_str(&spec.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
