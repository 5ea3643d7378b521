//! Campaign configuration file.
//!
//! Every key is optional; missing keys take the defaults below, which
//! reproduce the benchmark campaign (default TPC/ARX and DeePC tunings on
//! the benchmark plant with its dominant mode made unstable).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dpc_core::closed_loop::ControllerKind;
use dpc_core::ocp::{OcpBounds, WeightSpec};
use dpc_core::plant::{benchmark_plant_spec, DisturbanceKind, PlantSpec};
use dpc_core::signals::{FilterDesign, HankelConfig};
use dpc_core::Vector;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    /// Base seed; excitation, collection noise and loop noise derive from it.
    pub seed: u64,
    /// Plant spec TOML, relative to the config file. The bundled benchmark
    /// plant when absent.
    pub plant: Option<PathBuf>,
    /// Overrides the damping ratio of the dominant mode.
    pub dominant_damping: Option<f64>,
    pub out_dir: Option<PathBuf>,
    /// Band-pass the measurements for training and in the loop.
    pub measurement_filter: bool,
    pub excitation: ExcitationSection,
    /// Tuning shared by TPC and Single-ARX.
    pub tpc: ControllerTable,
    pub deepc: ControllerTable,
    pub run: RunSection,
    pub linearity: LinearitySection,
    pub bench: BenchSection,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            plant: None,
            dominant_damping: Some(-0.002),
            out_dir: None,
            measurement_filter: true,
            excitation: ExcitationSection::default(),
            tpc: ControllerTable::tpc_default(),
            deepc: ControllerTable::deepc_default(),
            run: RunSection::default(),
            linearity: LinearitySection::default(),
            bench: BenchSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExcitationSection {
    pub n_samples: usize,
    pub input_std: f64,
    pub clip: f64,
    /// PRBS load noise during collection, pu.
    pub noise_std: f64,
}

impl Default for ExcitationSection {
    fn default() -> Self {
        Self {
            n_samples: 2000,
            input_std: 0.0025,
            clip: 0.1,
            noise_std: 0.0,
        }
    }
}

/// A stage weight given either as its diagonal or as a full matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Diagonal(Vec<f64>),
    Full(Vec<Vec<f64>>),
}

impl Weight {
    fn matrix(&self) -> Vec<Vec<f64>> {
        match self {
            Weight::Full(m) => m.clone(),
            Weight::Diagonal(d) => (0..d.len())
                .map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { 0.0 }).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerTable {
    pub tau_p: usize,
    pub tau_f: usize,
    pub n_samples: usize,
    pub q_bar: Weight,
    pub r_bar: Weight,
    pub q_norm: Vec<f64>,
    pub r_norm: Vec<f64>,
    pub lambda_g2: f64,
    pub lambda_sigma: f64,
    pub u_min: f64,
    pub u_max: f64,
}

impl ControllerTable {
    pub fn tpc_default() -> Self {
        Self::from_weights(30, 60, 2000, WeightSpec::tpc_default())
    }

    pub fn deepc_default() -> Self {
        Self::from_weights(60, 60, 500, WeightSpec::deepc_default())
    }

    fn from_weights(tau_p: usize, tau_f: usize, n_samples: usize, w: WeightSpec) -> Self {
        Self {
            tau_p,
            tau_f,
            n_samples,
            q_bar: Weight::Full(w.q_bar),
            r_bar: Weight::Full(w.r_bar),
            q_norm: w.q_norm,
            r_norm: w.r_norm,
            lambda_g2: w.lambda_g2,
            lambda_sigma: w.lambda_sigma,
            u_min: -0.1,
            u_max: 0.1,
        }
    }

    pub fn hankel(&self) -> Result<HankelConfig> {
        Ok(HankelConfig::new(self.tau_p, self.tau_f, self.n_samples)?)
    }

    pub fn weights(&self) -> Result<WeightSpec> {
        let w = WeightSpec {
            q_bar: self.q_bar.matrix(),
            r_bar: self.r_bar.matrix(),
            q_norm: self.q_norm.clone(),
            r_norm: self.r_norm.clone(),
            lambda_g2: self.lambda_g2,
            lambda_sigma: self.lambda_sigma,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn bounds(&self, inputs: usize) -> Result<OcpBounds> {
        if self.u_min > self.u_max {
            bail!("u_min {} exceeds u_max {}", self.u_min, self.u_max);
        }
        Ok(OcpBounds {
            u_lb: Vector::from_element(inputs, self.u_min),
            u_ub: Vector::from_element(inputs, self.u_max),
            y_lb: None,
            y_ub: None,
        })
    }
}

impl Default for ControllerTable {
    fn default() -> Self {
        Self::tpc_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: DisturbanceKind,
    /// Event size; when absent the impulse is scaled so the uncontrolled
    /// first swing of the stable plant on `swing_output` equals `first_swing`.
    pub magnitude: Option<f64>,
    pub first_swing: f64,
    /// Zero-based output index used for the calibration.
    pub swing_output: usize,
    pub at_s: f64,
    /// Disturbance channel; the one driving the dominant mode when absent.
    pub channel: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "trip".into(),
            kind: DisturbanceKind::Impulse,
            magnitude: None,
            first_swing: 0.05,
            swing_output: 1,
            at_s: 5.0,
            channel: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub controllers: Vec<ControllerKind>,
    pub duration_s: f64,
    /// PRBS load noise during the episodes, pu.
    pub noise_std: f64,
    /// Controllers allowed to diverge without failing the run.
    pub expected_divergence: Vec<ControllerKind>,
    /// Damping ratio of the stable reference used for trip calibration.
    pub calibration_damping: f64,
    pub scenarios: Vec<ScenarioConfig>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            controllers: vec![
                ControllerKind::Zero,
                ControllerKind::Tpc,
                ControllerKind::SingleArx,
                ControllerKind::DeePC,
            ],
            duration_s: 60.0,
            noise_std: 0.0,
            expected_divergence: vec![ControllerKind::Zero],
            calibration_damping: 0.002,
            scenarios: vec![ScenarioConfig::default()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearitySection {
    pub amplitude: f64,
    pub duration_s: f64,
    pub tau_sim_s: f64,
    pub scales: Vec<f64>,
}

impl Default for LinearitySection {
    fn default() -> Self {
        Self {
            amplitude: 0.01,
            duration_s: 1.0,
            tau_sim_s: 30.0,
            scales: vec![1.0, 5.0, 10.0, 20.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub controllers: Vec<ControllerKind>,
    pub tau_f: Vec<usize>,
    /// Timed warm-started solves per grid point, after one priming solve.
    pub solves: usize,
    pub setup_repeats: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            controllers: vec![ControllerKind::Tpc, ControllerKind::SingleArx, ControllerKind::DeePC],
            tau_f: vec![10, 20, 30, 40, 50, 60],
            solves: 200,
            setup_repeats: 5,
        }
    }
}

impl CampaignConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: Self = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if let (Some(plant), Some(dir)) = (&cfg.plant, path.parent()) {
            if plant.is_relative() {
                cfg.plant = Some(dir.join(plant));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.plant {
            if !p.exists() {
                bail!("plant spec {} does not exist", p.display());
            }
        }
        for table in [&self.tpc, &self.deepc] {
            table.hankel()?;
            table.weights()?;
        }
        if self.run.controllers.is_empty() {
            bail!("[run] lists no controllers");
        }
        if self.run.scenarios.is_empty() {
            bail!("[run] lists no scenarios");
        }
        if self.bench.solves < 200 {
            bail!("[bench] solves must be at least 200, got {}", self.bench.solves);
        }
        Ok(())
    }

    pub fn plant_spec(&self) -> Result<PlantSpec> {
        let spec = match &self.plant {
            Some(path) => PlantSpec::load(path)?,
            None => benchmark_plant_spec(),
        };
        Ok(match self.dominant_damping {
            Some(zeta) => spec.with_dominant_damping(zeta),
            None => spec,
        })
    }

    pub fn filter(&self, sample_period: f64) -> Option<FilterDesign> {
        self.measurement_filter.then(|| FilterDesign {
            sample_period,
            ..FilterDesign::default()
        })
    }

    /// Samples the excitation must provide for both fits.
    pub fn samples_needed(&self) -> usize {
        self.tpc.n_samples.max(self.deepc.n_samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = CampaignConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: CampaignConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn diagonal_weights_expand() {
        let cfg: CampaignConfig = toml::from_str("[deepc]\nq_bar = [1e8, 1e7, 1e7]\n").unwrap();
        assert_eq!(cfg.deepc.weights().unwrap().q_bar, WeightSpec::deepc_default().q_bar);
        assert_eq!(cfg.tpc, ControllerTable::tpc_default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<CampaignConfig>("[tpc]\ntau_q = 3\n").is_err());
    }

    #[test]
    fn controller_names_parse() {
        let cfg: CampaignConfig =
            toml::from_str("[run]\ncontrollers = [\"single_arx\", \"closed_form_deepc\"]\n").unwrap();
        assert_eq!(
            cfg.run.controllers,
            vec![ControllerKind::SingleArx, ControllerKind::ClosedFormDeePC]
        );
    }
}
