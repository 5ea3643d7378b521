pub mod bench;
pub mod excite;
pub mod fit;
pub mod linearity;
pub mod run;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use dpc_core::closed_loop::ExcitationConfig;
use dpc_core::plant::{PlantModel, PlantSpec};
use dpc_core::predictors::PredictorBundle;
use dpc_core::signals::{read_csv, Trajectory};

use crate::config::CampaignConfig;

pub const EXCITATION_FILE: &str = "excitation.csv";
pub const PREDICTORS_FILE: &str = "predictors.json";

pub enum Outcome {
    Done,
    /// Episodes that diverged without being whitelisted.
    Diverged(Vec<String>),
}

pub struct Context {
    pub cfg: CampaignConfig,
    pub out: PathBuf,
    pub jobs: usize,
    pub spec: PlantSpec,
    pub plant: PlantModel,
}

impl Context {
    pub fn new(cfg: CampaignConfig, out: PathBuf, jobs: usize) -> Result<Self> {
        let spec = cfg.plant_spec()?;
        let plant = spec.build()?;
        std::fs::create_dir_all(&out).with_context(|| format!("creating output directory {}", out.display()))?;
        Ok(Self {
            cfg,
            out,
            jobs,
            spec,
            plant,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    pub fn excitation(&self) -> ExcitationConfig {
        let e = &self.cfg.excitation;
        ExcitationConfig {
            n_samples: e.n_samples,
            input_std: e.input_std,
            clip: e.clip,
            seed: self.cfg.seed,
            noise_std: e.noise_std,
            noise_seed: self.cfg.seed.wrapping_add(1),
            filter: self.cfg.filter(self.plant.ts),
        }
    }

    /// The excitation record `(u, y)` written by `dpc excite`.
    pub fn load_excitation(&self) -> Result<(Trajectory, Trajectory)> {
        let path = self.path(EXCITATION_FILE);
        require(&path, "excite")?;
        let mut parts = read_csv(&path, &["u", "y"])?.into_iter();
        let (Some(u), Some(y)) = (parts.next(), parts.next()) else {
            bail!("{}: expected u and y columns", path.display());
        };
        if u.channels() != self.plant.inputs() || y.channels() != self.plant.outputs() {
            bail!(
                "{} does not match the configured plant; rerun `dpc excite`",
                path.display()
            );
        }
        Ok((u, y))
    }

    pub fn load_predictors(&self) -> Result<PredictorBundle> {
        let path = self.path(PREDICTORS_FILE);
        require(&path, "fit")?;
        Ok(PredictorBundle::load(&path)?)
    }
}

fn require(path: &Path, command: &str) -> Result<()> {
    if !path.exists() {
        bail!("{} not found; run `dpc {command}` first", path.display());
    }
    Ok(())
}

/// `(min, median, p95, max)` of a non-empty sample, nearest-rank p95.
pub fn distribution(values: &[f64]) -> (f64, f64, f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    let p95 = v[((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1];
    (v[0], median, p95, v[n - 1])
}
