use crate::plant::PlantModel;
use crate::predictors::{
    build_deepc_data, fit_single_arx, fit_transient_predictor, DeePCData, SingleArxPredictor, TransientPredictor,
};
use crate::signals::{
    prbs_load_noise_with_period, white_excitation, BandPassFilter, FilterDesign, HankelConfig, Trajectory,
};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationConfig {
    /// Length of the experiment; each fit uses its own trailing window.
    pub n_samples: usize,
    pub input_std: f64,
    pub clip: f64,
    pub seed: u64,
    /// PRBS load noise on the disturbance channels during collection.
    pub noise_std: f64,
    pub noise_seed: u64,
    pub filter: Option<FilterDesign>,
}

impl Default for ExcitationConfig {
    fn default() -> Self {
        Self {
            n_samples: 2000,
            input_std: 0.0025,
            clip: 0.1,
            seed: 1,
            noise_std: 0.0,
            noise_seed: 2,
            filter: Some(FilterDesign::default()),
        }
    }
}

/// Excitation data and the three predictors fitted from it.
#[derive(Debug, Clone)]
pub struct TrainedModels {
    pub u: Trajectory,
    pub y: Trajectory,
    /// Outputs as the controller sees them (after the measurement filter).
    pub y_measured: Trajectory,
    pub tpc: TransientPredictor,
    pub arx: SingleArxPredictor,
    pub deepc: DeePCData,
}

/// Runs the excitation experiment: white input on every channel, optional
/// load noise, noiseless measurement. Returns `(u, y)`.
pub fn excite(plant: &PlantModel, exc: &ExcitationConfig, n: usize) -> Result<(Trajectory, Trajectory)> {
    let u = white_excitation(plant.inputs(), n, exc.input_std, exc.clip, exc.seed)?;
    let d = if exc.noise_std > 0.0 && plant.disturbances() > 0 {
        Some(prbs_load_noise_with_period(
            plant.disturbances(),
            n as f64 * plant.ts,
            exc.noise_std,
            exc.noise_seed,
            plant.ts,
        )?)
    } else {
        None
    };
    let d = match d {
        Some(d) if d.len() > n => Some(d.slice(0, n)?),
        other => other,
    };
    let y = plant.simulate(&u, d.as_ref())?;
    Ok((u, y))
}

/// Outputs as the controller sees them.
pub fn measured_outputs(y: &Trajectory, filter: Option<FilterDesign>) -> Result<Trajectory> {
    match filter {
        Some(design) => BandPassFilter::new(design, y.channels())?.apply_trajectory(y),
        None => Ok(y.clone()),
    }
}

/// Fits TPC and Single-ARX on `arx_cfg` and builds the DeePC data on `deepc_cfg`.
pub fn fit_models(
    u: &Trajectory,
    y_measured: &Trajectory,
    arx_cfg: HankelConfig,
    deepc_cfg: HankelConfig,
) -> Result<(TransientPredictor, SingleArxPredictor, DeePCData)> {
    Ok((
        fit_transient_predictor(u, y_measured, arx_cfg)?,
        fit_single_arx(u, y_measured, arx_cfg)?,
        build_deepc_data(u, y_measured, deepc_cfg)?,
    ))
}

/// Runs the excitation experiment on `plant` and fits every predictor.
pub fn excite_and_fit(
    plant: &PlantModel,
    exc: &ExcitationConfig,
    arx_cfg: HankelConfig,
    deepc_cfg: HankelConfig,
) -> Result<TrainedModels> {
    let n = exc.n_samples.max(arx_cfg.n_samples).max(deepc_cfg.n_samples);
    let (u, y) = excite(plant, exc, n)?;
    let y_measured = measured_outputs(&y, exc.filter)?;
    let (tpc, arx, deepc) = fit_models(&u, &y_measured, arx_cfg, deepc_cfg)?;
    Ok(TrainedModels {
        u,
        y,
        y_measured,
        tpc,
        arx,
        deepc,
    })
}
