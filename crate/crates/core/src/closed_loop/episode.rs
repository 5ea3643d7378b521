use std::fs::File;
use std::path::Path;

use super::buffer::PastBuffer;
use super::controller::Controller;
use crate::plant::{PlantModel, PlantSpec, Scenario};
use crate::signals::{prbs_load_noise_with_period, BandPassFilter, FilterDesign};
use crate::{DpcError, Mat, Result, Vector};

/// Output norm beyond which an episode is declared diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub duration_s: f64,
    pub scenario: Option<Scenario>,
    /// Standard deviation of PRBS load noise on every disturbance channel.
    pub noise_std: f64,
    pub noise_seed: u64,
    /// Measurement band-pass; `None` feeds raw outputs to the controller.
    pub filter: Option<FilterDesign>,
    pub divergence_limit: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            duration_s: 60.0,
            scenario: None,
            noise_std: 0.0,
            noise_seed: 0,
            filter: Some(FilterDesign::default()),
            divergence_limit: DIVERGENCE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeStatus {
    Completed,
    /// Output norm exceeded the limit at this step; the log stops there.
    Diverged {
        step: usize,
    },
}

impl EpisodeStatus {
    pub fn is_diverged(&self) -> bool {
        matches!(self, EpisodeStatus::Diverged { .. })
    }
}

/// Per-step record of one episode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    pub ts: f64,
    pub y: Vec<Vector>,
    pub y_filtered: Vec<Vector>,
    /// Input applied during `[t, t+1)`.
    pub u: Vec<Vector>,
    pub solve_ms: Vec<f64>,
    pub iterations: Vec<usize>,
    pub status: Vec<&'static str>,
}

impl EpisodeLog {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Columns `t_s, y1.., yf1.., u1.., solve_ms, iters, status`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| DpcError::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        let p = self.y.first().map_or(0, |v| v.len());
        let m = self.u.first().map_or(0, |v| v.len());
        let mut header = vec!["t_s".to_string()];
        header.extend((1..=p).map(|i| format!("y{i}")));
        header.extend((1..=p).map(|i| format!("yf{i}")));
        header.extend((1..=m).map(|i| format!("u{i}")));
        header.extend(["solve_ms", "iters", "status"].map(String::from));
        let csv_err = |e: csv::Error| DpcError::parse(path, e);
        w.write_record(&header).map_err(csv_err)?;
        for t in 0..self.len() {
            let mut rec = vec![format!("{:.6}", t as f64 * self.ts)];
            rec.extend(self.y[t].iter().map(|v| v.to_string()));
            rec.extend(self.y_filtered[t].iter().map(|v| v.to_string()));
            rec.extend(self.u[t].iter().map(|v| v.to_string()));
            rec.push(format!("{:.6}", self.solve_ms[t]));
            rec.push(self.iterations[t].to_string());
            rec.push(self.status[t].to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| DpcError::io(path, e))
    }
}

/// Summary metrics of an episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeReport {
    pub controller: String,
    pub status: EpisodeStatus,
    /// RMS of each raw output channel over the episode.
    pub rms: Vec<f64>,
    /// RMS over all output channels and steps.
    pub rms_total: f64,
    /// Running `Σ ‖y‖₁`.
    pub cumulative_abs: Vec<f64>,
    /// `Σ ‖u‖₁`.
    pub input_effort: f64,
    pub max_abs_input: f64,
    pub peak_output: f64,
    pub solve_ms_median: f64,
    pub solve_ms_p95: f64,
    pub solve_ms_max: f64,
    pub iterations_median: f64,
    pub held_steps: usize,
    pub log: EpisodeLog,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Fills the metric fields from a log. Solve statistics cover steps that
/// actually invoked a solver.
pub fn metrics(controller: &str, status: EpisodeStatus, log: EpisodeLog) -> EpisodeReport {
    let n = log.len();
    let p = log.y.first().map_or(0, |v| v.len());
    let mut sq = vec![0.0; p];
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut peak: f64 = 0.0;
    for y in &log.y {
        for (i, v) in y.iter().enumerate() {
            sq[i] += v * v;
        }
        acc += y.lp_norm(1);
        cumulative.push(acc);
        peak = peak.max(y.amax());
    }
    let rms: Vec<f64> = sq
        .iter()
        .map(|s| if n > 0 { (s / n as f64).sqrt() } else { 0.0 })
        .collect();
    let rms_total = if n > 0 && p > 0 {
        (sq.iter().sum::<f64>() / (n * p) as f64).sqrt()
    } else {
        0.0
    };
    let input_effort = log.u.iter().map(|u| u.lp_norm(1)).sum();
    let max_abs_input = log.u.iter().map(|u| u.amax()).fold(0.0, f64::max);
    let active: Vec<usize> = (0..n)
        .filter(|&t| log.status[t] == "solved" || log.status[t] == "held")
        .collect();
    let mut times: Vec<f64> = active.iter().map(|&t| log.solve_ms[t]).collect();
    times.sort_by(f64::total_cmp);
    let mut iters: Vec<f64> = active.iter().map(|&t| log.iterations[t] as f64).collect();
    iters.sort_by(f64::total_cmp);
    let held_steps = log.status.iter().filter(|s| **s == "held").count();
    EpisodeReport {
        controller: controller.to_string(),
        status,
        rms,
        rms_total,
        cumulative_abs: cumulative,
        input_effort,
        max_abs_input,
        peak_output: peak,
        solve_ms_median: percentile(&times, 0.5),
        solve_ms_p95: percentile(&times, 0.95),
        solve_ms_max: times.last().copied().unwrap_or(0.0),
        iterations_median: percentile(&iters, 0.5),
        held_steps,
        log,
    }
}

/// Disturbance samples for the whole episode: scenario event plus load noise.
fn disturbance(plant: &PlantModel, cfg: &EpisodeConfig, n: usize) -> Result<Mat> {
    let d = plant.disturbances();
    let mut out = Mat::zeros(d, n);
    if d == 0 {
        return Ok(out);
    }
    let duration = n as f64 * plant.ts;
    if let Some(s) = &cfg.scenario {
        let traj = s.trajectory(d, duration, plant.ts)?;
        let len = traj.len().min(n);
        out.columns_mut(0, len).copy_from(&traj.as_matrix().columns(0, len));
    }
    if cfg.noise_std > 0.0 {
        let noise = prbs_load_noise_with_period(d, duration, cfg.noise_std, cfg.noise_seed, plant.ts)?;
        let len = noise.len().min(n);
        let mut cols = out.columns_mut(0, len);
        cols += noise.as_matrix().columns(0, len);
    }
    Ok(out)
}

/// Simulates one closed-loop episode from rest.
pub fn run_episode(plant: &PlantModel, ctrl: &mut Controller, cfg: &EpisodeConfig) -> Result<EpisodeReport> {
    let (p, m) = (plant.outputs(), plant.inputs());
    if ctrl.outputs() != p || ctrl.inputs() != m {
        return Err(DpcError::dim(
            "controller channels",
            p + m,
            ctrl.outputs() + ctrl.inputs(),
        ));
    }
    let n = (cfg.duration_s / plant.ts).round() as usize;
    let dist = disturbance(plant, cfg, n)?;
    let mut filter = match cfg.filter {
        Some(design) => Some(BandPassFilter::new(design, p)?),
        None => None,
    };
    let mut buffer = PastBuffer::new(ctrl.tau_p(), p, m);
    let mut state = plant.initial_state();
    let mut u_now = Vector::zeros(m);
    let mut log = EpisodeLog {
        ts: plant.ts,
        ..EpisodeLog::default()
    };
    let mut status = EpisodeStatus::Completed;
    for t in 0..n {
        let y = plant.output(&state);
        if !y.iter().all(|v| v.is_finite()) || y.norm() > cfg.divergence_limit {
            status = EpisodeStatus::Diverged { step: t };
            break;
        }
        let y_f = match filter.as_mut() {
            Some(f) => f.apply(&y)?,
            None => y.clone(),
        };
        buffer.push(&y_f, &u_now)?;
        let outcome = ctrl.step(&buffer)?;
        log.y.push(y);
        log.y_filtered.push(y_f);
        log.u.push(u_now.clone());
        log.solve_ms.push(outcome.solve_ms);
        log.iterations.push(outcome.iterations);
        log.status.push(outcome.status.as_str());
        let (next, _) = plant.step(&state, &u_now, &dist.column(t).into_owned())?;
        state = next;
        u_now = outcome.u;
    }
    Ok(metrics(ctrl.kind().name(), status, log))
}

/// Impulse magnitude on the dominant disturbance channel that makes the
/// uncontrolled first swing of `output` reach `target`. The first swing is
/// the peak within one period of the dominant mode.
pub fn calibrate_trip_magnitude(spec: &PlantSpec, output: usize, target: f64) -> Result<f64> {
    let plant = spec.build()?;
    if output >= plant.outputs() {
        return Err(DpcError::OutOfRange(format!("output {output} of {}", plant.outputs())));
    }
    let channel = spec.dominant_disturbance_channel();
    let mut d = Vector::zeros(plant.disturbances());
    d[channel] = 1.0;
    let u = Vector::zeros(plant.inputs());
    let mut state = plant.initial_state();
    let mut peak: f64 = 0.0;
    let Some(dominant) = spec.modes.get(spec.dominant_mode()) else {
        return Err(DpcError::Config("plant spec has no modes".into()));
    };
    let window_s = 1.0 / dominant.freq_hz;
    let steps = (window_s / plant.ts).round() as usize;
    for t in 0..steps {
        let dt = if t == 0 {
            d.clone()
        } else {
            Vector::zeros(plant.disturbances())
        };
        let (next, y) = plant.step(&state, &u, &dt)?;
        peak = peak.max(y[output].abs());
        state = next;
    }
    if peak <= 0.0 {
        return Err(DpcError::Config(
            "disturbance channel does not reach the chosen output".into(),
        ));
    }
    Ok(target / peak)
}
