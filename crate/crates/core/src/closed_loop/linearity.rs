use std::fs::File;
use std::path::Path;

use crate::plant::{doublet, PlantModel};
use crate::signals::Trajectory;
use crate::{DpcError, Mat, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearityConfig {
    pub amplitude: f64,
    pub duration_s: f64,
    /// Simulated horizon per run.
    pub tau_sim_s: f64,
    pub scales: Vec<f64>,
    /// Input channels whose doublets are applied together.
    pub combos: Vec<Vec<usize>>,
}

impl LinearityConfig {
    pub fn standard(inputs: usize) -> Self {
        Self {
            amplitude: 0.01,
            duration_s: 1.0,
            tau_sim_s: 30.0,
            scales: vec![1.0, 5.0, 10.0, 20.0],
            combos: standard_combos(inputs),
        }
    }
}

/// Every nonempty subset of the input channels, singles first.
pub fn standard_combos(inputs: usize) -> Vec<Vec<usize>> {
    let mut combos: Vec<Vec<usize>> = (1u32..(1 << inputs))
        .map(|mask| (0..inputs).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    combos.sort_by_key(|c| (c.len(), c.clone()));
    combos
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearityReport {
    pub scales: Vec<f64>,
    pub combos: Vec<Vec<usize>>,
    /// `rmse[combo][scale][output]`.
    pub rmse: Vec<Vec<Vec<f64>>>,
    /// Over all outputs, `rmse_total[combo][scale]`.
    pub rmse_total: Vec<Vec<f64>>,
    pub tau_sim_s: f64,
}

impl LinearityReport {
    /// Long format: `combo, scale, rmse_y1.., rmse_total`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| DpcError::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        let p = self.rmse.first().and_then(|c| c.first()).map_or(0, |v| v.len());
        let mut header = vec!["combo".to_string(), "scale".to_string()];
        header.extend((1..=p).map(|i| format!("rmse_y{i}")));
        header.push("rmse_total".into());
        let csv_err = |e: csv::Error| DpcError::parse(path, e);
        w.write_record(&header).map_err(csv_err)?;
        for (c, combo) in self.combos.iter().enumerate() {
            let name = combo
                .iter()
                .map(|i| format!("u{}", i + 1))
                .collect::<Vec<_>>()
                .join("+");
            for (s, scale) in self.scales.iter().enumerate() {
                let mut rec = vec![name.clone(), scale.to_string()];
                rec.extend(self.rmse[c][s].iter().map(|v| format!("{v:e}")));
                rec.push(format!("{:e}", self.rmse_total[c][s]));
                w.write_record(&rec).map_err(csv_err)?;
            }
        }
        w.flush().map_err(|e| DpcError::io(path, e))
    }
}

/// Superposition test with single-excitation doublets.
///
/// For every combo and scale, the plant's response to the scaled sum of
/// doublets is compared with the scaled sum of the individual responses;
/// the RMSE is the time average over the simulated horizon.
pub fn linearity_test(plant: &PlantModel, cfg: &LinearityConfig) -> Result<LinearityReport> {
    let m = plant.inputs();
    let singles: Vec<Trajectory> = (0..m)
        .map(|i| doublet(m, i, cfg.amplitude, cfg.duration_s, cfg.tau_sim_s, plant.ts))
        .collect::<Result<_>>()?;
    let responses: Vec<Trajectory> = singles.iter().map(|u| plant.simulate(u, None)).collect::<Result<_>>()?;
    let n = singles[0].len();
    let mut rmse = Vec::new();
    let mut rmse_total = Vec::new();
    for combo in &cfg.combos {
        if combo.iter().any(|&i| i >= m) {
            return Err(DpcError::OutOfRange(format!("combo {combo:?} with {m} inputs")));
        }
        let mut per_scale = Vec::new();
        let mut totals = Vec::new();
        for &s in &cfg.scales {
            let mut u = Mat::zeros(m, n);
            let mut expected = Mat::zeros(plant.outputs(), n);
            for &i in combo {
                u += singles[i].as_matrix() * s;
                expected += responses[i].as_matrix() * s;
            }
            let y = plant.simulate(&Trajectory::from_matrix(u, plant.ts)?, None)?;
            let err = expected - y.as_matrix();
            let per_output: Vec<f64> = err.row_iter().map(|r| (r.norm_squared() / n as f64).sqrt()).collect();
            totals.push((err.norm_squared() / n as f64).sqrt());
            per_scale.push(per_output);
        }
        rmse.push(per_scale);
        rmse_total.push(totals);
    }
    Ok(LinearityReport {
        scales: cfg.scales.clone(),
        combos: cfg.combos.clone(),
        rmse,
        rmse_total,
        tau_sim_s: cfg.tau_sim_s,
    })
}
