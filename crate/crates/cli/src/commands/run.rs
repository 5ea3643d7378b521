use anyhow::{anyhow, bail, Context as _, Result};
use dpc_core::closed_loop::{
    calibrate_trip_magnitude, run_batch, BatchJob, Controller, ControllerKind, EpisodeConfig, EpisodeReport,
    EpisodeStatus,
};
use dpc_core::par::{with_jobs, ExecMode};
use dpc_core::plant::Scenario;
use dpc_core::predictors::PredictorBundle;
use dpc_core::qpsolver::SolverSettings;
use dpc_core::signals::HankelConfig;
use serde::Serialize;

use super::{Context, Outcome};
use crate::config::ScenarioConfig;

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    scenario: &'a str,
    controller: &'a str,
    status: &'static str,
    diverged_step: Option<usize>,
    expected_divergence: bool,
    rms: &'a [f64],
    rms_total: f64,
    cumulative_abs: f64,
    input_effort: f64,
    max_abs_input: f64,
    peak_output: f64,
    held_steps: usize,
    solve_ms_median: f64,
    solve_ms_p95: f64,
    solve_ms_max: f64,
    iterations_median: f64,
}

fn check_fit(what: &str, fitted: HankelConfig, table: HankelConfig) -> Result<()> {
    if fitted != table {
        bail!("{what} predictor was fitted with {fitted:?} but the config asks for {table:?}; rerun `dpc fit`");
    }
    Ok(())
}

fn controller(ctx: &Context, kind: ControllerKind, bundle: &PredictorBundle) -> Result<Controller> {
    let (p, m) = (ctx.plant.outputs(), ctx.plant.inputs());
    let settings = SolverSettings::default();
    let missing = |what: &str| anyhow!("predictors file has no {what} model; rerun `dpc fit`");
    let (tpc, deepc) = (&ctx.cfg.tpc, &ctx.cfg.deepc);
    Ok(match kind {
        ControllerKind::Zero => Controller::zero(tpc.tau_p, p, m),
        ControllerKind::Tpc | ControllerKind::ClosedFormTpc => {
            let pred = bundle.tpc.as_ref().ok_or_else(|| missing("TPC"))?;
            check_fit("TPC", pred.config, tpc.hankel()?)?;
            Controller::predictive(kind, pred, &tpc.weights()?, &tpc.bounds(m)?, settings)?
        }
        ControllerKind::SingleArx => {
            let pred = bundle.arx.as_ref().ok_or_else(|| missing("Single-ARX"))?;
            check_fit("Single-ARX", pred.config, tpc.hankel()?)?;
            Controller::predictive(kind, pred, &tpc.weights()?, &tpc.bounds(m)?, settings)?
        }
        ControllerKind::DeePC | ControllerKind::ClosedFormDeePC => {
            let data = bundle.deepc.as_ref().ok_or_else(|| missing("DeePC"))?;
            check_fit("DeePC", data.config, deepc.hankel()?)?;
            Controller::deepc(kind, data, &deepc.weights()?, &deepc.bounds(m)?, settings)?
        }
    })
}

fn scenario(ctx: &Context, s: &ScenarioConfig) -> Result<Scenario> {
    let magnitude = match s.magnitude {
        Some(v) => v,
        None => {
            let stable = ctx.spec.clone().with_dominant_damping(ctx.cfg.run.calibration_damping);
            calibrate_trip_magnitude(&stable, s.swing_output, s.first_swing)
                .with_context(|| format!("calibrating scenario `{}`", s.name))?
        }
    };
    Ok(Scenario {
        name: s.name.clone(),
        kind: s.kind,
        magnitude,
        at_s: s.at_s,
        channel: s.channel.unwrap_or_else(|| ctx.spec.dominant_disturbance_channel()),
    })
}

fn long_rows(out: &mut csv::Writer<std::fs::File>, scenario: &str, r: &EpisodeReport) -> Result<()> {
    let mut metrics: Vec<(String, f64)> = r
        .rms
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("rms_y{}", i + 1), *v))
        .collect();
    metrics.extend([
        ("rms_total".to_string(), r.rms_total),
        (
            "cumulative_abs".to_string(),
            r.cumulative_abs.last().copied().unwrap_or(0.0),
        ),
        ("input_effort".to_string(), r.input_effort),
        ("max_abs_input".to_string(), r.max_abs_input),
        ("peak_output".to_string(), r.peak_output),
        ("held_steps".to_string(), r.held_steps as f64),
        ("diverged".to_string(), f64::from(u8::from(r.status.is_diverged()))),
    ]);
    for (name, value) in metrics {
        out.write_record([scenario, &r.controller, &name, &value.to_string()])?;
    }
    Ok(())
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let bundle = ctx.load_predictors()?;
    let run = &ctx.cfg.run;
    let mut jobs = Vec::new();
    for s in &run.scenarios {
        let scenario = scenario(ctx, s)?;
        for &kind in &run.controllers {
            jobs.push(BatchJob {
                name: format!("{}_{}", s.name, kind),
                plant: ctx.plant.clone(),
                controller: controller(ctx, kind, &bundle)?,
                config: EpisodeConfig {
                    duration_s: run.duration_s,
                    scenario: Some(scenario.clone()),
                    noise_std: run.noise_std,
                    noise_seed: ctx.cfg.seed.wrapping_add(2),
                    filter: ctx.cfg.filter(ctx.plant.ts),
                    ..EpisodeConfig::default()
                },
            });
        }
    }
    let reports = with_jobs(ctx.jobs, || run_batch(ExecMode::Parallel, &jobs));

    let episodes = ctx.path("episodes");
    std::fs::create_dir_all(&episodes).with_context(|| format!("creating {}", episodes.display()))?;
    let mut summary = Vec::new();
    let csv_path = ctx.path("summary.csv");
    let mut long = csv::Writer::from_path(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    long.write_record(["scenario", "controller", "metric", "value"])?;
    let mut unexpected = Vec::new();
    let n_ctrl = run.controllers.len();
    for (i, (job, report)) in jobs.iter().zip(&reports).enumerate() {
        let report = report.as_ref().map_err(|e| anyhow!("episode {}: {e}", job.name))?;
        let scenario = &run.scenarios[i / n_ctrl].name;
        let kind = run.controllers[i % n_ctrl];
        report.log.write_csv(&episodes.join(format!("{}.csv", job.name)))?;
        let expected = run.expected_divergence.contains(&kind);
        let diverged_step = match report.status {
            EpisodeStatus::Diverged { step } => Some(step),
            EpisodeStatus::Completed => None,
        };
        if diverged_step.is_some() && !expected {
            unexpected.push(job.name.clone());
        }
        println!(
            "{:<24} {:<9} rms {:.5} peak {:.4} max|u| {:.4} solve median {:.3} ms",
            job.name,
            if diverged_step.is_some() {
                "diverged"
            } else {
                "completed"
            },
            report.rms_total,
            report.peak_output,
            report.max_abs_input,
            report.solve_ms_median
        );
        long_rows(&mut long, scenario, report)?;
        summary.push(SummaryRow {
            scenario,
            controller: &report.controller,
            status: if diverged_step.is_some() {
                "diverged"
            } else {
                "completed"
            },
            diverged_step,
            expected_divergence: expected,
            rms: &report.rms,
            rms_total: report.rms_total,
            cumulative_abs: report.cumulative_abs.last().copied().unwrap_or(0.0),
            input_effort: report.input_effort,
            max_abs_input: report.max_abs_input,
            peak_output: report.peak_output,
            held_steps: report.held_steps,
            solve_ms_median: report.solve_ms_median,
            solve_ms_p95: report.solve_ms_p95,
            solve_ms_max: report.solve_ms_max,
            iterations_median: report.iterations_median,
        });
    }
    let json_path = ctx.path("summary.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&summary)? + "\n")
        .with_context(|| format!("writing {}", json_path.display()))?;
    long.flush()
        .with_context(|| format!("writing {}", csv_path.display()))?;
    println!(
        "wrote {}, {} and {} episode logs",
        json_path.display(),
        csv_path.display(),
        jobs.len()
    );
    Ok(if unexpected.is_empty() {
        Outcome::Done
    } else {
        Outcome::Diverged(unexpected)
    })
}
