use anyhow::Result;
use dpc_core::closed_loop::{linearity_test, LinearityConfig};

use super::{Context, Outcome};

pub fn run(ctx: &Context) -> Result<Outcome> {
    let l = &ctx.cfg.linearity;
    let cfg = LinearityConfig {
        amplitude: l.amplitude,
        duration_s: l.duration_s,
        tau_sim_s: l.tau_sim_s,
        scales: l.scales.clone(),
        ..LinearityConfig::standard(ctx.plant.inputs())
    };
    let report = linearity_test(&ctx.plant, &cfg)?;
    let path = ctx.path("linearity.csv");
    report.write_csv(&path)?;
    let worst = report.rmse_total.iter().flatten().fold(0.0f64, |a, b| a.max(*b));
    println!("wrote {} (worst RMSE {worst:.3e})", path.display());
    Ok(Outcome::Done)
}
