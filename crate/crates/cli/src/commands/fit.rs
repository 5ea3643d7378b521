use anyhow::Result;
use dpc_core::closed_loop::{fit_models, measured_outputs};
use dpc_core::predictors::PredictorBundle;

use super::{Context, Outcome, PREDICTORS_FILE};

pub fn run(ctx: &Context) -> Result<Outcome> {
    let (u, y) = ctx.load_excitation()?;
    let y_measured = measured_outputs(&y, ctx.cfg.filter(ctx.plant.ts))?;
    let (tpc, arx, deepc) = fit_models(&u, &y_measured, ctx.cfg.tpc.hankel()?, ctx.cfg.deepc.hankel()?)?;
    for warning in &arx.warnings {
        eprintln!("warning: {warning}");
    }
    let bundle = PredictorBundle {
        tpc: Some(tpc),
        arx: Some(arx),
        deepc: Some(deepc),
    };
    let path = ctx.path(PREDICTORS_FILE);
    bundle.save(&path)?;
    println!("wrote {}", path.display());
    Ok(Outcome::Done)
}
