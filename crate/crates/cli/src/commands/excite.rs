use anyhow::{bail, Result};
use dpc_core::closed_loop::excite;
use dpc_core::signals::write_csv;

use super::{Context, Outcome, EXCITATION_FILE};

pub fn run(ctx: &Context) -> Result<Outcome> {
    let exc = ctx.excitation();
    let needed = ctx.cfg.samples_needed();
    if exc.n_samples < needed {
        bail!(
            "[excitation] n_samples = {} is shorter than the {needed} samples the fits need",
            exc.n_samples
        );
    }
    let (u, y) = excite(&ctx.plant, &exc, exc.n_samples)?;
    let path = ctx.path(EXCITATION_FILE);
    write_csv(&path, &[("u", &u), ("y", &y)])?;
    println!("wrote {} ({} samples)", path.display(), u.len());
    Ok(Outcome::Done)
}
