use anyhow::{bail, Context as _, Result};
use dpc_core::closed_loop::{measured_outputs, ControllerKind};
use dpc_core::ocp::{build_deepc_qp, build_tpc_qp, refresh_qp, QpProblem};
use dpc_core::predictors::{build_deepc_data, fit_single_arx, fit_transient_predictor};
use dpc_core::qpsolver::{setup, SolveStatus, SolverSettings};
use dpc_core::signals::{interleave, Trajectory};
use dpc_core::Vector;

use super::{distribution, Context, Outcome};

/// Interleaved past windows starting at `0..count`.
fn windows(z: &Trajectory, tau_p: usize, count: usize) -> Result<Vec<Vector>> {
    if z.len() < tau_p + count {
        bail!(
            "excitation record has {} samples, the bench needs {}",
            z.len(),
            tau_p + count
        );
    }
    let data = z.as_matrix();
    Ok((0..count)
        .map(|t| Vector::from_iterator(data.nrows() * tau_p, data.columns(t, tau_p).iter().copied()))
        .collect())
}

fn problem(ctx: &Context, kind: ControllerKind, tau_f: usize, u: &Trajectory, y: &Trajectory) -> Result<QpProblem> {
    let m = ctx.plant.inputs();
    let table = match kind {
        ControllerKind::Tpc | ControllerKind::SingleArx => &ctx.cfg.tpc,
        ControllerKind::DeePC => &ctx.cfg.deepc,
        other => bail!("bench times QP controllers only, `{other}` has no solver"),
    };
    let mut table = table.clone();
    table.tau_f = tau_f;
    let cfg = table.hankel()?;
    let (w, b) = (table.weights()?, table.bounds(m)?);
    let z0 = Vector::zeros((ctx.plant.outputs() + m) * cfg.tau_p);
    Ok(match kind {
        ControllerKind::Tpc => build_tpc_qp(&fit_transient_predictor(u, y, cfg)?, &w, &b, &z0)?,
        ControllerKind::SingleArx => build_tpc_qp(&fit_single_arx(u, y, cfg)?, &w, &b, &z0)?,
        _ => build_deepc_qp(&build_deepc_data(u, y, cfg)?, &w, &b, &z0)?,
    })
}

pub fn run(ctx: &Context) -> Result<Outcome> {
    let (u, y) = ctx.load_excitation()?;
    let y = measured_outputs(&y, ctx.cfg.filter(ctx.plant.ts))?;
    let z = interleave(&y, &u)?;
    let bench = &ctx.cfg.bench;
    let settings = SolverSettings::default();
    let path = ctx.path("bench.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record([
        "controller",
        "tau_f",
        "phase",
        "min_ms",
        "median_ms",
        "p95_ms",
        "max_ms",
        "iters_median",
    ])?;
    for &kind in &bench.controllers {
        for &tau_f in &bench.tau_f {
            let mut qp = problem(ctx, kind, tau_f, &u, &y)?;
            let mut setup_ms = Vec::new();
            for _ in 0..bench.setup_repeats.max(1) {
                setup_ms.push(setup(&qp, settings)?.setup_time().as_secs_f64() * 1e3);
            }
            let pasts = windows(&z, qp.tau_p, bench.solves + 1)?;
            let mut solver = setup(&qp, settings)?;
            let (mut solve_ms, mut iters, mut failed) = (Vec::new(), Vec::new(), 0);
            for (k, past) in pasts.iter().enumerate() {
                refresh_qp(&mut qp, past)?;
                solver.update_from_qp(&qp)?;
                let sol = solver.solve();
                failed += usize::from(sol.status != SolveStatus::Solved);
                // the first solve primes the warm start and is not timed
                if k > 0 {
                    solve_ms.push(sol.stats.solve_ms());
                    iters.push(sol.stats.iterations as f64);
                }
            }
            if failed > 0 {
                eprintln!("warning: {kind} at tau_f={tau_f}: {failed} solves did not converge");
            }
            let (_, iters_median, _, _) = distribution(&iters);
            for (phase, sample, it) in [("setup", &setup_ms, 0.0), ("solve", &solve_ms, iters_median)] {
                let (min, median, p95, max) = distribution(sample);
                w.write_record([
                    kind.name().to_string(),
                    tau_f.to_string(),
                    phase.to_string(),
                    format!("{min:.4}"),
                    format!("{median:.4}"),
                    format!("{p95:.4}"),
                    format!("{max:.4}"),
                    format!("{it}"),
                ])?;
            }
            println!(
                "{kind:<11} tau_f {tau_f:>3}  n_dec {:>4}  solve median {:.3} ms over {} solves",
                qp.n_dec(),
                distribution(&solve_ms).1,
                solve_ms.len()
            );
        }
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(Outcome::Done)
}
