//! The desk-scale interdiction game: per-agent regret of the evaders
//! against the regret bound, and how far each side is from consensus.

use subzero::engine::{consensus_bound_series, regret_bound, regret_series, TheoryConstants};
use subzero::experiments::{preset, run_config};
use subzero::game::Side;

fn main() -> subzero::Result<()> {
    let mut cfg = preset("interdiction-desk").expect("shipped preset");
    cfg.horizon = 2000;
    let out = run_config(&cfg, None)?;
    let exp = &out.experiment;
    let trace = &out.trace;
    let c = TheoryConstants::from_run(&exp.game, exp.geometries, &exp.schedule, &trace.initial)?;

    let points = [10, 100, 1000, 2000];
    for i in 0..trace.agents[0] {
        let r = regret_series(trace, &exp.game, Side::One, i, &points)?;
        let avg: Vec<String> = points.iter().zip(&r).map(|(t, v)| format!("{:.2e}", v / *t as f64)).collect();
        println!("evader {i}: R(t)/t at {points:?} = [{}]", avg.join(", "));
    }
    println!("bound at T = {}: {:.3e}", trace.horizon, regret_bound(&c, Side::One, &exp.steps, trace.horizon));

    for side in Side::BOTH {
        let h = consensus_bound_series(&c, side, &exp.steps, trace.horizon);
        let rec = &trace.consensus[side.index()][trace.horizon];
        println!("side {side}: max ‖x_i − x̄‖ = {:.3e} against H = {:.3e}", rec.x_max(), h[trace.horizon - 1]);
    }
    println!("{}", out.summary());
    Ok(())
}
