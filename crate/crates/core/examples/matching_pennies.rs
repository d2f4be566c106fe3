//! Multiplicative weights on matching pennies from an off-center start:
//! the step-weighted averages close in on the mixed equilibrium.

use subzero::engine::{gap, run, RunOptions, StepSchedule};
use subzero::game::matching_pennies;
use subzero::geometry::BregmanGeometry;
use subzero::network::{CommunicationSchedule, CrossMode, UndirectedGraph};

fn main() -> subzero::Result<()> {
    let game = matching_pennies();
    let one = UndirectedGraph::complete(1);
    let schedule = CommunicationSchedule::fixed(&one, &one, CrossMode::Pairing)?;
    let options = RunOptions {
        initial: Some([vec![vec![0.8, 0.2]], vec![vec![0.3, 0.7]]]),
        stride: Some(1),
    };
    let trace = run(&game, [BregmanGeometry::Entropy; 2], &schedule, &StepSchedule::power(0.6)?, 10_000, &options)?;
    for t in [10, 100, 1000, 10_000] {
        let avg = trace.average(t).expect("stride 1 keeps every round");
        let (x1, x2) = (&avg.weighted[0][0], &avg.weighted[1][0]);
        println!("t = {t:>5}: averages {x1:.4?} / {x2:.4?}, gap {:.3e}", gap(&game, x1, x2)?);
    }
    Ok(())
}
