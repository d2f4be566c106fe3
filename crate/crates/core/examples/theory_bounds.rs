//! The bound calculators on hand-picked constants.

use subzero::engine::{
    consensus_bound_h, regret_bound, theorem3_asymptotic, theorem3_error_bound, StepSchedule, TheoryConstants,
};
use subzero::game::Side;

fn main() -> subzero::Result<()> {
    let c = TheoryConstants {
        n: [5, 5],
        lip_own: [1.0, 1.0],
        lip_other: [1.0, 1.0],
        sigma: [1.0, 1.0],
        gamma: [1.02, 1.02],
        theta: [0.99, 0.99],
        lambda: [1.0, 1.0],
        upsilon: [10f64.ln().sqrt(), 15f64.ln().sqrt()],
    };
    for kappa in [0.5, 2.0 / 3.0, 0.75] {
        let steps = StepSchedule::power(kappa)?;
        let per_round: Vec<String> = [100usize, 1000, 10_000]
            .iter()
            .map(|&t| format!("{:.1}", regret_bound(&c, Side::One, &steps, t) / t as f64))
            .collect();
        println!("κ = {kappa:.3}: bound/T at 1e2, 1e3, 1e4 = {}", per_round.join(", "));
        println!("  H_1(1000) = {:.4}", consensus_bound_h(&c, Side::One, 1000, &steps)?);
    }
    for alpha in [0.1, 0.05, 0.025] {
        println!(
            "α = {alpha}: error bound at t = 1e4 {:.3}, limit {:.3}",
            theorem3_error_bound(&c, alpha, 10_000)?,
            theorem3_asymptotic(&c, alpha)
        );
    }
    Ok(())
}
