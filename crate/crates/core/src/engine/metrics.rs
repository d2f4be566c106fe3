use serde::Serialize;

use super::sim::SimulationTrace;
use super::theory::{consensus_bound_series, theorem1_bound_series, TheoryConstants};
use super::StepSchedule;
use crate::error::{Error, Result};
use crate::game::{argmax, argmin, GameClass, Norm, Side, SubnetworkZeroSumGame};
use crate::oracles::{certified_min_from, certified_min_over_domain, MinimizeOptions, NeCertificate};

/// Inner tolerance used when a smooth game's gap is certified numerically.
pub const GAP_ORACLE_TOL: f64 = 1e-10;

fn no_oracle(what: &str) -> Error {
    Error::Capability(format!("{what} needs a minimization oracle; opaque games provide none"))
}

/// `max_y U(x1, y) − min_x U(x, x2)`.
///
/// Exact for multilinear games. For smooth games both inner problems are
/// solved by the certified minimizer and their residuals are added, so the
/// returned value is an upper bound on the true gap.
pub fn gap(game: &SubnetworkZeroSumGame, x1: &[f64], x2: &[f64]) -> Result<f64> {
    gap_with(game, x1, x2, &MinimizeOptions { tol: GAP_ORACLE_TOL, ..Default::default() })
}

pub(crate) fn gap_with(
    game: &SubnetworkZeroSumGame,
    x1: &[f64],
    x2: &[f64],
    options: &MinimizeOptions,
) -> Result<f64> {
    game.check_profile(x1, x2)?;
    match game.class() {
        GameClass::Multilinear(m) => {
            let a = m.mean_matrix(Side::One);
            let best_reply = crate::game::mat_t_vec(a, x1);
            let best_own = crate::game::mat_vec(a, x2);
            Ok(best_reply[argmax(&best_reply)] - best_own[argmin(&best_own)])
        }
        GameClass::Smooth => {
            let own = certified_min_over_domain(
                |x| game.side_cost(Side::One, x, x2),
                |x| game.side_gradient(Side::One, x, x2),
                game.domain(Side::One),
                options,
            )?;
            // Side two's cost is −U, so its minimum is −max_y U.
            let reply = certified_min_over_domain(
                |y| game.side_cost(Side::Two, x1, y),
                |y| game.side_gradient(Side::Two, x1, y),
                game.domain(Side::Two),
                options,
            )?;
            Ok((-reply.value + reply.residual) - (own.value - own.residual))
        }
        GameClass::Opaque => Err(no_oracle("the gap function")),
    }
}

fn check_agent(trace: &SimulationTrace, side: Side, agent: usize, horizon: usize) -> Result<()> {
    if agent >= trace.agents[side.index()] {
        return Err(Error::Parameter(format!("side {side} has no agent {agent}")));
    }
    if horizon > trace.horizon {
        return Err(Error::Parameter(format!(
            "trace covers {} rounds, asked for {horizon}",
            trace.horizon
        )));
    }
    Ok(())
}

/// Regret of agent `agent` of `side` over rounds `1..=T`: played cost minus
/// the best fixed action against the same opponent-estimate sequence.
pub fn regret(
    trace: &SimulationTrace,
    game: &SubnetworkZeroSumGame,
    side: Side,
    agent: usize,
    horizon: usize,
) -> Result<f64> {
    Ok(regret_series(trace, game, side, agent, &[horizon])?[0])
}

/// [`regret`] at each of the increasing rounds in `points`.
pub fn regret_series(
    trace: &SimulationTrace,
    game: &SubnetworkZeroSumGame,
    side: Side,
    agent: usize,
    points: &[usize],
) -> Result<Vec<f64>> {
    let last = points.last().copied().unwrap_or(0);
    check_agent(trace, side, agent, last)?;
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Parameter("regret points must be nondecreasing".into()));
    }
    let l = side.index();
    let opp_dim = trace.dims[side.other().index()];
    let mut out = Vec::with_capacity(points.len());
    match game.class() {
        GameClass::Multilinear(m) => {
            let mut played = 0.0;
            let mut u_sum = vec![0.0; opp_dim];
            let mut t = 0;
            for &p in points {
                while t < p {
                    t += 1;
                    played += trace.costs[l][t][agent];
                    u_sum
                        .iter_mut()
                        .zip(trace.estimate(side, t, agent))
                        .for_each(|(a, b)| *a += b);
                }
                let pure = m.pure_costs(side, &u_sum);
                out.push(played - pure[argmin(&pure)]);
            }
        }
        GameClass::Smooth => {
            let mut warm: Vec<Vec<f64>> = Vec::new();
            for &p in points {
                if p == 0 {
                    out.push(0.0);
                    continue;
                }
                let played: f64 = (1..=p).map(|t| trace.costs[l][t][agent]).sum();
                let arrange = |x: &[f64], t: usize| -> (Vec<f64>, Vec<f64>) {
                    let u = trace.estimate(side, t, agent).to_vec();
                    match side {
                        Side::One => (x.to_vec(), u),
                        Side::Two => (u, x.to_vec()),
                    }
                };
                let f = |x: &[f64]| -> f64 {
                    (1..=p)
                        .map(|t| {
                            let (a, b) = arrange(x, t);
                            game.side_cost(side, &a, &b)
                        })
                        .sum()
                };
                let grad = |x: &[f64]| -> Vec<f64> {
                    let mut acc = vec![0.0; x.len()];
                    for t in 1..=p {
                        let (a, b) = arrange(x, t);
                        acc.iter_mut()
                            .zip(game.side_gradient(side, &a, &b))
                            .for_each(|(s, g)| *s += g);
                    }
                    acc
                };
                let options = MinimizeOptions {
                    tol: 1e-9 * (p as f64).max(1.0),
                    starts: if warm.is_empty() { 5 } else { 1 },
                    ..Default::default()
                };
                let best = certified_min_from(f, grad, game.domain(side), &options, &warm)?;
                out.push(played - (best.value - best.residual));
                warm = vec![best.point];
            }
        }
        GameClass::Opaque => return Err(no_oracle("regret")),
    }
    Ok(out)
}

/// One line of the metrics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub t: usize,
    pub side: Side,
    pub agent: usize,
    /// `R(t)/t`.
    pub avg_regret: f64,
    /// `‖x_i(t) − x̄(t)‖` in the side's primal norm.
    pub consensus_err: f64,
    /// Euclidean distance of `x_i(t)` to the certified equilibrium.
    pub dist_to_ne: Option<f64>,
    /// Gap at the step-weighted averages of this agent and its paired opponent.
    pub gap_avg: f64,
    /// Regret bound divided by `t`.
    pub t1_bound_avg: f64,
    /// `H_l(t)`.
    pub h_bound: f64,
}

/// Computes a [`MetricRow`] per stride point, side and agent.
///
/// The gap pairs agent `i` with opponent agent `i mod n_other`. The NE
/// distance uses the certificate's final iterate when one is reported.
pub fn compute_metric_rows(
    trace: &SimulationTrace,
    game: &SubnetworkZeroSumGame,
    constants: &TheoryConstants,
    steps: &StepSchedule,
    certificate: Option<&NeCertificate>,
) -> Result<Vec<MetricRow>> {
    let points = trace.stride_points();
    let horizon = trace.horizon;
    let mut regrets: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    let mut h: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut bounds: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for side in Side::BOTH {
        let l = side.index();
        for i in 0..trace.agents[l] {
            regrets[l].push(regret_series(trace, game, side, i, &points)?);
        }
        h[l] = consensus_bound_series(constants, side, steps, horizon);
        bounds[l] = theorem1_bound_series(constants, side, steps, horizon);
    }
    let reference = certificate.map(|c| c.reference_point());

    let mut rows = Vec::new();
    for (k, &t) in points.iter().enumerate() {
        let avg = trace
            .average(t)
            .ok_or_else(|| Error::Internal(format!("no running average at t = {t}")))?;
        let snap = trace
            .snapshot(t)
            .ok_or_else(|| Error::Internal(format!("no snapshot at t = {t}")))?;
        for side in Side::BOTH {
            let l = side.index();
            let n_other = trace.agents[1 - l];
            for i in 0..trace.agents[l] {
                let j = i % n_other;
                let (x1, x2) = match side {
                    Side::One => (&avg.weighted[0][i], &avg.weighted[1][j]),
                    Side::Two => (&avg.weighted[0][j], &avg.weighted[1][i]),
                };
                rows.push(MetricRow {
                    t,
                    side,
                    agent: i,
                    avg_regret: regrets[l][i][k] / t as f64,
                    consensus_err: trace.consensus[l][t].x[i],
                    dist_to_ne: reference.map(|r| Norm::L2.distance(&snap.x[l][i], r[l])),
                    gap_avg: gap(game, x1, x2)?,
                    t1_bound_avg: bounds[l][t] / t as f64,
                    h_bound: h[l][t - 1],
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunOptions};
    use crate::game::{matching_pennies, matrix_game, MultilinearGame};
    use crate::geometry::BregmanGeometry;
    use crate::network::{CommunicationSchedule, CrossMode, UndirectedGraph};
    use nalgebra::DMatrix;

    fn single() -> CommunicationSchedule {
        let g = UndirectedGraph::complete(1);
        CommunicationSchedule::fixed(&g, &g, CrossMode::Pairing).unwrap()
    }

    #[test]
    fn gap_examples() {
        let mp = matching_pennies();
        assert_eq!(gap(&mp, &[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(gap(&mp, &[1.0, 0.0], &[1.0, 0.0]).unwrap(), 2.0);
        let zero = matrix_game(DMatrix::zeros(3, 4)).unwrap();
        assert_eq!(gap(&zero, &[0.2, 0.3, 0.5], &[0.25; 4]).unwrap(), 0.0);
        assert!(gap(&mp, &[1.5, -0.5], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn regret_of_zero_game_is_zero() {
        let zero = MultilinearGame::new(vec![DMatrix::zeros(3, 2); 2], vec![DMatrix::zeros(3, 2); 2])
            .unwrap()
            .into_game()
            .unwrap();
        let g = UndirectedGraph::complete(2);
        let sched = CommunicationSchedule::fixed(&g, &g, CrossMode::Pairing).unwrap();
        let steps = StepSchedule::power(0.5).unwrap();
        let geoms = [BregmanGeometry::Entropy; 2];
        let trace = run(&zero, geoms, &sched, &steps, 20, &RunOptions::default()).unwrap();
        for side in Side::BOTH {
            for i in 0..2 {
                for t in [1, 7, 20] {
                    assert_eq!(regret(&trace, &zero, side, i, t).unwrap(), 0.0);
                }
            }
        }
        // Iterates stay at the uniform start.
        for s in &trace.snapshots {
            assert!(s.x[0].iter().all(|x| x.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15)));
        }
    }

    #[test]
    fn one_round_regret_by_enumeration() {
        let a = DMatrix::from_row_slice(3, 2, &[0.4, -0.2, 0.1, 0.9, -0.5, 0.3]);
        let game = matrix_game(a.clone()).unwrap();
        let steps = StepSchedule::constant(0.3).unwrap();
        let trace = run(&game, [BregmanGeometry::Entropy; 2], &single(), &steps, 1, &RunOptions::default())
            .unwrap();
        let x = &trace.snapshot(1).unwrap().x;
        let u = trace.estimate(Side::One, 1, 0);
        let played: f64 = (0..3).map(|p| (0..2).map(|q| x[0][0][p] * a[(p, q)] * u[q]).sum::<f64>()).sum();
        let best = (0..3)
            .map(|p| (0..2).map(|q| a[(p, q)] * u[q]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let r = regret(&trace, &game, Side::One, 0, 1).unwrap();
        assert!((r - (played - best)).abs() < 1e-15);
    }

    #[test]
    fn single_agents_match_centralized_gradient_play() {
        let a = DMatrix::from_row_slice(3, 3, &[0.3, -0.8, 0.5, 0.1, 0.4, -0.6, -0.2, 0.7, 0.2]);
        let game = matrix_game(a.clone()).unwrap();
        let steps = StepSchedule::power(0.6).unwrap();
        let geoms = [BregmanGeometry::Euclidean; 2];
        let init = [vec![vec![0.6, 0.3, 0.1]], vec![vec![0.2, 0.2, 0.6]]];
        let opts = RunOptions { initial: Some(init.clone()), stride: Some(1) };
        let trace = run(&game, geoms, &single(), &steps, 100, &opts).unwrap();

        let project = |y: Vec<f64>| crate::game::ActionDomain::simplex(3).unwrap().project(&y);
        let (mut x, mut y) = (init[0][0].clone(), init[1][0].clone());
        for t in 0..100 {
            let al = steps.alpha(t);
            let gx = crate::game::mat_vec(&a, &y);
            let gy = crate::game::mat_t_vec(&a, &x);
            let nx = project(x.iter().zip(&gx).map(|(p, g)| p - al * g).collect());
            let ny = project(y.iter().zip(&gy).map(|(p, g)| p + al * g).collect());
            x = nx;
            y = ny;
            let s = trace.snapshot(t + 1).unwrap();
            assert!(Norm::L2.distance(&s.x[0][0], &x) <= 1e-12);
            assert!(Norm::L2.distance(&s.x[1][0], &y) <= 1e-12);
        }
    }

    #[test]
    fn matching_pennies_from_uniform_stays_at_equilibrium() {
        let game = matching_pennies();
        let steps = StepSchedule::power(0.6).unwrap();
        let trace = run(&game, [BregmanGeometry::Entropy; 2], &single(), &steps, 10_000, &RunOptions::default())
            .unwrap();
        let avg = trace.average(10_000).unwrap();
        assert!(Norm::L1.distance(&avg.weighted[0][0], &[0.5, 0.5]) <= 1e-2);
        assert_eq!(gap(&game, &avg.weighted[0][0], &avg.weighted[1][0]).unwrap(), 0.0);
    }

    #[test]
    fn matching_pennies_weighted_averages_approach_equilibrium() {
        // From an off-center start the weighted averages contract at roughly
        // (KL + Σα²)/Σα, about 0.04 at T = 10⁴ for κ = 0.6.
        let game = matching_pennies();
        let steps = StepSchedule::power(0.6).unwrap();
        let init = [vec![vec![0.8, 0.2]], vec![vec![0.3, 0.7]]];
        let opts = RunOptions { initial: Some(init), stride: None };
        let trace = run(&game, [BregmanGeometry::Entropy; 2], &single(), &steps, 10_000, &opts).unwrap();
        let gaps: Vec<f64> = [100, 1_000, 10_000]
            .iter()
            .map(|&t| {
                let avg = trace.average(t).unwrap();
                gap(&game, &avg.weighted[0][0], &avg.weighted[1][0]).unwrap()
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        assert!(gaps[2] <= 5e-2);
        let avg = trace.average(10_000).unwrap();
        assert!(Norm::L1.distance(&avg.weighted[0][0], &[0.5, 0.5]) <= 5e-2);
    }

    #[test]
    fn smooth_gap_at_equilibrium_is_small_and_positive_elsewhere() {
        let game = crate::game::build_power_allocation_game();
        let u = [1.0 / 3.0; 3];
        assert!(gap(&game, &u, &u).unwrap() > 1e-3);
    }
}
