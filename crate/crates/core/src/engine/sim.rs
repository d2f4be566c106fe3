use nalgebra::DMatrix;
use serde::Serialize;

use super::StepSchedule;
use crate::error::{Error, Result};
use crate::game::{local_gradient, ActionDomain, Side, SubnetworkZeroSumGame, SIMPLEX_TOL};
use crate::geometry::{mirror_step, BregmanGeometry};
use crate::network::CommunicationSchedule;

/// Full per-round snapshots are kept up to this horizon; beyond it the
/// default snapshot stride grows so that about this many are kept.
pub const FULL_TRACE_LIMIT: usize = 10_000;

/// States of every agent at round `t`.
///
/// `u[l][i]` is agent `i` of side `l`'s estimate of the opposing side's action.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundState {
    pub t: usize,
    pub x: [Vec<Vec<f64>>; 2],
    pub v: [Vec<Vec<f64>>; 2],
    pub u: [Vec<Vec<f64>>; 2],
}

/// Measured consensus errors of one side at one round, in the side's primal norm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsensusRecord {
    /// `‖x_i − x̄‖` per agent.
    pub x: Vec<f64>,
    /// `max_i ‖x̄ − v_i‖`.
    pub v: f64,
    /// `max ‖x̄ − u‖` over the opposing agents' estimates of this side.
    pub u: f64,
}

impl ConsensusRecord {
    pub fn x_max(&self) -> f64 {
        self.x.iter().fold(0.0, |m, &v| m.max(v))
    }
}

/// Running averages of every agent at round `t` (built from `x(0..t)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageSnapshot {
    pub t: usize,
    /// `(1/t) Σ_{s<t} x(s)`.
    pub uniform: [Vec<Vec<f64>>; 2],
    /// `Σ_{s<t} α(s) x(s) / Σ_{s<t} α(s)`.
    pub weighted: [Vec<Vec<f64>>; 2],
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Initial points per side and agent; domain centers when absent.
    pub initial: Option<[Vec<Vec<f64>>; 2]>,
    /// Snapshot and average stride; see [`FULL_TRACE_LIMIT`] for the default.
    pub stride: Option<usize>,
}

/// Everything a run produced.
///
/// Per-round series (`costs`, `estimates`, `consensus`, `alphas`) are
/// indexed by `t = 0..=T`; snapshots and averages are strided.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub horizon: usize,
    pub stride: usize,
    pub agents: [usize; 2],
    pub dims: [usize; 2],
    pub geometries: [BregmanGeometry; 2],
    pub initial: [Vec<Vec<f64>>; 2],
    pub snapshots: Vec<RoundState>,
    pub averages: Vec<AverageSnapshot>,
    /// `costs[l][t][i] = f_l(x_{l,i}(t), u_{l,i}(t))` with `f_1 = U`, `f_2 = −U`.
    pub costs: [Vec<Vec<f64>>; 2],
    /// `estimates[l][t]`: agent-major flattened estimates of the opponent held by side `l`.
    pub estimates: [Vec<Vec<f64>>; 2],
    pub consensus: [Vec<ConsensusRecord>; 2],
    /// `α(t)` for `t = 0..T`.
    pub alphas: Vec<f64>,
}

impl SimulationTrace {
    /// Opponent estimate held by agent `i` of `side` at round `t`.
    pub fn estimate(&self, side: Side, t: usize, agent: usize) -> &[f64] {
        let m = self.dims[side.other().index()];
        &self.estimates[side.index()][t][agent * m..(agent + 1) * m]
    }

    pub fn snapshot(&self, t: usize) -> Option<&RoundState> {
        self.snapshots
            .binary_search_by_key(&t, |s| s.t)
            .ok()
            .map(|k| &self.snapshots[k])
    }

    pub fn average(&self, t: usize) -> Option<&AverageSnapshot> {
        self.averages
            .binary_search_by_key(&t, |s| s.t)
            .ok()
            .map(|k| &self.averages[k])
    }

    /// Rounds `stride, 2·stride, …` plus the horizon.
    pub fn stride_points(&self) -> Vec<usize> {
        stride_points(self.horizon, self.stride)
    }
}

fn stride_points(horizon: usize, stride: usize) -> Vec<usize> {
    let mut pts: Vec<usize> = (1..=horizon / stride).map(|k| k * stride).collect();
    if pts.last() != Some(&horizon) && horizon > 0 {
        pts.push(horizon);
    }
    pts
}

pub fn default_stride(horizon: usize) -> usize {
    horizon.div_ceil(FULL_TRACE_LIMIT).max(1)
}

fn mix(w: &DMatrix<f64>, states: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = states[0].len();
    (0..w.nrows())
        .map(|i| {
            let mut acc = vec![0.0; dim];
            for (j, s) in states.iter().enumerate() {
                let wij = w[(i, j)];
                if wij != 0.0 {
                    acc.iter_mut().zip(s).for_each(|(a, b)| *a += wij * b);
                }
            }
            acc
        })
        .collect()
}

fn mean(states: &[Vec<f64>]) -> Vec<f64> {
    let mut acc = vec![0.0; states[0].len()];
    for s in states {
        acc.iter_mut().zip(s).for_each(|(a, b)| *a += b);
    }
    let n = states.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

fn check_initial(
    game: &SubnetworkZeroSumGame,
    schedule: &CommunicationSchedule,
    initial: &[Vec<Vec<f64>>; 2],
) -> Result<()> {
    for side in Side::BOTH {
        let l = side.index();
        if game.agents(side) != schedule.n(side) {
            return Err(Error::Construction(format!(
                "side {side}: game has {} agents, network {}",
                game.agents(side),
                schedule.n(side)
            )));
        }
        if initial[l].len() != game.agents(side) {
            return Err(Error::Construction(format!(
                "side {side}: {} initial points for {} agents",
                initial[l].len(),
                game.agents(side)
            )));
        }
        for x in &initial[l] {
            game.domain(side).check(x, SIMPLEX_TOL)?;
        }
    }
    Ok(())
}

/// Runs `T` synchronous rounds of distributed mirror descent.
///
/// Round `t` mixes `v = W_l(t) x_l` and `u = W_cross(t) x_opp`, records the
/// played costs and consensus errors, then (for `t < T`) steps every agent
/// with its local gradient at `(v, u)` and step `α(t)`. Entropy geometry on
/// both sides is the multiplicative-weights variant.
pub fn run(
    game: &SubnetworkZeroSumGame,
    geometries: [BregmanGeometry; 2],
    schedule: &CommunicationSchedule,
    steps: &StepSchedule,
    horizon: usize,
    options: &RunOptions,
) -> Result<SimulationTrace> {
    steps.validate()?;
    let initial = options.initial.clone().unwrap_or_else(|| {
        [Side::One, Side::Two].map(|s| vec![game.domain(s).center(); game.agents(s)])
    });
    check_initial(game, schedule, &initial)?;
    let stride = options.stride.unwrap_or_else(|| default_stride(horizon));
    if stride == 0 {
        return Err(Error::Parameter("stride must be positive".into()));
    }
    let agents = [game.agents(Side::One), game.agents(Side::Two)];
    let dims = [game.domain(Side::One).dim(), game.domain(Side::Two).dim()];
    let norms = geometries.map(|g| g.norm());
    let domains: [&ActionDomain; 2] = [game.domain(Side::One), game.domain(Side::Two)];

    let mut x = initial.clone();
    let mut trace = SimulationTrace {
        horizon,
        stride,
        agents,
        dims,
        geometries,
        initial: initial.clone(),
        snapshots: Vec::new(),
        averages: Vec::new(),
        costs: [Vec::with_capacity(horizon + 1), Vec::with_capacity(horizon + 1)],
        estimates: [Vec::with_capacity(horizon + 1), Vec::with_capacity(horizon + 1)],
        consensus: [Vec::with_capacity(horizon + 1), Vec::with_capacity(horizon + 1)],
        alphas: Vec::with_capacity(horizon),
    };
    let mut uniform = [
        vec![vec![0.0; dims[0]]; agents[0]],
        vec![vec![0.0; dims[1]]; agents[1]],
    ];
    let mut weighted = uniform.clone();
    let mut weight_total = 0.0;

    for t in 0..=horizon {
        let mats = schedule.select(t);
        let v = [mix(mats.intra[0], &x[0]), mix(mats.intra[1], &x[1])];
        let u = [mix(mats.cross[0], &x[1]), mix(mats.cross[1], &x[0])];

        for side in Side::BOTH {
            let l = side.index();
            let o = side.other().index();
            let bar = mean(&x[l]);
            let dev = |p: &Vec<f64>| norms[l].distance(p, &bar);
            trace.consensus[l].push(ConsensusRecord {
                x: x[l].iter().map(dev).collect(),
                v: v[l].iter().map(dev).fold(0.0, f64::max),
                u: u[o].iter().map(dev).fold(0.0, f64::max),
            });
            let played: Vec<f64> = (0..agents[l])
                .map(|i| match side {
                    Side::One => game.side_cost(side, &x[l][i], &u[l][i]),
                    Side::Two => game.side_cost(side, &u[l][i], &x[l][i]),
                })
                .collect();
            trace.costs[l].push(played);
            trace.estimates[l].push(u[l].concat());
        }

        if t % stride == 0 || t == horizon {
            trace.snapshots.push(RoundState {
                t,
                x: x.clone(),
                v: v.clone(),
                u: u.clone(),
            });
        }
        if t == horizon {
            break;
        }

        let alpha = steps.alpha(t);
        trace.alphas.push(alpha);
        let tf = t as f64;
        weight_total += alpha;
        for l in 0..2 {
            for (i, xi) in x[l].iter().enumerate() {
                let ua = &mut uniform[l][i];
                ua.iter_mut()
                    .zip(xi)
                    .for_each(|(a, b)| *a = (tf * *a + b) / (tf + 1.0));
                let wa = &mut weighted[l][i];
                wa.iter_mut()
                    .zip(xi)
                    .for_each(|(a, b)| *a += alpha / weight_total * (b - *a));
            }
        }
        let next = t + 1;
        if next % stride == 0 || next == horizon {
            trace.averages.push(AverageSnapshot {
                t: next,
                uniform: uniform.clone(),
                weighted: weighted.clone(),
            });
        }

        let mut stepped: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
        for side in Side::BOTH {
            let l = side.index();
            for i in 0..agents[l] {
                let cost = game.costs(side)[i].as_ref();
                let g = local_gradient(cost, side, &v[l][i], &u[l][i]);
                let xi = mirror_step(geometries[l], domains[l], &v[l][i], &g, alpha)
                    .map_err(|e| match e {
                        Error::OutsideDomain { .. } => {
                            Error::Internal(format!("round {t}, side {side}, agent {i}: {e}"))
                        }
                        other => other,
                    })?;
                if domains[l].check(&xi, SIMPLEX_TOL).is_err() {
                    return Err(Error::Internal(format!(
                        "round {t}, side {side}, agent {i}: step left the domain"
                    )));
                }
                stepped[l].push(xi);
            }
        }
        x = stepped;
    }
    Ok(trace)
}
