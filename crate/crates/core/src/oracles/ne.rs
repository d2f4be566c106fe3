use serde::{Deserialize, Serialize};

use crate::engine::{gap_with, GAP_ORACLE_TOL};
use crate::error::{Error, Result};
use crate::game::{Side, SubnetworkZeroSumGame};
use crate::geometry::{mirror_step, BregmanGeometry};
use crate::oracles::MinimizeOptions;

/// A certified approximate Nash equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeCertificate {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    /// `U(x1, x2)`.
    pub value: f64,
    /// Certified upper bound on the gap at `(x1, x2)`.
    pub gap: f64,
    pub iterations: usize,
    pub tol: f64,
    /// Last iterate of the solver, reported for strictly convex-concave games.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_iterate: Option<[Vec<f64>; 2]>,
}

impl NeCertificate {
    /// The certified point, per side.
    pub fn reference_point(&self) -> [&[f64]; 2] {
        [&self.x1, &self.x2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Iterations between gap evaluations.
    pub check_every: usize,
}

impl Default for NeOptions {
    fn default() -> Self {
        NeOptions {
            tol: 1e-6,
            max_iters: 200_000,
            check_every: 25,
        }
    }
}

// Step acceptance: α ‖F(y) − F(x)‖_* ≤ ACCEPT ‖y − x‖.
const ACCEPT: f64 = 0.7;
const MIN_STEP: f64 = 1e-14;

/// Centralized mirror-prox on `U` with both sides' geometries.
///
/// Each iteration takes a mirror step to a leading point `y` and then a
/// second step from `x` using the operator at `y`; the step halves until
/// the local Lipschitz test passes. The gap is certified every
/// `check_every` iterations at the current iterate and at the
/// step-weighted average of the leading points, and the best of these is
/// returned once it is within `tol`. Whenever the best gap has halved the
/// iteration restarts from the best point with a fresh average.
pub fn solve_ne_centralized(
    game: &SubnetworkZeroSumGame,
    geometries: [BregmanGeometry; 2],
    tol: f64,
    max_iters: usize,
) -> Result<NeCertificate> {
    solve_ne_with(game, geometries, &NeOptions { tol, max_iters, ..Default::default() })
}

/// [`solve_ne_centralized`] with explicit options.
///
/// The equilibrium does not depend on the geometry, so when a pair other
/// than Euclidean/Euclidean fails to certify, the solve is repeated once
/// with Euclidean steps. Entropy steps can orbit equilibria lying close to
/// the simplex boundary and then only reach the slow ergodic rate.
pub fn solve_ne_with(
    game: &SubnetworkZeroSumGame,
    geometries: [BregmanGeometry; 2],
    options: &NeOptions,
) -> Result<NeCertificate> {
    let euclidean = [BregmanGeometry::Euclidean; 2];
    match mirror_prox(game, geometries, options) {
        Err(Error::CertificateFailure { best_gap, .. }) if geometries != euclidean => {
            match mirror_prox(game, euclidean, options) {
                Err(Error::CertificateFailure { best_gap: other, tol }) => Err(Error::CertificateFailure {
                    best_gap: best_gap.min(other),
                    tol,
                }),
                result => result,
            }
        }
        result => result,
    }
}

fn mirror_prox(
    game: &SubnetworkZeroSumGame,
    geometries: [BregmanGeometry; 2],
    options: &NeOptions,
) -> Result<NeCertificate> {
    if !(options.tol > 0.0) || options.max_iters == 0 || options.check_every == 0 {
        return Err(Error::Parameter("need tol > 0, max_iters ≥ 1, check_every ≥ 1".into()));
    }
    let inner = MinimizeOptions {
        tol: GAP_ORACLE_TOL.min(options.tol * 1e-2),
        ..Default::default()
    };
    let domains = [game.domain(Side::One), game.domain(Side::Two)];
    let operator = |x: &[Vec<f64>; 2]| {
        [
            game.side_gradient(Side::One, &x[0], &x[1]),
            game.side_gradient(Side::Two, &x[0], &x[1]),
        ]
    };
    let step = |x: &[Vec<f64>; 2], g: &[Vec<f64>; 2], alpha: f64| -> Result<[Vec<f64>; 2]> {
        Ok([
            mirror_step(geometries[0], domains[0], &x[0], &g[0], alpha)?,
            mirror_step(geometries[1], domains[1], &x[1], &g[1], alpha)?,
        ])
    };

    let mut x = [domains[0].center(), domains[1].center()];
    let mut avg = x.clone();
    let mut weight = 0.0;
    let mut alpha = 1.0;
    let mut best: Option<(f64, [Vec<f64>; 2])> = None;
    let mut iterations = 0;
    let mut restart_gap = f64::INFINITY;

    while iterations < options.max_iters {
        iterations += 1;
        let fx = operator(&x);
        let (y, fy) = loop {
            let y = step(&x, &fx, alpha)?;
            let fy = operator(&y);
            let mut dual = 0.0;
            let mut primal = 0.0;
            for l in 0..2 {
                let norm = geometries[l].norm();
                let diff: Vec<f64> = fy[l].iter().zip(&fx[l]).map(|(a, b)| a - b).collect();
                dual += norm.dual_of(&diff).powi(2);
                primal += norm.distance(&y[l], &x[l]).powi(2);
            }
            if alpha * dual.sqrt() <= ACCEPT * primal.sqrt() {
                break (y, fy);
            }
            alpha *= 0.5;
            if alpha < MIN_STEP {
                return Err(Error::Internal("mirror-prox step collapsed".into()));
            }
        };
        x = step(&x, &fy, alpha)?;
        weight += alpha;
        for l in 0..2 {
            avg[l]
                .iter_mut()
                .zip(&y[l])
                .for_each(|(a, b)| *a += alpha / weight * (b - *a));
        }

        if iterations % options.check_every == 0 || iterations == options.max_iters {
            for cand in [&x, &avg] {
                let g = gap_with(game, &cand[0], &cand[1], &inner)?;
                if best.as_ref().is_none_or(|(b, _)| g < *b) {
                    best = Some((g, cand.clone()));
                }
            }
            let (b, point) = best.as_ref().expect("just evaluated");
            if *b <= options.tol {
                break;
            }
            // Restart from the best point once its gap has halved; the
            // average then forgets the early iterates.
            if *b <= 0.5 * restart_gap {
                restart_gap = *b;
                x = point.clone();
                avg = x.clone();
                weight = 0.0;
            }
        }
    }

    let (gap, point) = best.expect("at least one gap evaluation");
    if gap > options.tol {
        return Err(Error::CertificateFailure { best_gap: gap, tol: options.tol });
    }
    let [x1, x2] = point;
    Ok(NeCertificate {
        value: game.evaluate_global_cost(&x1, &x2)?,
        x1,
        x2,
        gap,
        iterations,
        tol: options.tol,
        final_iterate: game.is_strictly_convex_concave().then_some(x),
    })
}
