//! Ground-truth providers: certified inner minimization, exact best
//! responses, brute-force and bisection prox solvers, and a centralized
//! equilibrium solver that certifies its answer with the gap function.

mod minimize;
mod ne;

pub use minimize::{certified_min_from, certified_min_over_domain, MinimizeOptions, Minimum};
pub use ne::{solve_ne_centralized, solve_ne_with, NeCertificate, NeOptions};

use crate::error::{Error, Result};
use crate::game::{argmin, ActionDomain, MultilinearGame, Side};
use crate::geometry::{bregman_divergence, BregmanGeometry};

/// Best pure action of `side` against a mixed opponent, as
/// `(index, own cost)`. Lowest index wins ties.
pub fn best_response_vertex(game: &MultilinearGame, side: Side, opponent: &[f64]) -> (usize, f64) {
    let costs = game.pure_costs(side, opponent);
    let k = argmin(&costs);
    (k, costs[k])
}

fn prox_objective(geom: BregmanGeometry, x: &[f64], v: &[f64], g: &[f64], alpha: f64) -> Result<f64> {
    let lin: f64 = g.iter().zip(x.iter().zip(v)).map(|(gi, (a, b))| gi * (a - b)).sum();
    Ok(lin + bregman_divergence(geom, x, v)? / alpha)
}

/// Grid search of `⟨g, x − v⟩ + D(x, v)/α` over a domain of dimension at
/// most 3 with the given spacing. Exponential in the dimension; for tests.
pub fn brute_force_prox(
    geom: BregmanGeometry,
    domain: &ActionDomain,
    v: &[f64],
    g: &[f64],
    alpha: f64,
    resolution: f64,
) -> Result<Vec<f64>> {
    let dim = domain.dim();
    if dim > 3 {
        return Err(Error::Capability(format!("grid prox supports dimension ≤ 3, got {dim}")));
    }
    if !(resolution > 0.0 && resolution <= 1.0) || !(alpha > 0.0) {
        return Err(Error::Parameter("need 0 < resolution ≤ 1 and α > 0".into()));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| -> Result<()> {
        let val = prox_objective(geom, &x, v, g, alpha)?;
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, x));
        }
        Ok(())
    };
    match domain {
        ActionDomain::Simplex { .. } => {
            let k = (1.0 / resolution).round() as usize;
            let h = 1.0 / k as f64;
            match dim {
                1 => consider(vec![1.0])?,
                2 => {
                    for i in 0..=k {
                        consider(vec![i as f64 * h, (k - i) as f64 * h])?;
                    }
                }
                _ => {
                    for i in 0..=k {
                        for j in 0..=k - i {
                            consider(vec![i as f64 * h, j as f64 * h, (k - i - j) as f64 * h])?;
                        }
                    }
                }
            }
        }
        ActionDomain::Box { lower, upper } => {
            let axes: Vec<Vec<f64>> = lower
                .iter()
                .zip(upper)
                .map(|(&lo, &hi)| {
                    let k = ((hi - lo) / resolution).round().max(1.0) as usize;
                    (0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect()
                })
                .collect();
            let mut idx = vec![0usize; dim];
            loop {
                consider(idx.iter().enumerate().map(|(d, &i)| axes[d][i]).collect())?;
                let mut d = 0;
                while d < dim {
                    idx[d] += 1;
                    if idx[d] < axes[d].len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == dim {
                    break;
                }
            }
        }
    }
    Ok(best.expect("grid is nonempty").1)
}

/// Solves the simplex prox problem through its optimality conditions:
/// `x_p(λ) = max(0, (∇ψ)^{-1}(∇ψ(v)_p − α g_p − λ))`, with the multiplier
/// `λ` found by bisection so that `Σ x = 1`. Works for both geometries and
/// shares no code with [`crate::geometry::mirror_step`].
pub fn prox_by_bisection(geom: BregmanGeometry, v: &[f64], g: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let z: Vec<f64> = match geom {
        BregmanGeometry::Euclidean => v.iter().zip(g).map(|(a, b)| a - alpha * b).collect(),
        BregmanGeometry::Entropy => {
            if let Some(i) = v.iter().position(|&p| p <= 0.0) {
                return Err(Error::SingularReference { index: i, value: v[i] });
            }
            v.iter().zip(g).map(|(a, b)| a.ln() + 1.0 - alpha * b).collect()
        }
    };
    let inverse = |w: f64| match geom {
        BregmanGeometry::Euclidean => w.max(0.0),
        BregmanGeometry::Entropy => (w - 1.0).exp(),
    };
    let total = |lambda: f64| z.iter().map(|&w| inverse(w - lambda)).sum::<f64>();
    let top = z.iter().fold(f64::NEG_INFINITY, |m, &w| m.max(w));
    // Σ x(λ) is nonincreasing in λ; bracket the root.
    let mut hi = top;
    let mut lo = top - 1.0;
    while total(lo) < 1.0 {
        lo -= 2.0 * (hi - lo);
    }
    while total(hi) > 1.0 {
        hi += 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let mut x: Vec<f64> = z.iter().map(|&w| inverse(w - lambda)).collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|p| *p /= s);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_interdiction_game, matching_pennies, Norm};
    use crate::geometry::mirror_step;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn best_response_examples() {
        let zero = MultilinearGame::new(vec![DMatrix::zeros(3, 2)], vec![DMatrix::zeros(3, 2)]).unwrap();
        assert_eq!(best_response_vertex(&zero, Side::One, &[0.5, 0.5]), (0, 0.0));
        let mp = matching_pennies();
        let mp = mp.multilinear().unwrap();
        assert_eq!(best_response_vertex(mp, Side::One, &[1.0, 0.0]), (1, -1.0));
        let single = build_interdiction_game(1, 1, 1, &[vec![1]], &[vec![0.7]]).unwrap();
        assert_eq!(best_response_vertex(&single, Side::One, &[1.0]), (0, 0.7));
    }

    #[test]
    fn best_response_agrees_with_numeric_minimizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let a = DMatrix::from_fn(4, 3, |_, _| rng.random_range(-1.0..1.0));
            let game = MultilinearGame::new(vec![a.clone()], vec![-a]).unwrap();
            let d2 = ActionDomain::simplex(3).unwrap();
            let y = d2.sample(&mut rng);
            let (_, value) = best_response_vertex(&game, Side::One, &y);
            let c = game.pure_costs(Side::One, &y);
            let m = certified_min_over_domain(
                |x| x.iter().zip(&c).map(|(p, q)| p * q).sum(),
                |_| c.clone(),
                &ActionDomain::simplex(4).unwrap(),
                &MinimizeOptions::default(),
            )
            .unwrap();
            assert!((m.value - value).abs() <= 1e-9);
        }
    }

    #[test]
    fn grid_prox_zero_gradient_returns_nearest_grid_point() {
        let d = ActionDomain::simplex(3).unwrap();
        let v = [0.2, 0.3, 0.5];
        for geom in [BregmanGeometry::Euclidean, BregmanGeometry::Entropy] {
            let x = brute_force_prox(geom, &d, &v, &[0.0; 3], 0.5, 0.01).unwrap();
            assert!(Norm::L1.distance(&x, &v) < 1e-9);
        }
    }

    #[test]
    fn grid_prox_matches_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d2 = ActionDomain::simplex(2).unwrap();
        let d3 = ActionDomain::simplex(3).unwrap();
        for _ in 0..30 {
            let v = d2.sample(&mut rng);
            let g: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
            let alpha = rng.random_range(0.1..1.5);
            let grid = brute_force_prox(BregmanGeometry::Entropy, &d2, &v, &g, alpha, 1e-3).unwrap();
            let exact = mirror_step(BregmanGeometry::Entropy, &d2, &v, &g, alpha).unwrap();
            assert!(Norm::L1.distance(&grid, &exact) <= 2.0 * 2e-3);
        }
        for _ in 0..30 {
            let v = d3.sample(&mut rng);
            let g: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let alpha = rng.random_range(0.1..1.5);
            let grid = brute_force_prox(BregmanGeometry::Euclidean, &d3, &v, &g, alpha, 0.01).unwrap();
            let exact = mirror_step(BregmanGeometry::Euclidean, &d3, &v, &g, alpha).unwrap();
            assert!(Norm::L2.distance(&grid, &exact) <= 2.0 * 0.01 * 3f64.sqrt());
        }
    }

    #[test]
    fn grid_prox_rejects_large_dimension() {
        let d = ActionDomain::simplex(4).unwrap();
        assert!(matches!(
            brute_force_prox(BregmanGeometry::Euclidean, &d, &[0.25; 4], &[0.0; 4], 1.0, 0.1),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn bisection_prox_agrees_with_mirror_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let dim = rng.random_range(2..7);
            let d = ActionDomain::simplex(dim).unwrap();
            let v = d.sample(&mut rng);
            let g: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
            let alpha = rng.random_range(0.01..3.0);
            for geom in [BregmanGeometry::Entropy, BregmanGeometry::Euclidean] {
                let a = prox_by_bisection(geom, &v, &g, alpha).unwrap();
                let b = mirror_step(geom, &d, &v, &g, alpha).unwrap();
                assert!(Norm::L1.distance(&a, &b) <= 1e-8, "{geom:?} {a:?} {b:?}");
            }
        }
    }
}
