use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::ActionDomain;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Required Frank–Wolfe gap at the returned point.
    pub tol: f64,
    pub max_iters: usize,
    /// Number of starts: the domain center, then seeded random points.
    pub starts: usize,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            tol: 1e-9,
            max_iters: 20_000,
            starts: 5,
            seed: 0,
        }
    }
}

/// Result of a certified minimization.
///
/// `residual` is the Frank–Wolfe gap `max_y ⟨∇f(x), x − y⟩`, which bounds
/// `value − min f` from above when `f` is convex.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub start: usize,
}

/// Minimizes a convex differentiable function over a simplex or box by
/// projected gradient descent with backtracking on the gradient's local
/// Lipschitz constant, from
/// `options.starts` starting points. Fails if the best point's Frank–Wolfe
/// gap exceeds `options.tol`.
pub fn certified_min_over_domain(
    f: impl Fn(&[f64]) -> f64,
    grad: impl Fn(&[f64]) -> Vec<f64>,
    domain: &ActionDomain,
    options: &MinimizeOptions,
) -> Result<Minimum> {
    certified_min_from(f, grad, domain, options, &[])
}

/// As [`certified_min_over_domain`], trying `extra_starts` before the
/// generated ones.
pub fn certified_min_from(
    f: impl Fn(&[f64]) -> f64,
    grad: impl Fn(&[f64]) -> Vec<f64>,
    domain: &ActionDomain,
    options: &MinimizeOptions,
    extra_starts: &[Vec<f64>],
) -> Result<Minimum> {
    if !(options.tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {}", options.tol)));
    }
    let mut starts: Vec<Vec<f64>> = extra_starts.iter().map(|s| domain.project(s)).collect();
    if options.starts > 0 {
        starts.push(domain.center());
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        starts.extend((1..options.starts).map(|_| domain.sample(&mut rng)));
    }
    if starts.is_empty() {
        return Err(Error::Parameter("no starting points".into()));
    }
    let mut best: Option<Minimum> = None;
    for (k, x0) in starts.into_iter().enumerate() {
        let m = descend(&f, &grad, domain, x0, options, k);
        // Certified points first, then lowest value, then earliest start.
        let key = |m: &Minimum| (m.residual > options.tol, m.value);
        let better = best.as_ref().is_none_or(|b| key(&m) < key(b));
        if better {
            best = Some(m);
        }
    }
    let best = best.expect("at least one start");
    if best.residual > options.tol {
        return Err(Error::OracleFailure {
            residual: best.residual,
            tol: options.tol,
        });
    }
    Ok(best)
}

fn descend(
    f: &impl Fn(&[f64]) -> f64,
    grad: &impl Fn(&[f64]) -> Vec<f64>,
    domain: &ActionDomain,
    mut x: Vec<f64>,
    options: &MinimizeOptions,
    start: usize,
) -> Minimum {
    let mut step = 1.0;
    let mut iterations = 0;
    let mut g = grad(&x);
    let mut residual = domain.frank_wolfe_gap(&x, &g);
    // Steps are accepted on the local Lipschitz test
    // `step ‖∇f(y) − ∇f(x)‖ ≤ ‖y − x‖`, which needs no function values and so
    // keeps working after value differences drop below rounding.
    'outer: while residual > options.tol && iterations < options.max_iters {
        iterations += 1;
        loop {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let y = domain.project(&trial);
            let dist = l2_diff(&y, &x);
            if dist == 0.0 {
                break 'outer;
            }
            let gy = grad(&y);
            if step * l2_diff(&gy, &g) <= dist {
                x = y;
                g = gy;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-30 {
                break 'outer;
            }
        }
        residual = domain.frank_wolfe_gap(&x, &g);
    }
    Minimum {
        value: f(&x),
        point: x,
        residual,
        iterations,
        start,
    }
}

fn l2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}
