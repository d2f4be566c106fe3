use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when checking that a point sums to one.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Primal norm paired with a geometry. The dual of `L1` is `l∞`; `L2` is self-dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
}

impl Norm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    pub fn dual_of(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::L2 => Norm::L2.of(v),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Compact convex action set of one subnetwork.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionDomain {
    /// Probability simplex in `R^dim`.
    Simplex { dim: usize },
    /// Axis-aligned box `[lower, upper]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl ActionDomain {
    pub fn simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Construction("simplex dimension must be positive".into()));
        }
        Ok(ActionDomain::Simplex { dim })
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Construction(format!(
                "box bounds must be nonempty and equal length, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !l.is_finite() || !u.is_finite() || l > u)
        {
            return Err(Error::Construction("box bounds must be finite with lower <= upper".into()));
        }
        Ok(ActionDomain::Box { lower, upper })
    }

    pub fn dim(&self) -> usize {
        match self {
            ActionDomain::Simplex { dim } => *dim,
            ActionDomain::Box { lower, .. } => lower.len(),
        }
    }

    pub fn is_simplex(&self) -> bool {
        matches!(self, ActionDomain::Simplex { .. })
    }

    fn name(&self) -> &'static str {
        match self {
            ActionDomain::Simplex { .. } => "simplex",
            ActionDomain::Box { .. } => "box",
        }
    }

    /// Checks membership with absolute tolerance `tol` on each constraint.
    pub fn check(&self, x: &[f64], tol: f64) -> Result<()> {
        let fail = |reason: String| Error::OutsideDomain {
            domain: self.name(),
            reason,
        };
        if x.len() != self.dim() {
            return Err(fail(format!("dimension {} != {}", x.len(), self.dim())));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(fail(format!("component {i} is not finite")));
        }
        match self {
            ActionDomain::Simplex { .. } => {
                if let Some(i) = x.iter().position(|&v| v < -tol) {
                    return Err(fail(format!("component {i} = {} is negative", x[i])));
                }
                let s: f64 = x.iter().sum();
                if (s - 1.0).abs() > tol.max(SIMPLEX_TOL) {
                    return Err(fail(format!("components sum to {s}")));
                }
            }
            ActionDomain::Box { lower, upper } => {
                for (i, ((&v, &l), &u)) in x.iter().zip(lower).zip(upper).enumerate() {
                    if v < l - tol || v > u + tol {
                        return Err(fail(format!("component {i} = {v} outside [{l}, {u}]")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.check(x, SIMPLEX_TOL).is_ok()
    }

    /// Uniform distribution for simplices, midpoint for boxes.
    pub fn center(&self) -> Vec<f64> {
        match self {
            ActionDomain::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
            ActionDomain::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect()
            }
        }
    }

    /// Euclidean projection onto the domain.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        match self {
            ActionDomain::Simplex { .. } => crate::geometry::project_simplex_euclidean(y),
            ActionDomain::Box { lower, upper } => y
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&l, &u))| v.clamp(l, u))
                .collect(),
        }
    }

    /// A minimizer of the linear function `<g, x>` over the domain.
    pub fn linear_minimizer(&self, g: &[f64]) -> Vec<f64> {
        match self {
            ActionDomain::Simplex { dim } => {
                let mut out = vec![0.0; *dim];
                out[argmin(g)] = 1.0;
                out
            }
            ActionDomain::Box { lower, upper } => g
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&gi, (&l, &u))| if gi > 0.0 { l } else { u })
                .collect(),
        }
    }

    /// Frank–Wolfe gap `max_{y} <g, x - y>`: an upper bound on `f(x) - min f`
    /// for convex `f` with gradient `g` at `x`.
    pub fn frank_wolfe_gap(&self, x: &[f64], g: &[f64]) -> f64 {
        let s = self.linear_minimizer(g);
        x.iter()
            .zip(&s)
            .zip(g)
            .map(|((xi, si), gi)| gi * (xi - si))
            .sum::<f64>()
            .max(0.0)
    }

    /// Random point: Dirichlet(1) on simplices, uniform on boxes.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            ActionDomain::Simplex { dim } => {
                let mut e: Vec<f64> = (0..*dim)
                    .map(|_| -(1.0 - rng.random::<f64>()).ln())
                    .collect();
                let s: f64 = e.iter().sum();
                e.iter_mut().for_each(|v| *v /= s);
                e
            }
            ActionDomain::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| l + (u - l) * rng.random::<f64>())
                .collect(),
        }
    }

    /// Vertices of a simplex (pure strategies). `None` for boxes.
    pub fn vertex(&self, index: usize) -> Option<Vec<f64>> {
        match self {
            ActionDomain::Simplex { dim } if index < *dim => {
                let mut v = vec![0.0; *dim];
                v[index] = 1.0;
                Some(v)
            }
            _ => None,
        }
    }
}

/// Index of the smallest entry, lowest index on ties.
pub(crate) fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x < v[best] {
            best = i;
        }
    }
    best
}

/// Index of the largest entry, lowest index on ties.
pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}
