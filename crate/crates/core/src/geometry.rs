//! Bregman geometries and the proximal (mirror) step.
//!
//! Two regularizers are provided: the Euclidean `½‖x‖²` (self-dual `l2`)
//! and the negative entropy `Σ x log x` on the simplex, which is
//! 1-strongly convex with respect to `l1` (dual `l∞`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{ActionDomain, Norm, SIMPLEX_TOL};

/// Components of an entropy step are floored here before renormalizing.
pub const ENTROPY_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BregmanGeometry {
    Euclidean,
    #[serde(alias = "negative-entropy")]
    Entropy,
}

impl BregmanGeometry {
    /// Strong-convexity modulus of the regularizer in its primal norm.
    pub fn sigma(self) -> f64 {
        1.0
    }

    pub fn norm(self) -> Norm {
        match self {
            BregmanGeometry::Euclidean => Norm::L2,
            BregmanGeometry::Entropy => Norm::L1,
        }
    }

    /// The regularizer `ψ(x)`.
    pub fn psi(self, x: &[f64]) -> f64 {
        match self {
            BregmanGeometry::Euclidean => 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            BregmanGeometry::Entropy => x.iter().map(|&v| xlogx(v)).sum(),
        }
    }

    /// `∇ψ(x)`; for entropy `x` must be strictly positive.
    pub fn grad_psi(self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            BregmanGeometry::Euclidean => Ok(x.to_vec()),
            BregmanGeometry::Entropy => {
                check_positive(x)?;
                Ok(x.iter().map(|v| v.ln() + 1.0).collect())
            }
        }
    }

    fn check_domain(self, domain: &ActionDomain) -> Result<()> {
        match (self, domain) {
            (BregmanGeometry::Entropy, ActionDomain::Box { .. }) => Err(Error::Capability(
                "entropy geometry is only defined on the simplex".into(),
            )),
            _ => Ok(()),
        }
    }
}

fn xlogx(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v * v.ln()
    }
}

fn check_positive(y: &[f64]) -> Result<()> {
    match y.iter().position(|&v| v <= 0.0) {
        Some(index) => Err(Error::SingularReference {
            index,
            value: y[index],
        }),
        None => Ok(()),
    }
}

/// `D_ψ(x, y) = ψ(x) − ψ(y) − ⟨∇ψ(y), x − y⟩`.
///
/// For entropy this is `Σ x log(x/y) − Σ x + Σ y`, the KL divergence on the
/// simplex. Zero components of `y` are rejected.
pub fn bregman_divergence(geom: BregmanGeometry, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Parameter(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    match geom {
        BregmanGeometry::Euclidean => Ok(0.5
            * x.iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()),
        BregmanGeometry::Entropy => {
            check_positive(y)?;
            if let Some(i) = x.iter().position(|&v| v < 0.0) {
                return Err(Error::OutsideDomain {
                    domain: "simplex",
                    reason: format!("component {i} is negative"),
                });
            }
            let d: f64 = x
                .iter()
                .zip(y)
                .map(|(&a, &b)| {
                    let kl = if a == 0.0 { 0.0 } else { a * (a / b).ln() };
                    kl - a + b
                })
                .sum();
            Ok(d.max(0.0))
        }
    }
}

/// One proximal step:
/// `argmin_{x ∈ domain} ⟨g, x − v⟩ + D_ψ(x, v) / α`.
///
/// Entropy on the simplex uses the multiplicative-weights closed form
/// `x ∝ v · exp(−α g)`; the Euclidean geometry projects `v − α g`.
pub fn mirror_step(
    geom: BregmanGeometry,
    domain: &ActionDomain,
    v: &[f64],
    g: &[f64],
    alpha: f64,
) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("step size must be positive, got {alpha}")));
    }
    if g.len() != domain.dim() {
        return Err(Error::Parameter(format!(
            "gradient has dimension {}, domain {}",
            g.len(),
            domain.dim()
        )));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter("gradient has non-finite components".into()));
    }
    geom.check_domain(domain)?;
    domain.check(v, SIMPLEX_TOL)?;
    match geom {
        BregmanGeometry::Euclidean => {
            let y: Vec<f64> = v.iter().zip(g).map(|(a, b)| a - alpha * b).collect();
            Ok(domain.project(&y))
        }
        BregmanGeometry::Entropy => {
            check_positive(v)?;
            Ok(entropy_step(v, g, alpha))
        }
    }
}

/// Multiplicative-weights update with max-subtraction and a floor at
/// [`ENTROPY_FLOOR`].
pub(crate) fn entropy_step(v: &[f64], g: &[f64], alpha: f64) -> Vec<f64> {
    let logits: Vec<f64> = v.iter().zip(g).map(|(p, q)| p.ln() - alpha * q).collect();
    let top = logits.iter().fold(f64::NEG_INFINITY, |m, &z| m.max(z));
    let mut x: Vec<f64> = logits.iter().map(|z| (z - top).exp()).collect();
    normalize(&mut x);
    if x.iter().any(|&p| p < ENTROPY_FLOOR) {
        x.iter_mut().for_each(|p| *p = p.max(ENTROPY_FLOOR));
        normalize(&mut x);
    }
    x
}

fn normalize(x: &mut [f64]) {
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|p| *p /= s);
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_simplex_euclidean(y: &[f64]) -> Vec<f64> {
    if y.is_empty() {
        return Vec::new();
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            threshold = candidate;
        }
    }
    let mut x: Vec<f64> = y.iter().map(|&v| (v - threshold).max(0.0)).collect();
    // Rounding in the cumulative sum can leave the total a few ulps off.
    let s: f64 = x.iter().sum();
    if s > 0.0 && (s - 1.0).abs() > 1e-15 {
        x.iter_mut().for_each(|v| *v /= s);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionDomain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn simplex(n: usize) -> ActionDomain {
        ActionDomain::simplex(n).unwrap()
    }

    #[test]
    fn divergence_of_point_with_itself_is_zero() {
        let x = [0.2, 0.3, 0.5];
        for geom in [BregmanGeometry::Euclidean, BregmanGeometry::Entropy] {
            assert_eq!(bregman_divergence(geom, &x, &x).unwrap(), 0.0);
        }
    }

    #[test]
    fn euclidean_divergence_between_vertices() {
        let d = bregman_divergence(BregmanGeometry::Euclidean, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn entropy_divergence_matches_kl() {
        let d = bregman_divergence(BregmanGeometry::Entropy, &[0.5, 0.5], &[0.25, 0.75]).unwrap();
        // 0.5 ln 2 + 0.5 ln(2/3), evaluated independently to 16 digits
        assert!((d - 0.143_841_036_225_890_2).abs() < 1e-15);
    }

    #[test]
    fn entropy_divergence_rejects_boundary_reference() {
        let err = bregman_divergence(BregmanGeometry::Entropy, &[0.5, 0.5], &[1.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::SingularReference { index: 1, value: 0.0 });
    }

    #[test]
    fn zero_gradient_keeps_point() {
        let v = [0.1, 0.6, 0.3];
        for geom in [BregmanGeometry::Euclidean, BregmanGeometry::Entropy] {
            let x = mirror_step(geom, &simplex(3), &v, &[0.0; 3], 0.7).unwrap();
            for (a, b) in x.iter().zip(&v) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn entropy_step_closed_form_example() {
        let x = mirror_step(
            BregmanGeometry::Entropy,
            &simplex(2),
            &[0.5, 0.5],
            &[2f64.ln(), 0.0],
            1.0,
        )
        .unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((x[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_step_ignores_constant_shift() {
        let v = [0.25; 4];
        let x = mirror_step(BregmanGeometry::Entropy, &simplex(4), &v, &[3.5; 4], 2.0).unwrap();
        assert_eq!(x, v.to_vec());
    }

    #[test]
    fn mirror_step_errors() {
        let d = simplex(2);
        assert!(matches!(
            mirror_step(BregmanGeometry::Entropy, &d, &[0.5, 0.5], &[0.0, 0.0], 0.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            mirror_step(BregmanGeometry::Euclidean, &d, &[0.5, 0.5], &[0.0, 0.0], -1.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            mirror_step(BregmanGeometry::Entropy, &d, &[1.0, 0.0], &[0.0, 1.0], 1.0),
            Err(Error::SingularReference { index: 1, .. })
        ));
        let b = ActionDomain::boxed(vec![0.0; 2], vec![1.0; 2]).unwrap();
        assert!(matches!(
            mirror_step(BregmanGeometry::Entropy, &b, &[0.5, 0.5], &[0.0, 0.0], 1.0),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn entropy_step_survives_huge_gradients() {
        let x = mirror_step(
            BregmanGeometry::Entropy,
            &simplex(3),
            &[0.2, 0.3, 0.5],
            &[1e6, -1e6, 0.0],
            10.0,
        )
        .unwrap();
        assert!(x.iter().all(|p| p.is_finite() && *p >= 0.5 * ENTROPY_FLOOR));
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_box_step_clamps() {
        let b = ActionDomain::boxed(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let x = mirror_step(BregmanGeometry::Euclidean, &b, &[0.5, 1.0], &[-2.0, 3.0], 1.0).unwrap();
        assert_eq!(x, vec![1.0, 0.0]);
    }

    #[test]
    fn projection_examples() {
        let p = project_simplex_euclidean(&[1.2, -0.2]);
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1] == 0.0);
        let p = project_simplex_euclidean(&[0.5, 0.5, 0.5]);
        for v in p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let y = [0.1, 0.2, 0.7];
        let p = project_simplex_euclidean(&y);
        for (a, b) in p.iter().zip(&y) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn strong_convexity_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = simplex(4);
        for _ in 0..2000 {
            let x = d.sample(&mut rng);
            let y = d.sample(&mut rng);
            for geom in [BregmanGeometry::Euclidean, BregmanGeometry::Entropy] {
                let gx = geom.grad_psi(&x).unwrap();
                let lin: f64 = gx.iter().zip(y.iter().zip(&x)).map(|(g, (a, b))| g * (a - b)).sum();
                let dist = geom.norm().distance(&x, &y);
                let lhs = geom.psi(&y);
                let rhs = geom.psi(&x) + lin + 0.5 * geom.sigma() * dist * dist;
                assert!(lhs >= rhs - 1e-9, "{geom:?}: {lhs} < {rhs}");
                let div = bregman_divergence(geom, &y, &x).unwrap();
                assert!(div >= 0.5 * geom.sigma() * dist * dist - 1e-9);
            }
        }
    }

    #[test]
    fn divergence_is_convex_in_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let d = simplex(3);
        for _ in 0..1000 {
            let x = d.sample(&mut rng);
            let ys: Vec<Vec<f64>> = (0..3).map(|_| d.sample(&mut rng)).collect();
            let w = d.sample(&mut rng);
            let mix: Vec<f64> = (0..3)
                .map(|p| ys.iter().zip(&w).map(|(y, wj)| wj * y[p]).sum())
                .collect();
            for geom in [BregmanGeometry::Euclidean, BregmanGeometry::Entropy] {
                let lhs = bregman_divergence(geom, &x, &mix).unwrap();
                let rhs: f64 = ys
                    .iter()
                    .zip(&w)
                    .map(|(y, wj)| wj * bregman_divergence(geom, &x, y).unwrap())
                    .sum();
                assert!(lhs <= rhs + 1e-12);
            }
        }
    }

    #[test]
    fn step_bound_and_simplex_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let d = simplex(5);
        for _ in 0..2000 {
            let v = d.sample(&mut rng);
            let g: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
            let alpha = rng.random_range(0.01..2.0);
            for geom in [BregmanGeometry::Euclidean, BregmanGeometry::Entropy] {
                let x = mirror_step(geom, &d, &v, &g, alpha).unwrap();
                assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                let moved = geom.norm().distance(&v, &x);
                assert!(moved <= alpha / geom.sigma() * geom.norm().dual_of(&g) + 1e-12);
                if geom == BregmanGeometry::Entropy {
                    assert!(x.iter().all(|&p| p > 0.0));
                }
            }
        }
    }
}
