//! Subnetwork zero-sum games.
//!
//! Two groups of agents share a global cost `U(x1, x2)`, the average of the
//! side-one agents' local costs. Side one minimizes `U`; side two minimizes
//! its own average cost, which equals `-U` for every profile.

mod cost;
mod domain;
mod instances;

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

pub use cost::{AgentCost, BilinearCost, ChannelRateCost, ClosureCost, SharedCost, Side};
pub use domain::{ActionDomain, Norm, SIMPLEX_TOL};
pub(crate) use domain::{argmax, argmin};
pub use instances::{
    build_interdiction_game, build_power_allocation_game, matching_pennies, matrix_game,
    random_interdiction_instance, InterdictionInstance, POWER_ALLOCATION,
};

pub(crate) use cost::{mat_t_vec, mat_vec};

/// Finite-strategy game extended to mixed strategies.
///
/// Agent `i` of side one pays `x1ᵀ A_i x2`; agent `j` of side two pays
/// `x1ᵀ B_j x2`. Rows index side-one actions, columns side-two actions.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearGame {
    m1: usize,
    m2: usize,
    side1: Vec<DMatrix<f64>>,
    side2: Vec<DMatrix<f64>>,
    mean1: DMatrix<f64>,
    mean2: DMatrix<f64>,
}

impl MultilinearGame {
    pub fn new(side1: Vec<DMatrix<f64>>, side2: Vec<DMatrix<f64>>) -> crate::Result<Self> {
        let first = side1
            .first()
            .ok_or_else(|| crate::Error::Construction("side one needs at least one agent".into()))?;
        if side2.is_empty() {
            return Err(crate::Error::Construction("side two needs at least one agent".into()));
        }
        let (m1, m2) = first.shape();
        if m1 == 0 || m2 == 0 {
            return Err(crate::Error::Construction("action sets must be nonempty".into()));
        }
        for (k, m) in side1.iter().chain(&side2).enumerate() {
            if m.shape() != (m1, m2) {
                return Err(crate::Error::Construction(format!(
                    "matrix {k} has shape {:?}, expected {:?}",
                    m.shape(),
                    (m1, m2)
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(crate::Error::Construction(format!("matrix {k} has non-finite entries")));
            }
        }
        let mean = |ms: &[DMatrix<f64>]| {
            let mut acc = DMatrix::zeros(m1, m2);
            for m in ms {
                acc += m;
            }
            acc / ms.len() as f64
        };
        let mean1 = mean(&side1);
        let mean2 = mean(&side2);
        Ok(MultilinearGame {
            m1,
            m2,
            side1,
            side2,
            mean1,
            mean2,
        })
    }

    pub fn actions(&self, side: Side) -> usize {
        match side {
            Side::One => self.m1,
            Side::Two => self.m2,
        }
    }

    pub fn matrices(&self, side: Side) -> &[DMatrix<f64>] {
        match side {
            Side::One => &self.side1,
            Side::Two => &self.side2,
        }
    }

    /// Average cost matrix of one side.
    pub fn mean_matrix(&self, side: Side) -> &DMatrix<f64> {
        match side {
            Side::One => &self.mean1,
            Side::Two => &self.mean2,
        }
    }

    /// Largest `|Ā1 + Ā2|` entry; zero for an exactly zero-sum game.
    pub fn zero_sum_defect(&self) -> f64 {
        (&self.mean1 + &self.mean2)
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Own-side cost of every pure action against an opponent mixed strategy.
    pub fn pure_costs(&self, side: Side, opponent: &[f64]) -> Vec<f64> {
        match side {
            Side::One => mat_vec(&self.mean1, opponent),
            Side::Two => mat_t_vec(&self.mean2, opponent),
        }
    }

    pub fn into_game(self) -> crate::Result<SubnetworkZeroSumGame> {
        let d1 = ActionDomain::simplex(self.m1)?;
        let d2 = ActionDomain::simplex(self.m2)?;
        let wrap = |ms: &[DMatrix<f64>]| -> Vec<SharedCost> {
            ms.iter()
                .map(|m| Arc::new(BilinearCost::new(m.clone())) as SharedCost)
                .collect()
        };
        let side1 = wrap(&self.side1);
        let side2 = wrap(&self.side2);
        SubnetworkZeroSumGame::new(side1, side2, d1, d2, GameClass::Multilinear(Arc::new(self)), false)
    }
}

/// What the inner-optimization oracles can rely on.
#[derive(Debug, Clone)]
pub enum GameClass {
    /// Exact pure-action enumeration is available.
    Multilinear(Arc<MultilinearGame>),
    /// Differentiable convex-concave costs; the numeric oracle applies.
    Smooth,
    /// Costs with no minimization oracle: regret and gap are unavailable.
    Opaque,
}

/// Largest Lipschitz constants per side and argument.
///
/// `own[l]` is `L_{l,1}` (side `l` in its own action), `other[l]` is
/// `L_{l,2}` (side `l` in the opponent's action).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzTable {
    pub own: [f64; 2],
    pub other: [f64; 2],
}

impl LipschitzTable {
    pub fn max(&self) -> f64 {
        self.own
            .iter()
            .chain(&self.other)
            .fold(0.0, |m, &v| m.max(v))
    }
}

/// A two-subnetwork zero-sum game. Immutable once built.
#[derive(Debug, Clone)]
pub struct SubnetworkZeroSumGame {
    costs: [Vec<SharedCost>; 2],
    domains: [ActionDomain; 2],
    class: GameClass,
    strictly_convex_concave: bool,
}

impl SubnetworkZeroSumGame {
    pub fn new(
        side1: Vec<SharedCost>,
        side2: Vec<SharedCost>,
        domain1: ActionDomain,
        domain2: ActionDomain,
        class: GameClass,
        strictly_convex_concave: bool,
    ) -> crate::Result<Self> {
        if side1.is_empty() || side2.is_empty() {
            return Err(crate::Error::Construction("both subnetworks need at least one agent".into()));
        }
        Ok(SubnetworkZeroSumGame {
            costs: [side1, side2],
            domains: [domain1, domain2],
            class,
            strictly_convex_concave,
        })
    }

    pub fn agents(&self, side: Side) -> usize {
        self.costs[side.index()].len()
    }

    pub fn domain(&self, side: Side) -> &ActionDomain {
        &self.domains[side.index()]
    }

    pub fn costs(&self, side: Side) -> &[SharedCost] {
        &self.costs[side.index()]
    }

    pub fn class(&self) -> &GameClass {
        &self.class
    }

    pub fn multilinear(&self) -> Option<&MultilinearGame> {
        match &self.class {
            GameClass::Multilinear(m) => Some(m),
            _ => None,
        }
    }

    /// Declared (not verified) strict convexity-concavity of `U`.
    pub fn is_strictly_convex_concave(&self) -> bool {
        self.strictly_convex_concave
    }

    pub fn check_profile(&self, x1: &[f64], x2: &[f64]) -> crate::Result<()> {
        self.domains[0].check(x1, SIMPLEX_TOL)?;
        self.domains[1].check(x2, SIMPLEX_TOL)
    }

    /// `U(x1, x2)`: mean of the side-one local costs. Rejects points outside the domains.
    pub fn evaluate_global_cost(&self, x1: &[f64], x2: &[f64]) -> crate::Result<f64> {
        self.check_profile(x1, x2)?;
        Ok(self.global_cost_unchecked(x1, x2))
    }

    pub(crate) fn global_cost_unchecked(&self, x1: &[f64], x2: &[f64]) -> f64 {
        self.side_cost(Side::One, x1, x2)
    }

    /// Average local cost of one side, without domain checks.
    pub fn side_cost(&self, side: Side, x1: &[f64], x2: &[f64]) -> f64 {
        let costs = &self.costs[side.index()];
        costs.iter().map(|c| c.value(x1, x2)).sum::<f64>() / costs.len() as f64
    }

    /// Gradient of a side's average cost in that side's own action.
    pub fn side_gradient(&self, side: Side, x1: &[f64], x2: &[f64]) -> Vec<f64> {
        let costs = &self.costs[side.index()];
        let mut acc = vec![0.0; self.domains[side.index()].dim()];
        for c in costs {
            let g = match side {
                Side::One => c.grad_x1(x1, x2),
                Side::Two => c.grad_x2(x1, x2),
            };
            acc.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        }
        let n = costs.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    /// Partial subgradient of agent `agent`'s local cost in its own action,
    /// evaluated at its own point and its estimate of the opponent.
    pub fn subgradient(
        &self,
        side: Side,
        agent: usize,
        own_point: &[f64],
        opponent_estimate: &[f64],
    ) -> crate::Result<Vec<f64>> {
        let cost = self.costs[side.index()].get(agent).ok_or_else(|| {
            crate::Error::Parameter(format!("side {side} has no agent {agent}"))
        })?;
        self.domains[side.index()].check(own_point, SIMPLEX_TOL)?;
        self.domains[side.other().index()].check(opponent_estimate, SIMPLEX_TOL)?;
        Ok(local_gradient(cost.as_ref(), side, own_point, opponent_estimate))
    }

    pub fn lipschitz(&self, norm: Norm) -> LipschitzTable {
        let fold = |side: Side, own: bool| {
            self.costs[side.index()]
                .iter()
                .map(|c| match (side, own) {
                    (Side::One, true) | (Side::Two, false) => c.lipschitz_x1(norm),
                    (Side::One, false) | (Side::Two, true) => c.lipschitz_x2(norm),
                })
                .fold(0.0, f64::max)
        };
        LipschitzTable {
            own: [fold(Side::One, true), fold(Side::Two, true)],
            other: [fold(Side::One, false), fold(Side::Two, false)],
        }
    }

    /// Worst `|f1 + f2|` over `samples` random profiles.
    pub fn zero_sum_violation<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> f64 {
        (0..samples)
            .map(|_| {
                let x1 = self.domains[0].sample(rng);
                let x2 = self.domains[1].sample(rng);
                (self.side_cost(Side::One, &x1, &x2) + self.side_cost(Side::Two, &x1, &x2)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Gradient of `cost` in the acting side's variable, given that side's point
/// and the opponent point.
pub(crate) fn local_gradient(cost: &dyn AgentCost, side: Side, own: &[f64], opponent: &[f64]) -> Vec<f64> {
    match side {
        Side::One => cost.grad_x1(own, opponent),
        Side::Two => cost.grad_x2(opponent, own),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matching_pennies_uniform_value_is_zero() {
        let g = matching_pennies();
        assert_eq!(g.evaluate_global_cost(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn zero_game_costs_nothing() {
        let g = matrix_game(DMatrix::zeros(3, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x1 = g.domain(Side::One).sample(&mut rng);
            let x2 = g.domain(Side::Two).sample(&mut rng);
            assert_eq!(g.evaluate_global_cost(&x1, &x2).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_points_outside_domain() {
        let g = matching_pennies();
        assert!(matches!(
            g.evaluate_global_cost(&[0.7, 0.7], &[0.5, 0.5]),
            Err(crate::Error::OutsideDomain { .. })
        ));
        assert!(g.subgradient(Side::One, 0, &[0.5, 0.5], &[2.0, -1.0]).is_err());
        assert!(g.subgradient(Side::One, 3, &[0.5, 0.5], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn matching_pennies_subgradients() {
        let g = matching_pennies();
        assert_eq!(g.subgradient(Side::One, 0, &[0.5, 0.5], &[0.5, 0.5]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(g.subgradient(Side::One, 0, &[0.5, 0.5], &[1.0, 0.0]).unwrap(), vec![1.0, -1.0]);
        // side two pays -U, so its gradient against (1, 0) is -(Aᵀ x1)
        assert_eq!(g.subgradient(Side::Two, 0, &[0.5, 0.5], &[1.0, 0.0]).unwrap(), vec![-1.0, 1.0]);
    }

    #[test]
    fn multilinear_rejects_shape_mismatch() {
        let a = DMatrix::zeros(2, 2);
        let b = DMatrix::zeros(2, 3);
        assert!(matches!(
            MultilinearGame::new(vec![a], vec![b]),
            Err(crate::Error::Construction(_))
        ));
        assert!(MultilinearGame::new(vec![], vec![DMatrix::zeros(1, 1)]).is_err());
    }

    #[test]
    fn lipschitz_table_covers_agents() {
        let g = build_power_allocation_game();
        let t = g.lipschitz(Norm::L1);
        assert!((t.own[0] - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(t.other[0], 8.0);
        assert_eq!(t.own[1], 8.0);
        assert!((t.other[1] - 8.0 / 9.0).abs() < 1e-15);
        assert_eq!(t.max(), 8.0);
    }
}
