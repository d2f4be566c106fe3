use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;

use super::{
    ActionDomain, ChannelRateCost, GameClass, MultilinearGame, SharedCost, SubnetworkZeroSumGame,
};
use crate::error::{Error, Result};

/// Two-player zero-sum matrix game: one agent per side, side one pays
/// `x1ᵀ A x2`, side two pays its negation.
pub fn matrix_game(a: DMatrix<f64>) -> Result<SubnetworkZeroSumGame> {
    let neg = -a.clone();
    MultilinearGame::new(vec![a], vec![neg])?.into_game()
}

pub fn matching_pennies() -> SubnetworkZeroSumGame {
    matrix_game(DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]))
        .expect("matching pennies is well formed")
}

/// Evader/interdictor game over a path–arc incidence.
///
/// Side one (evaders) picks paths, side two (interdictors) picks arcs.
/// Evader `i` and interdictor `i` share detection probabilities
/// `probs[i][k]`, so `A_i[p][k] = probs[i][k] · incidence[p][k]` and the
/// interdictor's cost is `-A_i`. The group averages are then exactly
/// opposite.
pub fn build_interdiction_game(
    n_agents: usize,
    n_paths: usize,
    n_arcs: usize,
    incidence: &[Vec<u8>],
    detection_probs: &[Vec<f64>],
) -> Result<MultilinearGame> {
    if n_agents == 0 || n_paths == 0 || n_arcs == 0 {
        return Err(Error::Construction("agents, paths and arcs must be positive".into()));
    }
    if incidence.len() != n_paths || incidence.iter().any(|r| r.len() != n_arcs) {
        return Err(Error::Construction(format!(
            "incidence must be {n_paths}x{n_arcs}"
        )));
    }
    if incidence.iter().flatten().any(|&d| d > 1) {
        return Err(Error::Construction("incidence entries must be 0 or 1".into()));
    }
    if detection_probs.len() != n_agents || detection_probs.iter().any(|r| r.len() != n_arcs) {
        return Err(Error::Construction(format!(
            "detection probabilities must be {n_agents}x{n_arcs}"
        )));
    }
    if detection_probs
        .iter()
        .flatten()
        .any(|p| !(0.0..=1.0).contains(p))
    {
        return Err(Error::Construction("detection probabilities must lie in [0, 1]".into()));
    }
    let evaders: Vec<DMatrix<f64>> = detection_probs
        .iter()
        .map(|probs| {
            DMatrix::from_fn(n_paths, n_arcs, |p, k| probs[k] * f64::from(incidence[p][k]))
        })
        .collect();
    let interdictors = evaders.iter().map(|m| -m).collect();
    MultilinearGame::new(evaders, interdictors)
}

/// Randomly drawn interdiction network and detection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct InterdictionInstance {
    pub n_agents: usize,
    pub incidence: Vec<Vec<u8>>,
    pub detection_probs: Vec<Vec<f64>>,
}

impl InterdictionInstance {
    pub fn n_paths(&self) -> usize {
        self.incidence.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.incidence.first().map_or(0, Vec::len)
    }

    pub fn build(&self) -> Result<MultilinearGame> {
        build_interdiction_game(
            self.n_agents,
            self.n_paths(),
            self.n_arcs(),
            &self.incidence,
            &self.detection_probs,
        )
    }
}

/// Each path uses 2 to 4 distinct arcs, every arc lies on some path, and
/// detection probabilities are uniform on `[0.2, 0.9]`.
pub fn random_interdiction_instance<R: Rng + ?Sized>(
    n_agents: usize,
    n_paths: usize,
    n_arcs: usize,
    rng: &mut R,
) -> Result<InterdictionInstance> {
    if n_agents == 0 || n_paths == 0 || n_arcs == 0 {
        return Err(Error::Construction("agents, paths and arcs must be positive".into()));
    }
    let mut incidence = vec![vec![0u8; n_arcs]; n_paths];
    for row in incidence.iter_mut() {
        let len = rng.random_range(2..=4usize).min(n_arcs);
        for k in sample(rng, n_arcs, len) {
            row[k] = 1;
        }
    }
    for k in 0..n_arcs {
        if incidence.iter().all(|row| row[k] == 0) {
            let p = rng.random_range(0..n_paths);
            incidence[p][k] = 1;
        }
    }
    let detection_probs = (0..n_agents)
        .map(|_| (0..n_arcs).map(|_| rng.random_range(0.2..=0.9)).collect())
        .collect();
    Ok(InterdictionInstance {
        n_agents,
        incidence,
        detection_probs,
    })
}

/// Channel layout of the six-channel power allocation instance (0-based):
/// `(signal index, noise floor, noise index)` per channel.
pub const POWER_ALLOCATION: [(usize, f64, usize); 6] = [
    (0, 1.0, 0),
    (1, 2.0, 0),
    (2, 3.0, 1),
    (0, 4.0, 1),
    (1, 5.0, 2),
    (2, 6.0, 2),
];

const CHANNEL_GAIN: f64 = 8.0;

/// Power allocation against adversarial noise over six channels.
///
/// Side one holds the noise allocation `y` and pays the channel rate
/// `log(1 + 8 x_a / (σ + y_b))`; side two holds the signal allocation `x`
/// and pays the negated rate. Both budgets are rescaled to the 3-simplex.
/// The global cost is strictly convex in `y` and strictly concave in `x`.
pub fn build_power_allocation_game() -> SubnetworkZeroSumGame {
    let channel = |(a, sigma, b): (usize, f64, usize), sign: f64| -> SharedCost {
        Arc::new(ChannelRateCost {
            signal_index: a,
            noise_index: b,
            noise_floor: sigma,
            gain: CHANNEL_GAIN,
            sign,
        })
    };
    let noise = POWER_ALLOCATION.iter().map(|&c| channel(c, 1.0)).collect();
    let signal = POWER_ALLOCATION.iter().map(|&c| channel(c, -1.0)).collect();
    SubnetworkZeroSumGame::new(
        noise,
        signal,
        ActionDomain::Simplex { dim: 3 },
        ActionDomain::Simplex { dim: 3 },
        GameClass::Smooth,
        true,
    )
    .expect("power allocation is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Side;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_allocation_first_channel_at_uniform() {
        let g = build_power_allocation_game();
        let u = [1.0 / 3.0; 3];
        let f = g.costs(Side::One)[0].value(&u, &u);
        assert!((f - 1.098_612_288_668_109_7).abs() < 1e-12);
        assert!((f - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn power_allocation_zero_signal_is_zero_rate() {
        let g = build_power_allocation_game();
        let noise = [0.2, 0.3, 0.5];
        for (i, &(a, _, _)) in POWER_ALLOCATION.iter().enumerate() {
            let mut x = [0.5, 0.5, 0.5];
            x[a] = 0.0;
            assert_eq!(g.costs(Side::One)[i].value(&noise, &x), 0.0);
        }
    }

    #[test]
    fn power_allocation_sides_are_negations() {
        let g = build_power_allocation_game();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let y = g.domain(Side::One).sample(&mut rng);
            let x = g.domain(Side::Two).sample(&mut rng);
            for i in 0..6 {
                let f1 = g.costs(Side::One)[i].value(&y, &x);
                let f2 = g.costs(Side::Two)[i].value(&y, &x);
                assert_eq!(f1, -f2);
            }
        }
        assert!(g.zero_sum_violation(100, &mut rng) <= 1e-8);
    }

    #[test]
    fn interdiction_rows_follow_incidence() {
        let inc = vec![
            vec![1, 0, 0, 1, 0],
            vec![0, 0, 0, 0, 1],
            vec![0, 1, 1, 0, 0],
        ];
        let probs = vec![vec![0.3, 0.4, 0.5, 0.6, 0.7], vec![0.9; 5]];
        let game = build_interdiction_game(2, 3, 5, &inc, &probs).unwrap();
        for (a, p) in game.matrices(Side::One).iter().zip(&probs) {
            for (row, inc_row) in inc.iter().enumerate() {
                for k in 0..5 {
                    let expected = if inc_row[k] == 1 { p[k] } else { 0.0 };
                    assert_eq!(a[(row, k)], expected);
                }
            }
        }
        assert_eq!(game.zero_sum_defect(), 0.0);
    }

    #[test]
    fn interdiction_zero_probabilities_give_zero_game() {
        let inc = vec![vec![1, 1], vec![0, 1]];
        let game = build_interdiction_game(3, 2, 2, &inc, &vec![vec![0.0; 2]; 3]).unwrap();
        assert!(game.mean_matrix(Side::One).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn interdiction_single_path_single_arc_has_unit_value() {
        let game = build_interdiction_game(1, 1, 1, &[vec![1]], &[vec![1.0]])
            .unwrap()
            .into_game()
            .unwrap();
        assert_eq!(game.evaluate_global_cost(&[1.0], &[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn interdiction_rejects_bad_dimensions() {
        assert!(build_interdiction_game(1, 2, 2, &[vec![1, 0]], &[vec![0.5, 0.5]]).is_err());
        assert!(build_interdiction_game(1, 1, 2, &[vec![1, 0]], &[vec![0.5]]).is_err());
        assert!(build_interdiction_game(1, 1, 1, &[vec![2]], &[vec![0.5]]).is_err());
        assert!(build_interdiction_game(1, 1, 1, &[vec![1]], &[vec![1.5]]).is_err());
    }

    #[test]
    fn random_instance_is_valid_and_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let i1 = random_interdiction_instance(5, 10, 15, &mut a).unwrap();
        let i2 = random_interdiction_instance(5, 10, 15, &mut b).unwrap();
        assert_eq!(i1, i2);
        for k in 0..15 {
            assert!(i1.incidence.iter().any(|r| r[k] == 1));
        }
        for row in &i1.incidence {
            let n: u8 = row.iter().sum();
            assert!(n >= 1);
        }
        assert!(i1
            .detection_probs
            .iter()
            .flatten()
            .all(|p| (0.2..=0.9).contains(p)));
        let game = i1.build().unwrap().into_game().unwrap();
        let x1 = game.domain(Side::One).center();
        let x2 = game.domain(Side::Two).center();
        assert!(game.check_profile(&x1, &x2).is_ok());
    }
}
