//! Time-varying communication structure.
//!
//! Each side mixes its states with a doubly stochastic matrix `W_l(t)` drawn
//! from a pool, and every agent reads the opposing side through a
//! row-stochastic cross matrix.

mod graph;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Side;

pub use graph::{
    algebraic_connectivity, format_graph_pool, graph_with_target_connectivity, parse_graph_pool,
    UndirectedGraph,
};

/// Row and column sums must match 1 to this tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Nonnegative weight matrix; `W[i][j] > 0` means `i` listens to `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    weights: DMatrix<f64>,
}

impl WeightedDigraph {
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        if !weights.is_square() || weights.nrows() == 0 {
            return Err(Error::Construction("weight matrix must be square and nonempty".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Construction("weights must be finite and nonnegative".into()));
        }
        Ok(WeightedDigraph { weights })
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    /// Smallest positive entry.
    pub fn min_positive(&self) -> f64 {
        min_positive(&self.weights)
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        is_row_stochastic(&self.weights, tol) && is_row_stochastic(&self.weights.transpose(), tol)
    }

    /// Graph of off-diagonal positive entries, read as undirected.
    pub fn support(&self) -> UndirectedGraph {
        let n = self.n();
        let mut g = UndirectedGraph::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && self.weights[(i, j)] > 0.0 {
                    g.add_edge(i, j).expect("indices in range");
                }
            }
        }
        g
    }
}

fn min_positive(m: &DMatrix<f64>) -> f64 {
    m.iter()
        .copied()
        .filter(|&w| w > 0.0)
        .fold(f64::INFINITY, f64::min)
}

pub fn is_row_stochastic(m: &DMatrix<f64>, tol: f64) -> bool {
    m.iter().all(|&w| w >= 0.0)
        && m.row_iter().all(|r| (r.sum() - 1.0).abs() <= tol && r.iter().any(|&w| w > 0.0))
}

/// Metropolis–Hastings weights `1 / (1 + max(deg_i, deg_j))` on edges, with
/// the diagonal taking the remainder. Symmetric, hence doubly stochastic.
pub fn metropolis_weights(g: &UndirectedGraph) -> Result<WeightedDigraph> {
    if g.n() == 0 {
        return Err(Error::Construction("graph has no nodes".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected(format!(
            "{} nodes, {} edges",
            g.n(),
            g.edge_count()
        )));
    }
    let deg = g.degrees();
    let n = g.n();
    let mut w = DMatrix::zeros(n, n);
    for (a, b) in g.edges() {
        let v = 1.0 / (1.0 + deg[a].max(deg[b]) as f64);
        w[(a, b)] = v;
        w[(b, a)] = v;
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    WeightedDigraph::new(w)
}

/// How receivers weight the opposing side's states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossMode {
    /// Agent `i` hears only opponent `i` (requires equal side sizes).
    Pairing,
    /// Every opponent with weight `1 / n_other`.
    Uniform,
}

/// Cross matrix with `receivers` rows and `senders` columns.
pub fn cross_matrix(mode: CrossMode, receivers: usize, senders: usize) -> Result<DMatrix<f64>> {
    if receivers == 0 || senders == 0 {
        return Err(Error::Construction("cross matrix needs agents on both sides".into()));
    }
    match mode {
        CrossMode::Pairing if receivers != senders => Err(Error::Construction(format!(
            "pairing needs equal side sizes, got {receivers} and {senders}"
        ))),
        CrossMode::Pairing => Ok(DMatrix::identity(receivers, senders)),
        CrossMode::Uniform => Ok(DMatrix::from_element(receivers, senders, 1.0 / senders as f64)),
    }
}

/// `Γ = (1 − η/4n²)^{-2}` and `θ = (1 − η/4n²)^{1/B}` for one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayConstants {
    pub gamma: f64,
    pub theta: f64,
}

impl DecayConstants {
    pub fn new(eta: f64, n: usize, window: usize) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) || n == 0 || window == 0 {
            return Err(Error::Parameter(format!(
                "decay constants need η ∈ (0, 1], n ≥ 1, B ≥ 1; got η = {eta}, n = {n}, B = {window}"
            )));
        }
        let base = 1.0 - eta / (4.0 * (n * n) as f64);
        Ok(DecayConstants {
            gamma: base.powi(-2),
            theta: base.powf(1.0 / window as f64),
        })
    }

    /// `Γ θ^k`.
    pub fn bound(&self, k: usize) -> f64 {
        self.gamma * self.theta.powf(k as f64)
    }
}

/// Mixing matrices selected for one round.
#[derive(Debug, Clone, Copy)]
pub struct RoundMatrices<'a> {
    /// `W_1(t)`, `W_2(t)`.
    pub intra: [&'a DMatrix<f64>; 2],
    /// Cross weights read by each side: `n1 × n2` for side one, `n2 × n1` for side two.
    pub cross: [&'a DMatrix<f64>; 2],
}

const STREAM_STRIDE: u128 = 64;

/// Seeded, random-access schedule over pools of mixing matrices.
///
/// Round `t` draws each matrix uniformly from its pool with an independent
/// ChaCha stream positioned at `t`, so any round can be queried in any order
/// and equal seeds give equal sequences.
#[derive(Debug, Clone)]
pub struct CommunicationSchedule {
    sizes: [usize; 2],
    pools: [Vec<WeightedDigraph>; 2],
    cross: [Vec<DMatrix<f64>>; 2],
    seed: u64,
    eta: f64,
    windows: [usize; 2],
}

impl CommunicationSchedule {
    /// Validates Assumption-style conditions: doubly stochastic pools whose
    /// members are connected (so `B_l = 1`) and row-stochastic cross
    /// matrices. `η` is the smallest positive weight anywhere.
    pub fn new(
        pools: [Vec<WeightedDigraph>; 2],
        cross: [Vec<DMatrix<f64>>; 2],
        seed: u64,
    ) -> Result<Self> {
        let mut sizes = [0; 2];
        for side in Side::BOTH {
            let l = side.index();
            let pool = &pools[l];
            let first = pool.first().ok_or_else(|| {
                Error::Construction(format!("side {side} has an empty graph pool"))
            })?;
            sizes[l] = first.n();
            for (k, w) in pool.iter().enumerate() {
                if w.n() != sizes[l] {
                    return Err(Error::Construction(format!(
                        "side {side} pool member {k} has {} nodes, expected {}",
                        w.n(),
                        sizes[l]
                    )));
                }
                if !w.is_doubly_stochastic(STOCHASTIC_TOL) {
                    return Err(Error::Construction(format!(
                        "side {side} pool member {k} is not doubly stochastic"
                    )));
                }
                if !w.support().is_connected() {
                    return Err(Error::Disconnected(format!("side {side} pool member {k}")));
                }
            }
        }
        for side in Side::BOTH {
            let l = side.index();
            let (rows, cols) = (sizes[l], sizes[1 - l]);
            if cross[l].is_empty() {
                return Err(Error::Construction(format!("side {side} has no cross matrices")));
            }
            for (k, m) in cross[l].iter().enumerate() {
                if m.shape() != (rows, cols) {
                    return Err(Error::Construction(format!(
                        "side {side} cross matrix {k} has shape {:?}, expected {:?}",
                        m.shape(),
                        (rows, cols)
                    )));
                }
                if !is_row_stochastic(m, STOCHASTIC_TOL) {
                    return Err(Error::Construction(format!(
                        "side {side} cross matrix {k} is not row stochastic"
                    )));
                }
            }
        }
        let eta = pools
            .iter()
            .flatten()
            .map(WeightedDigraph::min_positive)
            .chain(cross.iter().flatten().map(min_positive))
            .fold(1.0, f64::min);
        Ok(CommunicationSchedule {
            sizes,
            pools,
            cross,
            seed,
            eta,
            windows: [1, 1],
        })
    }

    /// Metropolis weights on each graph, cross matrices from `mode`.
    pub fn from_graph_pools(
        pool1: &[UndirectedGraph],
        pool2: &[UndirectedGraph],
        mode: CrossMode,
        seed: u64,
    ) -> Result<Self> {
        let weights = |pool: &[UndirectedGraph]| -> Result<Vec<WeightedDigraph>> {
            pool.iter().map(metropolis_weights).collect()
        };
        let w1 = weights(pool1)?;
        let w2 = weights(pool2)?;
        let (n1, n2) = (
            w1.first().map_or(0, WeightedDigraph::n),
            w2.first().map_or(0, WeightedDigraph::n),
        );
        let cross = [vec![cross_matrix(mode, n1, n2)?], vec![cross_matrix(mode, n2, n1)?]];
        CommunicationSchedule::new([w1, w2], cross, seed)
    }

    /// Fixed graphs on both sides.
    pub fn fixed(
        g1: &UndirectedGraph,
        g2: &UndirectedGraph,
        mode: CrossMode,
    ) -> Result<Self> {
        CommunicationSchedule::from_graph_pools(
            std::slice::from_ref(g1),
            std::slice::from_ref(g2),
            mode,
            0,
        )
    }

    pub fn n(&self, side: Side) -> usize {
        self.sizes[side.index()]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Joint-connectivity window `B_l`.
    pub fn window(&self, side: Side) -> usize {
        self.windows[side.index()]
    }

    pub fn pool(&self, side: Side) -> &[WeightedDigraph] {
        &self.pools[side.index()]
    }

    pub fn decay(&self, side: Side) -> DecayConstants {
        DecayConstants::new(self.eta, self.n(side), self.window(side))
            .expect("validated at construction")
    }

    fn pick(&self, stream: u64, len: usize, t: usize) -> usize {
        if len == 1 {
            return 0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng.set_word_pos(t as u128 * STREAM_STRIDE);
        rng.random_range(0..len)
    }

    pub fn select(&self, t: usize) -> RoundMatrices<'_> {
        let w = |l: usize| self.pools[l][self.pick(l as u64, self.pools[l].len(), t)].weights();
        let c = |l: usize| &self.cross[l][self.pick(2 + l as u64, self.cross[l].len(), t)];
        RoundMatrices {
            intra: [w(0), w(1)],
            cross: [c(0), c(1)],
        }
    }

    pub fn intra(&self, side: Side, t: usize) -> &DMatrix<f64> {
        let l = side.index();
        self.pools[l][self.pick(l as u64, self.pools[l].len(), t)].weights()
    }
}

/// `Φ_l(t, s) = W_l(t) W_l(t−1) ⋯ W_l(s)`.
pub fn transition_matrix(
    schedule: &CommunicationSchedule,
    side: Side,
    t: usize,
    s: usize,
) -> Result<DMatrix<f64>> {
    if t < s {
        return Err(Error::Parameter(format!("transition matrix needs t ≥ s, got t = {t}, s = {s}")));
    }
    let mut phi = schedule.intra(side, s).clone();
    for r in s + 1..=t {
        phi = schedule.intra(side, r) * phi;
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_matrix(w: &DMatrix<f64>, expected: &[f64]) {
        for (a, b) in w.iter().zip(DMatrix::from_row_slice(w.nrows(), w.ncols(), expected).iter()) {
            assert!((a - b).abs() < 1e-15, "{w}");
        }
    }

    #[test]
    fn metropolis_examples() {
        let third = 1.0 / 3.0;
        let k3 = metropolis_weights(&UndirectedGraph::complete(3)).unwrap();
        assert_matrix(k3.weights(), &[third; 9]);
        let p3 = metropolis_weights(&UndirectedGraph::path(3)).unwrap();
        assert_matrix(
            p3.weights(),
            &[2.0 * third, third, 0.0, third, third, third, 0.0, third, 2.0 * third],
        );
        let single = metropolis_weights(&UndirectedGraph::empty(1)).unwrap();
        assert_matrix(single.weights(), &[1.0]);
        assert!(matches!(
            metropolis_weights(&UndirectedGraph::empty(2)),
            Err(Error::Disconnected(_))
        ));
    }

    #[test]
    fn metropolis_is_doubly_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..12 {
            let g = UndirectedGraph::random_connected(n, n / 2, &mut rng);
            let w = metropolis_weights(&g).unwrap();
            assert!(w.is_doubly_stochastic(STOCHASTIC_TOL));
            assert_eq!(w.weights(), &w.weights().transpose());
        }
    }

    #[test]
    fn decay_constants() {
        let d = DecayConstants::new(1.0 / 3.0, 3, 1).unwrap();
        let base: f64 = 1.0 - 1.0 / 108.0;
        assert_eq!(d.gamma, base.powi(-2));
        assert_eq!(d.theta, base);
        assert!(d.gamma >= 1.0 && d.theta < 1.0 && d.theta > 0.0);
        assert!(DecayConstants::new(0.0, 3, 1).is_err());
    }

    #[test]
    fn transition_matrix_examples() {
        let k2 = UndirectedGraph::complete(2);
        let s = CommunicationSchedule::fixed(&k2, &k2, CrossMode::Pairing).unwrap();
        for (t, from) in [(0, 0), (5, 2), (40, 0)] {
            let phi = transition_matrix(&s, Side::One, t, from).unwrap();
            assert!(phi.iter().all(|&v| (v - 0.5).abs() < 1e-15));
        }
        assert!(matches!(transition_matrix(&s, Side::One, 1, 2), Err(Error::Parameter(_))));
        let p3 = UndirectedGraph::path(3);
        let s = CommunicationSchedule::fixed(&p3, &p3, CrossMode::Pairing).unwrap();
        assert_eq!(&transition_matrix(&s, Side::Two, 4, 4).unwrap(), s.intra(Side::Two, 4));
    }

    #[test]
    fn schedule_selection_is_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pool: Vec<_> = (0..5)
            .map(|_| UndirectedGraph::random_connected(4, 1, &mut rng))
            .collect();
        let a = CommunicationSchedule::from_graph_pools(&pool, &pool, CrossMode::Pairing, 9).unwrap();
        let b = CommunicationSchedule::from_graph_pools(&pool, &pool, CrossMode::Pairing, 9).unwrap();
        let c = CommunicationSchedule::from_graph_pools(&pool, &pool, CrossMode::Pairing, 10).unwrap();
        let seq = |s: &CommunicationSchedule| -> Vec<DMatrix<f64>> {
            (0..200).map(|t| s.intra(Side::One, t).clone()).collect()
        };
        assert_eq!(seq(&a), seq(&b));
        assert_ne!(seq(&a), seq(&c));
        // Random access agrees with sequential access.
        assert_eq!(a.intra(Side::One, 150), &seq(&a)[150]);
        // Every pool member shows up.
        let distinct: std::collections::BTreeSet<usize> = (0..200)
            .map(|t| a.pool(Side::One).iter().position(|w| w.weights() == a.intra(Side::One, t)).unwrap())
            .collect();
        assert!(distinct.len() >= 4);
    }

    #[test]
    fn schedule_validation() {
        let p3 = metropolis_weights(&UndirectedGraph::path(3)).unwrap();
        let cross = || [vec![cross_matrix(CrossMode::Uniform, 3, 3).unwrap()], vec![cross_matrix(CrossMode::Uniform, 3, 3).unwrap()]];
        let bad = WeightedDigraph::new(DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert!(CommunicationSchedule::new([vec![p3.clone()], vec![bad]], cross(), 0).is_err());
        assert!(CommunicationSchedule::new([vec![], vec![p3.clone()]], cross(), 0).is_err());
        let disconnected = WeightedDigraph::new(DMatrix::identity(3, 3)).unwrap();
        assert!(matches!(
            CommunicationSchedule::new([vec![p3.clone()], vec![disconnected]], cross(), 0),
            Err(Error::Disconnected(_))
        ));
        assert!(cross_matrix(CrossMode::Pairing, 2, 3).is_err());
        let s = CommunicationSchedule::new([vec![p3.clone()], vec![p3]], cross(), 0).unwrap();
        assert_eq!(s.eta(), 1.0 / 3.0);
        assert_eq!(s.window(Side::One), 1);
    }

    #[test]
    fn lemma3_decay_on_path_pool() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pool = vec![
            UndirectedGraph::path(3),
            UndirectedGraph::complete(3),
            UndirectedGraph::from_edges(3, &[(0, 2), (1, 2)]).unwrap(),
        ];
        for _ in 0..50 {
            let seed = rng.random();
            let s = CommunicationSchedule::from_graph_pools(&pool, &pool, CrossMode::Pairing, seed).unwrap();
            let decay = s.decay(Side::One);
            for start in [0, 13] {
                let mut phi = DMatrix::identity(3, 3);
                for t in start..start + 31 {
                    phi = s.intra(Side::One, t) * phi;
                    let bound = decay.bound(t - start);
                    assert!(phi.iter().all(|&v| (v - 1.0 / 3.0).abs() <= bound));
                    assert!(is_row_stochastic(&phi, 1e-10) && is_row_stochastic(&phi.transpose(), 1e-10));
                }
            }
        }
    }
}
