use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{GameSpec, GraphSpec, RunConfig};
use crate::engine::StepSchedule;
use crate::error::{Error, Result};
use crate::game::{
    build_power_allocation_game, matching_pennies, matrix_game, random_interdiction_instance, Side,
    SubnetworkZeroSumGame,
};
use crate::geometry::BregmanGeometry;
use crate::network::{
    graph_with_target_connectivity, parse_graph_pool, CommunicationSchedule, UndirectedGraph,
};

/// Named substreams of the root seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    Game = 1,
    Network1 = 2,
    Network2 = 3,
    Schedule = 4,
}

/// Deterministic 64-bit seed for one substream.
pub fn substream_seed(root: u64, stream: Substream) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream as u64);
    rng.next_u64()
}

/// Everything a run needs, built from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub game: SubnetworkZeroSumGame,
    pub geometries: [BregmanGeometry; 2],
    pub schedule: CommunicationSchedule,
    pub steps: StepSchedule,
    pub horizon: usize,
}

pub fn build_game(spec: &GameSpec, seed: u64) -> Result<SubnetworkZeroSumGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, Substream::Game));
    let interdiction = |n, p, a, rng: &mut ChaCha8Rng| -> Result<SubnetworkZeroSumGame> {
        random_interdiction_instance(n, p, a, rng)?.build()?.into_game()
    };
    match spec {
        GameSpec::InterdictionDesk => interdiction(5, 10, 15, &mut rng),
        GameSpec::InterdictionPaper => interdiction(10, 30, 60, &mut rng),
        GameSpec::Interdiction { agents, paths, arcs } => interdiction(*agents, *paths, *arcs, &mut rng),
        GameSpec::PowerAllocation => Ok(build_power_allocation_game()),
        GameSpec::MatchingPennies => Ok(matching_pennies()),
        GameSpec::Matrix { a } => {
            let rows = a.len();
            let cols = a.first().map_or(0, Vec::len);
            let flat: Vec<f64> = a.iter().flatten().copied().collect();
            matrix_game(DMatrix::from_row_slice(rows, cols, &flat))
        }
    }
}

pub fn build_pool(spec: &GraphSpec, n: usize, seed: u64) -> Result<Vec<UndirectedGraph>> {
    let single = |g: UndirectedGraph| Ok(vec![g]);
    match spec {
        GraphSpec::Cycle if n >= 3 => single(UndirectedGraph::cycle(n)),
        GraphSpec::Cycle | GraphSpec::Path => single(UndirectedGraph::path(n)),
        GraphSpec::Complete => single(UndirectedGraph::complete(n)),
        GraphSpec::Star => single(UndirectedGraph::star(n)),
        GraphSpec::RandomPool { size, extra_edges } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..*size)
                .map(|_| UndirectedGraph::random_connected(n, *extra_edges, &mut rng))
                .collect())
        }
        GraphSpec::Lambda2 { target, tol } => {
            single(graph_with_target_connectivity(n, *target, *tol, seed)?)
        }
        GraphSpec::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            parse_graph_pool(&text, n)
        }
    }
}

impl Experiment {
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let game = build_game(&cfg.game, cfg.seed)?;
        let geometries = cfg.geometry.pair();
        for side in Side::BOTH {
            if geometries[side.index()] == BregmanGeometry::Entropy && !game.domain(side).is_simplex() {
                return Err(Error::Config(format!(
                    "side {side}: entropy geometry needs a simplex domain"
                )));
            }
        }
        let pool1 = build_pool(
            &cfg.network.side1,
            game.agents(Side::One),
            substream_seed(cfg.seed, Substream::Network1),
        )?;
        let pool2 = build_pool(
            &cfg.network.side2,
            game.agents(Side::Two),
            substream_seed(cfg.seed, Substream::Network2),
        )?;
        let schedule = CommunicationSchedule::from_graph_pools(
            &pool1,
            &pool2,
            cfg.network.cross,
            substream_seed(cfg.seed, Substream::Schedule),
        )?;
        Ok(Experiment {
            game,
            geometries,
            schedule,
            steps: cfg.steps.schedule(cfg.horizon)?,
            horizon: cfg.horizon,
        })
    }
}
