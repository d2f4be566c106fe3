//! Metropolis weights on a few graphs, their decay constants, and how fast
//! products of randomly drawn mixing matrices approach uniform averaging.

use subzero::game::Side;
use subzero::network::{
    metropolis_weights, transition_matrix, CommunicationSchedule, CrossMode, UndirectedGraph,
};

fn main() -> subzero::Result<()> {
    let ring = UndirectedGraph::cycle(5);
    let w = metropolis_weights(&ring)?;
    println!("Metropolis weights on a 5-cycle:{}", w.weights());

    let pool = vec![UndirectedGraph::path(5), UndirectedGraph::star(5), ring];
    let schedule = CommunicationSchedule::from_graph_pools(&pool, &pool, CrossMode::Pairing, 11)?;
    let decay = schedule.decay(Side::One);
    println!("η = {:.4}, Γ = {:.4}, θ = {:.6}", schedule.eta(), decay.gamma, decay.theta);

    for t in [0, 5, 20, 50] {
        let phi = transition_matrix(&schedule, Side::One, t, 0)?;
        let dev = phi.iter().fold(0.0f64, |m, p| m.max((p - 0.2).abs()));
        println!("t = {t:>2}: max |Φ_ij − 1/n| = {dev:.3e}, bound Γθ^t = {:.4}", decay.bound(t));
    }
    Ok(())
}
