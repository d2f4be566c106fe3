//! Graphs on six nodes with a prescribed algebraic connectivity.

use subzero::network::{algebraic_connectivity, graph_with_target_connectivity, UndirectedGraph};

fn main() -> subzero::Result<()> {
    for (name, g) in [
        ("path", UndirectedGraph::path(6)),
        ("cycle", UndirectedGraph::cycle(6)),
        ("star", UndirectedGraph::star(6)),
        ("complete", UndirectedGraph::complete(6)),
    ] {
        println!("{name:>8}: λ2 = {:.4}", algebraic_connectivity(&g));
    }
    for target in [0.4, 0.8, 1.2, 2.0] {
        let g = graph_with_target_connectivity(6, target, 0.05, 3)?;
        println!(
            "target {target}: {} edges, λ2 = {:.4}",
            g.edge_count(),
            algebraic_connectivity(&g)
        );
    }
    Ok(())
}
