//! One proximal step in each geometry, and the divergences involved.

use subzero::game::ActionDomain;
use subzero::geometry::{bregman_divergence, mirror_step, BregmanGeometry};

fn main() -> subzero::Result<()> {
    let simplex = ActionDomain::simplex(3)?;
    let v = [0.5, 0.3, 0.2];
    let g = [1.0, -0.5, 0.25];
    let alpha = 0.4;

    for geom in [BregmanGeometry::Entropy, BregmanGeometry::Euclidean] {
        let x = mirror_step(geom, &simplex, &v, &g, alpha)?;
        let moved = geom.norm().distance(&v, &x);
        let bound = alpha / geom.sigma() * geom.norm().dual_of(&g);
        println!("{geom:?}: x = {x:.4?}");
        println!("  D(x, v) = {:.6}, step length {moved:.4} ≤ α‖g‖*/σ = {bound:.4}", bregman_divergence(geom, &x, &v)?);
    }

    // Boxes take Euclidean steps only.
    let cube = ActionDomain::boxed(vec![0.0; 2], vec![1.0; 2])?;
    let x = mirror_step(BregmanGeometry::Euclidean, &cube, &[0.9, 0.1], &[-2.0, 2.0], 0.25)?;
    println!("box step clamps to {x:?}");
    Ok(())
}
