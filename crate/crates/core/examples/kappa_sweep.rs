//! Step exponent sweep on the interdiction desk preset, written to a
//! temporary directory.

use subzero::experiments::{preset, run_sweep, Sweep};

fn main() -> subzero::Result<()> {
    let mut cfg = preset("interdiction-desk").expect("shipped preset");
    cfg.horizon = 5000;
    let dir = std::env::temp_dir().join("subzero-kappa-sweep");
    let points = run_sweep(&cfg, &Sweep::Kappa(vec![0.5, 2.0 / 3.0, 0.75]), &dir)?;
    for p in &points {
        println!("κ = {:.3}: {} ({})", p.value, p.summary, p.metrics_file.display());
    }
    println!("comparison table: {}", dir.join("comparison.csv").display());
    Ok(())
}
