//! Certified equilibrium of the power allocation game, then the distributed
//! run's distance to it.

use subzero::experiments::{preset, run_config, solve_config};

fn main() -> subzero::Result<()> {
    let mut cfg = preset("power-allocation").expect("shipped preset");
    let record = solve_config(&cfg)?;
    let cert = &record.certificate;
    println!("noise  y* = {:.5?}", cert.x1);
    println!("signal x* = {:.5?}", cert.x2);
    println!("value {:.8}, gap {:.2e} after {} iterations", cert.value, cert.gap, cert.iterations);

    cfg.horizon = 4000;
    cfg.output.stride = Some(1000);
    let out = run_config(&cfg, Some(cert))?;
    for r in out.rows.iter().filter(|r| r.agent == 0) {
        println!(
            "t = {:>4}, side {}: distance to NE {:.3e}, avg regret {:.3e}",
            r.t,
            r.side,
            r.dist_to_ne.unwrap_or(f64::NAN),
            r.avg_regret
        );
    }
    Ok(())
}
