//! Run a preset (default `matching-pennies`) and print the start of its
//! metrics table, as `subzero run` would write it.
//!
//! ```text
//! cargo run --example preset_run -- interdiction-desk
//! ```

use subzero::experiments::{format_metrics, preset, run_config, PRESETS};

fn main() -> subzero::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "matching-pennies".into());
    let Some(mut cfg) = preset(&name) else {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        eprintln!("unknown preset {name:?}; choose one of {names:?}");
        std::process::exit(2);
    };
    // Certificates come from `subzero solve-ne`; skip distances here.
    cfg.output.certificate = None;
    print!("{}", cfg.to_toml()?);
    let out = run_config(&cfg, None)?;
    for line in format_metrics(&out.rows).lines().take(6) {
        println!("{line}");
    }
    println!("{}", out.summary());
    Ok(())
}
