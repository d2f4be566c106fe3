use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use super::build::{build_pool, substream_seed, Experiment, Substream};
use super::config::{GraphSpec, RunConfig, StepSpec};
use super::output::{
    fmt_f64, format_metrics, format_trace, parse_metrics, read_certificate, write_certificate,
    write_file, CertificateRecord,
};
use crate::engine::{compute_metric_rows, run, MetricRow, RunOptions, SimulationTrace, TheoryConstants};
use crate::error::{Error, Result};
use crate::game::Side;
use crate::network::algebraic_connectivity;
use crate::oracles::{solve_ne_centralized, NeCertificate};

/// A finished run: trace, metric rows and the experiment it came from.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub experiment: Experiment,
    pub trace: SimulationTrace,
    pub rows: Vec<MetricRow>,
}

/// Final averages printed after a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub horizon: usize,
    /// Mean over agents of `R(T)/T`, per side.
    pub avg_regret: [f64; 2],
    /// Mean gap of the paired weighted averages at `T`.
    pub gap: f64,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "T = {}: mean avg regret side 1 = {:.6e}, side 2 = {:.6e}; mean gap of averages = {:.6e}",
            self.horizon, self.avg_regret[0], self.avg_regret[1], self.gap
        )
    }
}

impl RunOutcome {
    pub fn summary(&self) -> RunSummary {
        let last: Vec<&MetricRow> = self.rows.iter().filter(|r| r.t == self.trace.horizon).collect();
        let mean = |it: &mut dyn Iterator<Item = f64>| {
            let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
            if n == 0 { f64::NAN } else { s / n as f64 }
        };
        let side_regret = |side: Side| {
            mean(&mut last.iter().filter(|r| r.side == side).map(|r| r.avg_regret))
        };
        RunSummary {
            horizon: self.trace.horizon,
            avg_regret: [side_regret(Side::One), side_regret(Side::Two)],
            gap: mean(&mut last.iter().filter(|r| r.side == Side::One).map(|r| r.gap_avg)),
        }
    }
}

fn check_certificate(cert: &NeCertificate, exp: &Experiment) -> Result<()> {
    for (side, x) in [(Side::One, &cert.x1), (Side::Two, &cert.x2)] {
        exp.game
            .domain(side)
            .check(x, crate::game::SIMPLEX_TOL)
            .map_err(|e| Error::Config(format!("certificate does not fit the game on side {side}: {e}")))?;
    }
    Ok(())
}

/// Builds and runs a configured experiment and computes its metric rows.
pub fn run_config(cfg: &RunConfig, certificate: Option<&NeCertificate>) -> Result<RunOutcome> {
    let experiment = Experiment::from_config(cfg)?;
    if let Some(c) = certificate {
        check_certificate(c, &experiment)?;
    }
    let options = RunOptions {
        initial: None,
        stride: cfg.output.stride,
    };
    let trace = run(
        &experiment.game,
        experiment.geometries,
        &experiment.schedule,
        &experiment.steps,
        experiment.horizon,
        &options,
    )?;
    let constants = TheoryConstants::from_run(
        &experiment.game,
        experiment.geometries,
        &experiment.schedule,
        &trace.initial,
    )?;
    let rows = compute_metric_rows(&trace, &experiment.game, &constants, &experiment.steps, certificate)?;
    Ok(RunOutcome { experiment, trace, rows })
}

/// `run`: writes the metrics table (and the trace when configured).
/// `metrics_out` overrides the configured metrics path.
pub fn cmd_run(config: &Path, metrics_out: Option<&Path>) -> Result<RunSummary> {
    let cfg = RunConfig::load(config)?;
    let cert = match &cfg.output.certificate {
        Some(p) => Some(read_certificate(p)?.certificate),
        None => None,
    };
    let outcome = run_config(&cfg, cert.as_ref())?;
    let metrics = metrics_out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.metrics.clone())
        .unwrap_or_else(|| PathBuf::from("metrics.csv"));
    write_file(&metrics, &format_metrics(&outcome.rows))?;
    if let Some(p) = &cfg.output.trace {
        write_file(p, &format_trace(&outcome.trace)?)?;
    }
    Ok(outcome.summary())
}

/// Solves for a certified equilibrium of the configured game.
pub fn solve_config(cfg: &RunConfig) -> Result<CertificateRecord> {
    cfg.validate()?;
    let game = super::build::build_game(&cfg.game, cfg.seed)?;
    let certificate = solve_ne_centralized(&game, cfg.geometry.pair(), cfg.solver.tol, cfg.solver.max_iters)?;
    Ok(CertificateRecord {
        game: cfg.game.label(),
        certificate,
    })
}

/// `solve-ne`: writes a one-record certificate file.
pub fn cmd_solve_ne(config: &Path, out: &Path) -> Result<CertificateRecord> {
    let cfg = RunConfig::load(config)?;
    let record = solve_config(&cfg)?;
    write_certificate(out, &record)?;
    Ok(record)
}

/// What a sweep varies.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Power-rule exponents.
    Kappa(Vec<f64>),
    /// Target algebraic connectivities of one side's (single) graph.
    Lambda2 { side: Side, targets: Vec<f64>, tol: f64 },
}

impl Sweep {
    fn name(&self) -> &'static str {
        match self {
            Sweep::Kappa(_) => "kappa",
            Sweep::Lambda2 { .. } => "lambda2",
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            Sweep::Kappa(v) => v,
            Sweep::Lambda2 { targets, .. } => targets,
        }
    }
}

/// One sweep point's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    /// The realized parameter: `κ` itself, or the achieved `λ2`.
    pub achieved: f64,
    pub metrics_file: PathBuf,
    pub summary: RunSummary,
    /// Final `R(T)/T` per side and agent.
    pub final_regret: [Vec<f64>; 2],
}

pub const COMPARISON_HEADER: &str = "parameter,value,achieved,seed,side,agent,final_avg_regret";

/// Config for one sweep point.
pub fn sweep_point_config(base: &RunConfig, sweep: &Sweep, value: f64) -> RunConfig {
    let mut cfg = base.clone();
    match sweep {
        Sweep::Kappa(_) => cfg.steps = StepSpec::Power { kappa: value },
        Sweep::Lambda2 { side, tol, .. } => {
            let spec = GraphSpec::Lambda2 { target: value, tol: *tol };
            match side {
                Side::One => cfg.network.side1 = spec,
                Side::Two => cfg.network.side2 = spec,
            }
        }
    }
    cfg
}

/// `sweep`: one metrics file per point plus `comparison.csv` in `out_dir`.
/// All points share the base seed.
pub fn cmd_sweep(config: &Path, sweep: &Sweep, out_dir: &Path) -> Result<Vec<SweepPoint>> {
    let base = RunConfig::load(config)?;
    run_sweep(&base, sweep, out_dir)
}

pub fn run_sweep(base: &RunConfig, sweep: &Sweep, out_dir: &Path) -> Result<Vec<SweepPoint>> {
    if sweep.values().is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let configs: Vec<RunConfig> = sweep
        .values()
        .iter()
        .map(|&v| sweep_point_config(base, sweep, v))
        .collect();
    // Validate every point before running any of them.
    for c in &configs {
        c.validate()?;
    }
    let mut points = Vec::new();
    let mut comparison = format!("{COMPARISON_HEADER}\n");
    for (cfg, &value) in configs.iter().zip(sweep.values()) {
        let achieved = match sweep {
            Sweep::Kappa(_) => value,
            Sweep::Lambda2 { side, .. } => {
                let (spec, stream) = match side {
                    Side::One => (&cfg.network.side1, Substream::Network1),
                    Side::Two => (&cfg.network.side2, Substream::Network2),
                };
                let game = super::build::build_game(&cfg.game, cfg.seed)?;
                let pool = build_pool(spec, game.agents(*side), substream_seed(cfg.seed, stream))?;
                algebraic_connectivity(&pool[0])
            }
        };
        let outcome = run_config(cfg, None)?;
        let file = out_dir.join(format!("{}={}_seed{}.csv", sweep.name(), value, cfg.seed));
        write_file(&file, &format_metrics(&outcome.rows))?;
        let mut final_regret: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for r in outcome.rows.iter().filter(|r| r.t == outcome.trace.horizon) {
            final_regret[r.side.index()].push(r.avg_regret);
            comparison.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                sweep.name(),
                fmt_f64(value),
                fmt_f64(achieved),
                cfg.seed,
                r.side,
                r.agent,
                fmt_f64(r.avg_regret)
            ));
        }
        points.push(SweepPoint {
            value,
            achieved,
            metrics_file: file,
            summary: outcome.summary(),
            final_regret,
        });
    }
    write_file(&out_dir.join("comparison.csv"), &comparison)?;
    Ok(points)
}

/// Metrics `plotdata` can emit.
pub const PLOT_METRICS: [&str; 3] = ["avg_regret", "gap_avg", "dist_to_ne"];

/// `plotdata`: long-format `series,t,value` rows. Each series is
/// `<file stem>/<metric>/s<side>a<agent>`; empty `dist_to_ne` cells are
/// skipped. `agents`, when given, restricts the agents emitted.
pub fn cmd_plotdata(files: &[PathBuf], metrics: &[String], agents: Option<&[usize]>) -> Result<String> {
    if files.is_empty() {
        return Err(Error::Config("no metric files given".into()));
    }
    for m in metrics {
        if !PLOT_METRICS.contains(&m.as_str()) {
            return Err(Error::Config(format!(
                "unknown metric column {m:?}; expected one of {PLOT_METRICS:?}"
            )));
        }
    }
    let mut out = String::from("series,t,value\n");
    let mut labels = BTreeSet::new();
    for file in files {
        let text = std::fs::read_to_string(file)
            .map_err(|e| Error::Config(format!("{}: {e}", file.display())))?;
        let rows = parse_metrics(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", file.display())),
            other => other,
        })?;
        let stem = file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !labels.insert(stem.clone()) {
            return Err(Error::Config(format!("two metric files share the label {stem:?}")));
        }
        for m in metrics {
            for r in &rows {
                if agents.is_some_and(|a| !a.contains(&r.agent)) {
                    continue;
                }
                let value = match m.as_str() {
                    "avg_regret" => Some(r.avg_regret),
                    "gap_avg" => Some(r.gap_avg),
                    _ => r.dist_to_ne,
                };
                if let Some(v) = value {
                    out.push_str(&format!("{stem}/{m}/s{}a{},{},{}\n", r.side, r.agent, r.t, fmt_f64(v)));
                }
            }
        }
    }
    Ok(out)
}

/// `validate`: parses each config and builds its game and network without
/// running anything.
pub fn cmd_validate(configs: &[PathBuf]) -> Result<Vec<String>> {
    configs
        .iter()
        .map(|p| {
            let cfg = RunConfig::load(p)?;
            let exp = Experiment::from_config(&cfg)?;
            Ok(format!(
                "{}: ok ({}, {}+{} agents, T = {})",
                p.display(),
                cfg.game.label(),
                exp.game.agents(Side::One),
                exp.game.agents(Side::Two),
                cfg.horizon
            ))
        })
        .collect()
}
