use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::StepSchedule;
use crate::error::{Error, Result};
use crate::geometry::BregmanGeometry;
use crate::network::CrossMode;

/// A complete, validated experiment description. Parsed from TOML; unknown
/// keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Root seed; every random choice is drawn from a named substream of it.
    pub seed: u64,
    pub horizon: usize,
    pub game: GameSpec,
    #[serde(default)]
    pub geometry: GeometrySpec,
    pub network: NetworkSpec,
    pub steps: StepSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub solver: SolverSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GameSpec {
    /// 10 paths, 15 arcs, 5 agents per side.
    InterdictionDesk,
    /// 30 paths, 60 arcs, 10 agents per side.
    InterdictionPaper,
    /// Custom interdiction size.
    Interdiction { agents: usize, paths: usize, arcs: usize },
    PowerAllocation,
    MatchingPennies,
    /// Two-player zero-sum matrix game; side one pays `x1ᵀ A x2`.
    Matrix { a: Vec<Vec<f64>> },
}

impl GameSpec {
    pub fn label(&self) -> String {
        match self {
            GameSpec::InterdictionDesk => "interdiction-desk".into(),
            GameSpec::InterdictionPaper => "interdiction-paper".into(),
            GameSpec::Interdiction { agents, paths, arcs } => {
                format!("interdiction-{agents}x{paths}x{arcs}")
            }
            GameSpec::PowerAllocation => "power-allocation".into(),
            GameSpec::MatchingPennies => "matching-pennies".into(),
            GameSpec::Matrix { a } => format!("matrix-{}x{}", a.len(), a.first().map_or(0, Vec::len)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub side1: BregmanGeometry,
    pub side2: BregmanGeometry,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec {
            side1: BregmanGeometry::Entropy,
            side2: BregmanGeometry::Entropy,
        }
    }
}

impl GeometrySpec {
    pub fn pair(&self) -> [BregmanGeometry; 2] {
        [self.side1, self.side2]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub side1: GraphSpec,
    pub side2: GraphSpec,
    #[serde(default = "default_cross")]
    pub cross: CrossMode,
}

fn default_cross() -> CrossMode {
    CrossMode::Pairing
}

/// How one side's graph pool is produced. Every pool member gets
/// Metropolis weights; each round draws one member uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Cycle,
    Path,
    Complete,
    Star,
    /// `size` random spanning trees, each with up to `extra_edges` chords.
    RandomPool { size: usize, extra_edges: usize },
    /// A single graph with algebraic connectivity within `tol` of `target`.
    Lambda2 {
        target: f64,
        #[serde(default = "default_lambda_tol")]
        tol: f64,
    },
    /// Edge-list pool file.
    File { path: PathBuf },
}

fn default_lambda_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StepSpec {
    /// `α(t) = (t + 1)^{-κ}`.
    Power { kappa: f64 },
    Constant { alpha: f64 },
    /// Constant `α = 1/√T` for the configured horizon.
    Horizon,
}

impl StepSpec {
    pub fn schedule(&self, horizon: usize) -> Result<StepSchedule> {
        match *self {
            StepSpec::Power { kappa } => StepSchedule::power(kappa),
            StepSpec::Constant { alpha } => StepSchedule::constant(alpha),
            StepSpec::Horizon => StepSchedule::for_horizon(horizon),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub metrics: Option<PathBuf>,
    /// Full per-round states, one JSON record per stride point.
    pub trace: Option<PathBuf>,
    /// Certificate to measure `dist_to_ne` against.
    pub certificate: Option<PathBuf>,
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_solver_tol")]
    pub tol: f64,
    #[serde(default = "default_solver_iters")]
    pub max_iters: usize,
}

fn default_solver_tol() -> f64 {
    1e-6
}

fn default_solver_iters() -> usize {
    200_000
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            tol: default_solver_tol(),
            max_iters: default_solver_iters(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every field that can be checked without building the game or
    /// network. Step-rule violations are reported as config errors.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.horizon == 0 {
            return cfg("horizon must be positive".into());
        }
        if let Err(Error::Parameter(m)) = self.steps.schedule(self.horizon) {
            return cfg(m);
        }
        if self.output.stride == Some(0) {
            return cfg("output.stride must be positive".into());
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iters == 0 {
            return cfg("solver needs tol > 0 and max_iters ≥ 1".into());
        }
        match &self.game {
            GameSpec::Interdiction { agents, paths, arcs } if *agents == 0 || *paths == 0 || *arcs == 0 => {
                return cfg("interdiction sizes must be positive".into());
            }
            GameSpec::Matrix { a } => {
                let cols = a.first().map_or(0, Vec::len);
                if a.is_empty() || cols == 0 || a.iter().any(|r| r.len() != cols) {
                    return cfg("matrix must be a nonempty rectangular array".into());
                }
                if a.iter().flatten().any(|v| !v.is_finite()) {
                    return cfg("matrix entries must be finite".into());
                }
            }
            _ => {}
        }
        for (side, g) in [(1, &self.network.side1), (2, &self.network.side2)] {
            match g {
                GraphSpec::RandomPool { size: 0, .. } => {
                    return cfg(format!("network.side{side}: pool size must be positive"));
                }
                GraphSpec::Lambda2 { target, tol } if !(*target > 0.0) || !(*tol > 0.0) => {
                    return cfg(format!("network.side{side}: λ2 target and tolerance must be positive"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}
