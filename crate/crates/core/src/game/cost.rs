use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::domain::Norm;

/// Which subnetwork an agent belongs to. Side one minimizes the global cost `U`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::One, Side::Two];

    pub fn index(self) -> usize {
        match self {
            Side::One => 0,
            Side::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn from_number(n: u8) -> Option<Side> {
        match n {
            1 => Some(Side::One),
            2 => Some(Side::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl Serialize for Side {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl<'de> Deserialize<'de> for Side {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = u8::deserialize(d)?;
        Side::from_number(n).ok_or_else(|| serde::de::Error::custom(format!("side must be 1 or 2, got {n}")))
    }
}

/// Local cost `f(x1, x2)` of a single agent together with its partial
/// (sub)gradients and Lipschitz constants.
///
/// Lipschitz constants are with respect to the given primal norm, valid over
/// the game's domains.
pub trait AgentCost: Send + Sync + fmt::Debug {
    fn value(&self, x1: &[f64], x2: &[f64]) -> f64;
    fn grad_x1(&self, x1: &[f64], x2: &[f64]) -> Vec<f64>;
    fn grad_x2(&self, x1: &[f64], x2: &[f64]) -> Vec<f64>;
    fn lipschitz_x1(&self, norm: Norm) -> f64;
    fn lipschitz_x2(&self, norm: Norm) -> f64;
}

pub type SharedCost = Arc<dyn AgentCost>;

/// `f(x1, x2) = x1ᵀ M x2` with both arguments on probability simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearCost {
    pub matrix: DMatrix<f64>,
}

impl BilinearCost {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        BilinearCost { matrix }
    }
}

impl AgentCost for BilinearCost {
    fn value(&self, x1: &[f64], x2: &[f64]) -> f64 {
        bilinear(&self.matrix, x1, x2)
    }

    fn grad_x1(&self, _x1: &[f64], x2: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, x2)
    }

    fn grad_x2(&self, x1: &[f64], _x2: &[f64]) -> Vec<f64> {
        mat_t_vec(&self.matrix, x1)
    }

    // The opponent lives on a simplex, so sup ‖M y‖_* over it is attained at a vertex.
    fn lipschitz_x1(&self, norm: Norm) -> f64 {
        match norm {
            Norm::L1 => max_abs(&self.matrix),
            Norm::L2 => self
                .matrix
                .column_iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max),
        }
    }

    fn lipschitz_x2(&self, norm: Norm) -> f64 {
        match norm {
            Norm::L1 => max_abs(&self.matrix),
            Norm::L2 => self.matrix.row_iter().map(|r| r.norm()).fold(0.0, f64::max),
        }
    }
}

/// Rate of one Gaussian channel under adversarial noise:
/// `sign · log(1 + gain · x2[signal] / (floor + x1[noise]))`.
///
/// The noise allocation is the first argument so that the rate is convex in
/// it; `sign = +1` is the noise agent's cost, `sign = -1` the transmitter's.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRateCost {
    pub signal_index: usize,
    pub noise_index: usize,
    pub noise_floor: f64,
    pub gain: f64,
    pub sign: f64,
}

impl ChannelRateCost {
    pub fn rate(&self, noise: &[f64], signal: &[f64]) -> f64 {
        let s = self.noise_floor + noise[self.noise_index];
        (self.gain * signal[self.signal_index] / s).ln_1p()
    }
}

impl AgentCost for ChannelRateCost {
    fn value(&self, x1: &[f64], x2: &[f64]) -> f64 {
        self.sign * self.rate(x1, x2)
    }

    fn grad_x1(&self, x1: &[f64], x2: &[f64]) -> Vec<f64> {
        let s = self.noise_floor + x1[self.noise_index];
        let p = self.gain * x2[self.signal_index];
        let mut g = vec![0.0; x1.len()];
        g[self.noise_index] = -self.sign * p / (s * (s + p));
        g
    }

    fn grad_x2(&self, x1: &[f64], x2: &[f64]) -> Vec<f64> {
        let s = self.noise_floor + x1[self.noise_index];
        let p = self.gain * x2[self.signal_index];
        let mut g = vec![0.0; x2.len()];
        g[self.signal_index] = self.sign * self.gain / (s + p);
        g
    }

    // Gradients have one nonzero component, so every l_p dual norm agrees.
    // Bounds assume both arguments in [0, 1].
    fn lipschitz_x1(&self, _norm: Norm) -> f64 {
        let s = self.noise_floor;
        self.gain / (s * (s + self.gain))
    }

    fn lipschitz_x2(&self, _norm: Norm) -> f64 {
        self.gain / self.noise_floor
    }
}

type ValueFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;

/// Cost assembled from closures, with caller-declared Lipschitz constants
/// (the same constants are reported for every norm).
pub struct ClosureCost {
    value: Box<ValueFn>,
    grad1: Box<GradFn>,
    grad2: Box<GradFn>,
    lipschitz: (f64, f64),
}

impl ClosureCost {
    pub fn new(
        value: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
        grad1: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        grad2: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
        lipschitz: (f64, f64),
    ) -> Self {
        ClosureCost {
            value: Box::new(value),
            grad1: Box::new(grad1),
            grad2: Box::new(grad2),
            lipschitz,
        }
    }
}

impl fmt::Debug for ClosureCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosureCost")
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

impl AgentCost for ClosureCost {
    fn value(&self, x1: &[f64], x2: &[f64]) -> f64 {
        (self.value)(x1, x2)
    }
    fn grad_x1(&self, x1: &[f64], x2: &[f64]) -> Vec<f64> {
        (self.grad1)(x1, x2)
    }
    fn grad_x2(&self, x1: &[f64], x2: &[f64]) -> Vec<f64> {
        (self.grad2)(x1, x2)
    }
    fn lipschitz_x1(&self, _norm: Norm) -> f64 {
        self.lipschitz.0
    }
    fn lipschitz_x2(&self, _norm: Norm) -> f64 {
        self.lipschitz.1
    }
}

pub(crate) fn bilinear(m: &DMatrix<f64>, x1: &[f64], x2: &[f64]) -> f64 {
    let mut total = 0.0;
    for (p, &a) in x1.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for (q, &b) in x2.iter().enumerate() {
            row += m[(p, q)] * b;
        }
        total += a * row;
    }
    total
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|p| x.iter().enumerate().map(|(q, &b)| m[(p, q)] * b).sum())
        .collect()
}

pub(crate) fn mat_t_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..m.ncols())
        .map(|q| x.iter().enumerate().map(|(p, &a)| m[(p, q)] * a).sum())
        .collect()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}
