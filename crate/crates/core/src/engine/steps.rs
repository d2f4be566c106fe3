use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step sizes `α(t)`, `t = 0, 1, 2, …`.
///
/// The power rule is shifted by one, `α(t) = (t + 1)^{-κ}`, so that it is
/// defined at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StepSchedule {
    Constant { alpha: f64 },
    Power { kappa: f64 },
}

impl StepSchedule {
    pub fn constant(alpha: f64) -> Result<Self> {
        let s = StepSchedule::Constant { alpha };
        s.validate()?;
        Ok(s)
    }

    /// `α ≡ 1/√T`, the constant rate giving `O(√T)` regret over horizon `T`.
    pub fn for_horizon(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Parameter("horizon must be positive".into()));
        }
        StepSchedule::constant(1.0 / (horizon as f64).sqrt())
    }

    /// `κ` must lie in `[1/2, 1]`. At `κ = 1/2` the steps are not square
    /// summable, which still gives sublinear regret but not convergence
    /// of the iterates.
    pub fn power(kappa: f64) -> Result<Self> {
        let s = StepSchedule::Power { kappa };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::Constant { alpha } if !(alpha > 0.0 && alpha.is_finite()) => Err(
                Error::Parameter(format!("constant step must be positive and finite, got {alpha}")),
            ),
            StepSchedule::Power { kappa } if !(0.5..=1.0).contains(&kappa) => {
                Err(Error::Parameter(format!(
                    "power step exponent κ = {kappa} outside [1/2, 1]: for κ < 1/2 the squared steps are \
                     not summable and the regret bound is not sublinear; for κ > 1 the steps are summable"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn alpha(&self, t: usize) -> f64 {
        match *self {
            StepSchedule::Constant { alpha } => alpha,
            StepSchedule::Power { kappa } => ((t + 1) as f64).powf(-kappa),
        }
    }

    /// Whether `Σ α = ∞` and `Σ α² < ∞`.
    pub fn is_square_summable_divergent(&self) -> bool {
        matches!(*self, StepSchedule::Power { kappa } if kappa > 0.5 && kappa <= 1.0)
    }

    /// `Σ_{t=from}^{to-1} α(t)`.
    pub fn partial_sum(&self, from: usize, to: usize) -> f64 {
        match *self {
            StepSchedule::Constant { alpha } => alpha * to.saturating_sub(from) as f64,
            StepSchedule::Power { .. } => (from..to).map(|t| self.alpha(t)).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_rule_is_shifted() {
        let s = StepSchedule::power(0.5).unwrap();
        assert_eq!(s.alpha(0), 1.0);
        assert_eq!(s.alpha(3), 0.5);
        let s = StepSchedule::power(1.0).unwrap();
        assert_eq!(s.alpha(9), 0.1);
    }

    #[test]
    fn horizon_preset() {
        let s = StepSchedule::for_horizon(10_000).unwrap();
        assert_eq!(s.alpha(0), 0.01);
        assert_eq!(s.alpha(9_999), 0.01);
        assert!(StepSchedule::for_horizon(0).is_err());
    }

    #[test]
    fn validation() {
        assert!(StepSchedule::power(0.4).is_err());
        assert!(StepSchedule::power(1.2).is_err());
        assert!(StepSchedule::constant(0.0).is_err());
        assert!(StepSchedule::constant(f64::INFINITY).is_err());
        assert!(!StepSchedule::power(0.5).unwrap().is_square_summable_divergent());
        assert!(StepSchedule::power(0.6).unwrap().is_square_summable_divergent());
    }

    #[test]
    fn schedules_are_nonincreasing_and_positive() {
        for s in [
            StepSchedule::power(0.5).unwrap(),
            StepSchedule::power(0.75).unwrap(),
            StepSchedule::constant(0.3).unwrap(),
        ] {
            let mut prev = f64::INFINITY;
            for t in 0..1000 {
                let a = s.alpha(t);
                assert!(a > 0.0 && a <= prev);
                prev = a;
            }
        }
    }

    #[test]
    fn partial_sums() {
        let s = StepSchedule::power(1.0).unwrap();
        assert!((s.partial_sum(0, 4) - (1.0 + 0.5 + 1.0 / 3.0 + 0.25)).abs() < 1e-15);
        assert_eq!(StepSchedule::constant(0.5).unwrap().partial_sum(2, 6), 2.0);
        assert_eq!(s.partial_sum(5, 5), 0.0);
    }
}
