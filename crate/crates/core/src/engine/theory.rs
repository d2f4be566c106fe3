use serde::{Deserialize, Serialize};

use super::StepSchedule;
use crate::error::{Error, Result};
use crate::game::{ActionDomain, Side, SubnetworkZeroSumGame};
use crate::geometry::BregmanGeometry;
use crate::network::CommunicationSchedule;

/// Inputs to the regret, consensus and constant-step bounds.
///
/// Index `[l]` refers to side `l + 1`. `lip_own[l]` is `L_{l,1}` and
/// `lip_other[l]` is `L_{l,2}`, each in the norm of the variable it
/// differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub n: [usize; 2],
    pub lip_own: [f64; 2],
    pub lip_other: [f64; 2],
    pub sigma: [f64; 2],
    pub gamma: [f64; 2],
    pub theta: [f64; 2],
    /// `Λ_l = max_i ‖x_{l,i}(0)‖`.
    pub lambda: [f64; 2],
    /// `Υ_l`, see [`upsilon`].
    pub upsilon: [f64; 2],
}

impl TheoryConstants {
    pub fn from_run(
        game: &SubnetworkZeroSumGame,
        geometries: [BregmanGeometry; 2],
        schedule: &CommunicationSchedule,
        initial: &[Vec<Vec<f64>>; 2],
    ) -> Result<Self> {
        let mut c = TheoryConstants {
            n: [game.agents(Side::One), game.agents(Side::Two)],
            lip_own: [0.0; 2],
            lip_other: [0.0; 2],
            sigma: geometries.map(BregmanGeometry::sigma),
            gamma: [0.0; 2],
            theta: [0.0; 2],
            lambda: [0.0; 2],
            upsilon: [0.0; 2],
        };
        for side in Side::BOTH {
            let l = side.index();
            let o = side.other().index();
            c.lip_own[l] = game.lipschitz(geometries[l].norm()).own[l];
            c.lip_other[l] = game.lipschitz(geometries[o].norm()).other[l];
            let decay = schedule.decay(side);
            c.gamma[l] = decay.gamma;
            c.theta[l] = decay.theta;
            c.lambda[l] = initial[l]
                .iter()
                .map(|x| geometries[l].norm().of(x))
                .fold(0.0, f64::max);
            c.upsilon[l] = initial[l]
                .iter()
                .map(|x| upsilon(geometries[l], game.domain(side), x))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let all = self
            .lip_own
            .iter()
            .chain(&self.lip_other)
            .chain(&self.sigma)
            .chain(&self.gamma)
            .chain(&self.lambda)
            .chain(&self.upsilon);
        if all.clone().any(|v| !v.is_finite() || *v < 0.0) || self.sigma.iter().any(|&s| s <= 0.0) {
            return Err(Error::Parameter("theory constants must be finite, nonnegative, σ > 0".into()));
        }
        if self.theta.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::Parameter("θ must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// `L`, the largest of the four Lipschitz constants.
    pub fn lip_max(&self) -> f64 {
        self.lip_own
            .iter()
            .chain(&self.lip_other)
            .fold(0.0, |m, &v| m.max(v))
    }

    /// `K_l = (1/σ_l)(n_l L Γ_l / (1 − θ_l) + 2L)`.
    pub fn k(&self, side: Side) -> f64 {
        let l = side.index();
        let big_l = self.lip_max();
        (self.n[l] as f64 * big_l * self.gamma[l] / (1.0 - self.theta[l]) + 2.0 * big_l) / self.sigma[l]
    }

    /// Same constants with the roles of the two sides exchanged.
    pub fn swapped(&self) -> Self {
        let s = |a: [f64; 2]| [a[1], a[0]];
        TheoryConstants {
            n: [self.n[1], self.n[0]],
            lip_own: s(self.lip_own),
            lip_other: s(self.lip_other),
            sigma: s(self.sigma),
            gamma: s(self.gamma),
            theta: s(self.theta),
            lambda: s(self.lambda),
            upsilon: s(self.upsilon),
        }
    }

    fn init_term(&self, k: i64) -> f64 {
        (0..2)
            .map(|l| self.n[l] as f64 * self.gamma[l] * self.theta[l].powf(k as f64) * self.lambda[l])
            .sum()
    }
}

/// Diameter-type constant `Υ` of a geometry around reference point `x̆`.
///
/// Entropy: `max_x KL(x ‖ x̆) = −log min_p x̆_p`, which is `log M` at the
/// uniform point. Euclidean: `√(max_x ½‖x − x̆‖²)`, the maximum taken over
/// the vertices of the simplex or the corners of a box.
pub fn upsilon(geom: BregmanGeometry, domain: &ActionDomain, reference: &[f64]) -> Result<f64> {
    match geom {
        BregmanGeometry::Entropy => {
            let min = reference.iter().fold(f64::INFINITY, |m, &v| m.min(v));
            if min <= 0.0 {
                return Err(Error::SingularReference {
                    index: reference.iter().position(|&v| v <= 0.0).unwrap_or(0),
                    value: min,
                });
            }
            Ok(-min.ln())
        }
        BregmanGeometry::Euclidean => {
            let sq: f64 = match domain {
                ActionDomain::Simplex { dim } => {
                    let norm_sq: f64 = reference.iter().map(|v| v * v).sum();
                    (0..*dim)
                        .map(|p| norm_sq - 2.0 * reference[p] + 1.0)
                        .fold(0.0, f64::max)
                }
                ActionDomain::Box { lower, upper } => reference
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(&r, (&lo, &hi))| (r - lo).abs().max((hi - r).abs()).powi(2))
                    .sum(),
            };
            Ok((0.5 * sq).sqrt())
        }
    }
}

/// Regret bound for every side-one agent after `T` rounds:
///
/// ```text
/// (4/σ1)(n1 L11² Γ1/(1−θ1) + 2 L11²) Σ_{t=1}^T α(t−1)
///   + Υ1² / α(T)
///   + (12/σ2)(n2 L12 L21 Γ2/(1−θ2) + 2 L12 L21) Σ_{t=1}^T α(t−1)
///   + 4 Σ_{t=1}^T Σ_l n_l Γ_l θ_l^{t−1} Λ_l
///   + Σ_{t=1}^T α(t) L11² / σ1
/// ```
///
/// The `Υ` term uses side one's constant.
pub fn theorem1_bound(c: &TheoryConstants, steps: &StepSchedule, horizon: usize) -> f64 {
    let sum_prev = steps.partial_sum(0, horizon);
    let sum_cur = steps.partial_sum(1, horizon + 1);
    let l11 = c.lip_own[0];
    let cross = c.lip_other[0] * c.lip_own[1];
    let n = c.n.map(|v| v as f64);
    let own = 4.0 / c.sigma[0] * (n[0] * l11 * l11 * c.gamma[0] / (1.0 - c.theta[0]) + 2.0 * l11 * l11);
    let opp = 12.0 / c.sigma[1] * (n[1] * cross * c.gamma[1] / (1.0 - c.theta[1]) + 2.0 * cross);
    let init: f64 = (1..=horizon).map(|t| c.init_term(t as i64 - 1)).sum();
    own * sum_prev
        + c.upsilon[0].powi(2) / steps.alpha(horizon)
        + opp * sum_prev
        + 4.0 * init
        + sum_cur * l11 * l11 / c.sigma[0]
}

/// [`theorem1_bound`] for either side; side two uses the mirrored constants.
pub fn regret_bound(c: &TheoryConstants, side: Side, steps: &StepSchedule, horizon: usize) -> f64 {
    match side {
        Side::One => theorem1_bound(c, steps, horizon),
        Side::Two => theorem1_bound(&c.swapped(), steps, horizon),
    }
}

/// [`regret_bound`] at every horizon `0..=T`, accumulated in one pass.
pub fn theorem1_bound_series(c: &TheoryConstants, side: Side, steps: &StepSchedule, horizon: usize) -> Vec<f64> {
    let c = match side {
        Side::One => *c,
        Side::Two => c.swapped(),
    };
    let l11 = c.lip_own[0];
    let cross = c.lip_other[0] * c.lip_own[1];
    let n = c.n.map(|v| v as f64);
    let own = 4.0 / c.sigma[0] * (n[0] * l11 * l11 * c.gamma[0] / (1.0 - c.theta[0]) + 2.0 * l11 * l11);
    let opp = 12.0 / c.sigma[1] * (n[1] * cross * c.gamma[1] / (1.0 - c.theta[1]) + 2.0 * cross);
    let (mut sum_prev, mut sum_cur, mut init) = (0.0, 0.0, 0.0);
    let mut out = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        if t >= 1 {
            sum_prev += steps.alpha(t - 1);
            sum_cur += steps.alpha(t);
            init += c.init_term(t as i64 - 1);
        }
        out.push(
            (own + opp) * sum_prev
                + c.upsilon[0].powi(2) / steps.alpha(t)
                + 4.0 * init
                + sum_cur * l11 * l11 / c.sigma[0],
        );
    }
    out
}

/// Consensus bound
/// `H_l(t) = n Γ θ^{t−1} Λ + (2/σ) L_{l,1} α(t−1) + (1/σ) n L_{l,1} Γ Σ_{s=1}^{t−1} θ^{t−1−s} α(s−1)`.
pub fn consensus_bound_h(c: &TheoryConstants, side: Side, t: usize, steps: &StepSchedule) -> Result<f64> {
    if t == 0 {
        return Err(Error::Parameter("consensus bound is defined for t ≥ 1".into()));
    }
    let l = side.index();
    let theta = c.theta[l];
    let inner: f64 = (1..t)
        .map(|s| theta.powf((t - 1 - s) as f64) * steps.alpha(s - 1))
        .sum();
    Ok(h_from_inner(c, l, t, steps, inner))
}

fn h_from_inner(c: &TheoryConstants, l: usize, t: usize, steps: &StepSchedule, inner: f64) -> f64 {
    let n = c.n[l] as f64;
    let lip = c.lip_own[l];
    n * c.gamma[l] * c.theta[l].powf((t - 1) as f64) * c.lambda[l]
        + 2.0 / c.sigma[l] * lip * steps.alpha(t - 1)
        + n * lip * c.gamma[l] * inner / c.sigma[l]
}

/// `H_l(1), …, H_l(T)` via the recursion `S(t+1) = θ S(t) + α(t−1)`.
pub fn consensus_bound_series(c: &TheoryConstants, side: Side, steps: &StepSchedule, horizon: usize) -> Vec<f64> {
    let l = side.index();
    let mut inner = 0.0;
    let mut out = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        if t >= 2 {
            inner = c.theta[l] * inner + steps.alpha(t - 2);
        }
        out.push(h_from_inner(c, l, t, steps, inner));
    }
    out
}

/// Constant-step error bound on `|U(x̂_1, x̂_2) − U*|` for the uniform
/// running averages after `t` rounds:
///
/// ```text
/// Σ_l (Υ_l² / (tα) + L² α / σ_l) + 4L(K_1 + K_2) α
///   + (4L/t) Σ_{s=0}^{t−1} Σ_l n_l Γ_l θ_l^{s−1} Λ_l
/// ```
pub fn theorem3_error_bound(c: &TheoryConstants, alpha: f64, t: usize) -> Result<f64> {
    if !(alpha > 0.0) || t == 0 {
        return Err(Error::Parameter(format!("need α > 0 and t ≥ 1, got α = {alpha}, t = {t}")));
    }
    let big_l = c.lip_max();
    let tf = t as f64;
    let per_side: f64 = (0..2)
        .map(|l| c.upsilon[l].powi(2) / (tf * alpha) + big_l * big_l * alpha / c.sigma[l])
        .sum();
    let k = c.k(Side::One) + c.k(Side::Two);
    let init: f64 = (0..t).map(|s| c.init_term(s as i64 - 1)).sum();
    Ok(per_side + 4.0 * big_l * k * alpha + 4.0 * big_l * init / tf)
}

/// `lim_{t→∞}` of [`theorem3_error_bound`]: `Σ_l L² α/σ_l + 4L(K_1+K_2)α`.
pub fn theorem3_asymptotic(c: &TheoryConstants, alpha: f64) -> f64 {
    let big_l = c.lip_max();
    let per_side: f64 = c.sigma.iter().map(|s| big_l * big_l * alpha / s).sum();
    per_side + 4.0 * big_l * (c.k(Side::One) + c.k(Side::Two)) * alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TheoryConstants {
        TheoryConstants {
            n: [3, 2],
            lip_own: [1.5, 0.5],
            lip_other: [2.0, 1.0],
            sigma: [1.0, 1.0],
            gamma: [1.2, 1.1],
            theta: [0.9, 0.8],
            lambda: [1.0, 1.0],
            upsilon: [0.7, 0.3],
        }
    }

    #[test]
    fn theorem1_at_zero_horizon_is_upsilon_term() {
        let c = sample();
        let steps = StepSchedule::power(0.5).unwrap();
        assert_eq!(theorem1_bound(&c, &steps, 0), 0.7f64.powi(2));
    }

    #[test]
    fn theorem1_two_rounds_term_by_term() {
        // α(t) = (t+1)^{-1}: α(0)=1, α(1)=1/2, α(2)=1/3.
        let c = sample();
        let steps = StepSchedule::power(1.0).unwrap();
        let own = 4.0 * (3.0 * 2.25 * 1.2 / 0.1 + 2.0 * 2.25);
        let opp = 12.0 * (2.0 * 2.0 * 0.5 * 1.1 / 0.2 + 2.0 * 2.0 * 0.5);
        let step_sum = 1.5;
        let ups = 0.49 * 3.0;
        let init = 4.0 * ((3.0 * 1.2 + 2.0 * 1.1) + (3.0 * 1.2 * 0.9 + 2.0 * 1.1 * 0.8));
        let last = (0.5 + 1.0 / 3.0) * 2.25;
        let expected = own * step_sum + ups + opp * step_sum + init + last;
        assert!((theorem1_bound(&c, &steps, 2) - expected).abs() < 1e-12);
    }

    #[test]
    fn theorem1_increases_with_gamma() {
        let c = sample();
        let mut d = c;
        d.gamma[0] *= 2.0;
        let steps = StepSchedule::power(0.5).unwrap();
        for t in 1..20 {
            assert!(theorem1_bound(&d, &steps, t) > theorem1_bound(&c, &steps, t));
        }
    }

    #[test]
    fn consensus_bound_first_round() {
        let c = sample();
        let steps = StepSchedule::power(0.5).unwrap();
        let h = consensus_bound_h(&c, Side::One, 1, &steps).unwrap();
        assert!((h - (3.0 * 1.2 + 2.0 * 1.5)).abs() < 1e-15);
        assert!(consensus_bound_h(&c, Side::One, 0, &steps).is_err());
    }

    #[test]
    fn consensus_bound_constant_step_limit() {
        let c = sample();
        let alpha = 0.05;
        let steps = StepSchedule::constant(alpha).unwrap();
        for side in Side::BOTH {
            let l = side.index();
            let n = c.n[l] as f64;
            let limit = n * c.lip_own[l] * c.gamma[l] * alpha / (c.sigma[l] * (1.0 - c.theta[l]))
                + 2.0 * c.lip_own[l] * alpha / c.sigma[l];
            let h = consensus_bound_h(&c, side, 200, &steps).unwrap();
            assert!((h - limit).abs() < 1e-8, "{h} vs {limit}");
        }
    }

    #[test]
    fn theorem1_series_matches_direct() {
        let c = sample();
        let steps = StepSchedule::power(0.75).unwrap();
        for side in Side::BOTH {
            let series = theorem1_bound_series(&c, side, &steps, 80);
            for (t, b) in series.iter().enumerate() {
                let direct = regret_bound(&c, side, &steps, t);
                assert!((b - direct).abs() <= 1e-12 * direct, "{side} {t}");
            }
        }
    }

    #[test]
    fn consensus_series_matches_direct() {
        let c = sample();
        let steps = StepSchedule::power(0.6).unwrap();
        let series = consensus_bound_series(&c, Side::Two, &steps, 60);
        for (k, h) in series.iter().enumerate() {
            let direct = consensus_bound_h(&c, Side::Two, k + 1, &steps).unwrap();
            assert!((h - direct).abs() <= 1e-12 * direct);
        }
    }

    #[test]
    fn theorem3_first_round_and_limit() {
        let c = sample();
        let alpha = 0.1;
        let big_l = 2.0;
        let k1 = 3.0 * big_l * 1.2 / 0.1 + 2.0 * big_l;
        let k2 = 2.0 * big_l * 1.1 / 0.2 + 2.0 * big_l;
        let expected = (0.49 + 0.09) / alpha
            + 2.0 * big_l * big_l * alpha
            + 4.0 * big_l * (k1 + k2) * alpha
            + 4.0 * big_l * (3.0 * 1.2 / 0.9 + 2.0 * 1.1 / 0.8);
        assert!((theorem3_error_bound(&c, alpha, 1).unwrap() - expected).abs() < 1e-10);
        let far = theorem3_error_bound(&c, alpha, 10_000_000).unwrap();
        let limit = theorem3_asymptotic(&c, alpha);
        assert!((far - limit).abs() < 1e-4 * limit);
        assert!((theorem3_asymptotic(&c, alpha / 2.0) - limit / 2.0).abs() < 1e-12 * limit);
        assert!(theorem3_error_bound(&c, 0.0, 1).is_err());
    }

    #[test]
    fn upsilon_values() {
        let d = ActionDomain::simplex(4).unwrap();
        let u = d.center();
        assert!((upsilon(BregmanGeometry::Entropy, &d, &u).unwrap() - 4f64.ln()).abs() < 1e-15);
        let e = upsilon(BregmanGeometry::Euclidean, &d, &u).unwrap();
        assert!((e * e - 0.5 * 0.75).abs() < 1e-15);
        assert!(upsilon(BregmanGeometry::Entropy, &d, &[1.0, 0.0, 0.0, 0.0]).is_err());
    }
}
