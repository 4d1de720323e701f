//! Direct trust of a device in a service provider, computed from the closed
//! slots of its [`TrustWindow`].
//!
//! The pipeline is: mean rating (`t_tr`), positional freshness (`w_t`),
//! their F-beta style harmonic combination, then a reward factor driven by
//! the count of high ratings and a penalty factor driven by the count of
//! low ratings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::window::TrustWindow;

/// Trust value assigned to entities with no evidence.
pub const UNCERTAINTY_DEFAULT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("beta must be positive, got {0}")]
    Beta(f64),
    #[error("reward exponent must lie in [0, 2], got {0}")]
    RewardExp(f64),
    #[error("penalty exponent must lie in [0, 2], got {0}")]
    PenaltyExp(f64),
    #[error("zone thresholds must satisfy 0 <= low <= high <= 1, got low={low} high={high}")]
    Thresholds { low: f64, high: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustParams {
    pub beta: f64,
    pub reward_exp: f64,
    pub penalty_exp: f64,
    /// Ratings strictly above this count as high.
    pub high_threshold: f64,
    /// Ratings strictly below this count as low.
    pub low_threshold: f64,
}

impl Default for TrustParams {
    fn default() -> Self {
        Self {
            beta: 7.0,
            reward_exp: 1.5,
            penalty_exp: 0.25,
            high_threshold: 0.7,
            low_threshold: 0.3,
        }
    }
}

impl TrustParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(ParamsError::Beta(self.beta));
        }
        if !(0.0..=2.0).contains(&self.reward_exp) {
            return Err(ParamsError::RewardExp(self.reward_exp));
        }
        if !(0.0..=2.0).contains(&self.penalty_exp) {
            return Err(ParamsError::PenaltyExp(self.penalty_exp));
        }
        let (low, high) = (self.low_threshold, self.high_threshold);
        if !(0.0 <= low && low <= high && high <= 1.0) {
            return Err(ParamsError::Thresholds { low, high });
        }
        Ok(())
    }
}

/// Every intermediate quantity of one direct-trust evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustFactors {
    pub t_tr: f64,
    pub w_t: f64,
    pub t_intermediate: f64,
    pub highvalues: usize,
    pub lowvalues: usize,
    pub reward: f64,
    pub penalty: f64,
    pub direct_trust: f64,
}

impl TrustFactors {
    fn uncertain() -> Self {
        Self {
            t_tr: UNCERTAINTY_DEFAULT,
            w_t: UNCERTAINTY_DEFAULT,
            t_intermediate: UNCERTAINTY_DEFAULT,
            highvalues: 0,
            lowvalues: 0,
            reward: 1.0,
            penalty: 1.0,
            direct_trust: UNCERTAINTY_DEFAULT,
        }
    }
}

/// Mean rating value, or `None` when the window holds no ratings.
pub fn trust_score_factor(window: &TrustWindow) -> Option<f64> {
    let (sum, n) = window
        .positioned_ratings()
        .fold((0.0, 0usize), |(s, n), (_, r)| (s + r.value(), n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mean positional weight of the window's ratings, where a rating in slot
/// `j` (1-based, oldest first) weighs `j / slot_count`. Flipped to
/// `1 - mean` when `t_tr < 0.5`.
pub fn time_weight_factor(window: &TrustWindow, t_tr: f64) -> Option<f64> {
    let slots = window.slot_count() as f64;
    let (sum, n) = window
        .positioned_ratings()
        .fold((0.0, 0usize), |(s, n), (pos, _)| (s + pos as f64 / slots, n + 1));
    if n == 0 {
        return None;
    }
    let mean = sum / n as f64;
    Some(if t_tr >= 0.5 { mean } else { 1.0 - mean })
}

/// `(1 + β²)·w_t·t_tr / (β²·w_t + t_tr)`, with `0/0` taken as 0.
pub fn intermediate_trust(t_tr: f64, w_t: f64, beta: f64) -> f64 {
    // weighted harmonic mean of equal values; the general form rounds
    if t_tr == w_t {
        return t_tr;
    }
    let b2 = beta * beta;
    let denom = b2 * w_t + t_tr;
    if denom == 0.0 {
        return 0.0;
    }
    ((1.0 + b2) * w_t * t_tr / denom).clamp(0.0, 1.0)
}

pub fn reward_factor(highvalues: usize, r: f64) -> f64 {
    1.0 - 1.0 / (highvalues as f64 + 2.0).powf(r)
}

pub fn penalty_factor(lowvalues: usize, e: f64) -> f64 {
    1.0 / (lowvalues as f64 + 1.0).powf(e)
}

/// Full direct-trust evaluation. An empty window yields the uncertainty
/// default of 0.5 for the trust value.
pub fn direct_trust(window: &TrustWindow, params: &TrustParams) -> TrustFactors {
    let Some(t_tr) = trust_score_factor(window) else {
        return TrustFactors::uncertain();
    };
    let w_t = time_weight_factor(window, t_tr).expect("non-empty window has a time weight");
    let t_intermediate = intermediate_trust(t_tr, w_t, params.beta);

    let (mut highvalues, mut lowvalues) = (0, 0);
    for (_, r) in window.positioned_ratings() {
        if r.value() > params.high_threshold {
            highvalues += 1;
        } else if r.value() < params.low_threshold {
            lowvalues += 1;
        }
    }
    let reward = reward_factor(highvalues, params.reward_exp);
    let penalty = penalty_factor(lowvalues, params.penalty_exp);

    TrustFactors {
        t_tr,
        w_t,
        t_intermediate,
        highvalues,
        lowvalues,
        reward,
        penalty,
        direct_trust: (reward * penalty * t_intermediate).clamp(0.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window::WindowConfig;

    fn window(slots: &[Vec<f64>]) -> TrustWindow {
        let config = WindowConfig {
            slot_duration: 20.0,
            max_rating: 1000,
            min_rating: 1,
        };
        TrustWindow::from_slot_values(config, slots).unwrap()
    }

    #[test]
    fn trust_score_factor_is_mean() {
        let w = window(&[vec![0.1, 0.7, 0.4]]);
        assert!((trust_score_factor(&w).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(trust_score_factor(&window(&[vec![0.37]])), Some(0.37));
        assert_eq!(trust_score_factor(&window(&[vec![0.5; 4], vec![0.5]])), Some(0.5));
        assert_eq!(trust_score_factor(&window(&[])), None);
        assert_eq!(trust_score_factor(&window(&[vec![], vec![]])), None);
    }

    #[test]
    fn time_weight_second_of_four_slots() {
        let w = window(&[vec![], vec![0.1, 0.7, 0.4], vec![], vec![]]);
        assert_eq!(time_weight_factor(&w, 0.6), Some(0.5));
        assert_eq!(time_weight_factor(&w, 0.4), Some(0.5));
    }

    #[test]
    fn time_weight_newest_slot_branches() {
        let w = window(&[vec![], vec![], vec![], vec![], vec![0.8, 0.8]]);
        assert_eq!(time_weight_factor(&w, 0.8), Some(1.0));
        assert_eq!(time_weight_factor(&w, 0.2), Some(0.0));
        assert_eq!(time_weight_factor(&window(&[]), 0.8), None);
    }

    #[test]
    fn intermediate_trust_values() {
        assert_eq!(intermediate_trust(0.42, 0.42, 7.0), 0.42);
        assert!((intermediate_trust(1.0, 0.2, 7.0) - 10.0 / 10.8).abs() < 1e-12);
        assert!((intermediate_trust(1.0, 0.2, 7.0) - 0.9259).abs() < 1e-4);
        assert!((intermediate_trust(0.2, 0.8, 7.0) - 8.0 / 39.4).abs() < 1e-12);
        assert!((intermediate_trust(0.2, 0.8, 7.0) - 0.2030).abs() < 1e-4);
        assert_eq!(intermediate_trust(0.0, 0.0, 7.0), 0.0);
    }

    #[test]
    fn reward_values() {
        assert!((reward_factor(0, 1.5) - (1.0 - 2f64.powf(-1.5))).abs() < 1e-12);
        assert!((reward_factor(0, 1.5) - 0.6464).abs() < 1e-4);
        assert!((reward_factor(2, 1.5) - 0.875).abs() < 1e-12);
        for h in [0, 1, 7, 100] {
            assert_eq!(reward_factor(h, 0.0), 0.0);
        }
    }

    #[test]
    fn penalty_values() {
        for e in [0.0, 0.25, 1.0, 2.0] {
            assert_eq!(penalty_factor(0, e), 1.0);
        }
        assert!((penalty_factor(15, 0.25) - 0.5).abs() < 1e-12);
        for l in [0, 3, 50] {
            assert_eq!(penalty_factor(l, 0.0), 1.0);
        }
    }

    #[test]
    fn single_perfect_rating() {
        let f = direct_trust(&window(&[vec![1.0]]), &TrustParams::default());
        assert_eq!(f.t_tr, 1.0);
        assert_eq!(f.w_t, 1.0);
        assert_eq!(f.t_intermediate, 1.0);
        assert_eq!((f.highvalues, f.lowvalues), (1, 0));
        assert_eq!(f.penalty, 1.0);
        assert!((f.direct_trust - (1.0 - 3f64.powf(-1.5))).abs() < 1e-12);
        assert!((f.direct_trust - 0.8075).abs() < 1e-4);
    }

    #[test]
    fn empty_window_is_uncertain() {
        let f = direct_trust(&window(&[]), &TrustParams::default());
        assert_eq!(f.direct_trust, 0.5);
        assert_eq!((f.highvalues, f.lowvalues), (0, 0));
    }

    #[test]
    fn on_off_provider_gets_lower_trust() {
        // same T_intermediate, different high/low mix
        let p = TrustParams::default();
        let t_int = 0.6;
        let dt = |h, l| reward_factor(h, p.reward_exp) * penalty_factor(l, p.penalty_exp) * t_int;
        assert!(dt(10, 10) < dt(19, 1));
    }

    #[test]
    fn boundary_ratings_are_neither_high_nor_low() {
        let f = direct_trust(&window(&[vec![0.7, 0.3, 0.71, 0.29]]), &TrustParams::default());
        assert_eq!((f.highvalues, f.lowvalues), (1, 1));
    }

    #[test]
    fn params_validation() {
        assert!(TrustParams::default().validate().is_ok());
        let bad = [
            TrustParams {
                beta: 0.0,
                ..Default::default()
            },
            TrustParams {
                reward_exp: 2.5,
                ..Default::default()
            },
            TrustParams {
                penalty_exp: -0.1,
                ..Default::default()
            },
            TrustParams {
                low_threshold: 0.8,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }
}
