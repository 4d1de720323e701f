//! Behaviour models for service providers and raters.
//!
//! Service providers decide whether a service is delivered on time; devices
//! turn that into a rating; raters decide what direct trust they report to
//! the community server.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Probability that an honest provider delays a service.
pub const HONEST_DELAY_PROB: f64 = 0.05;
/// Probability that a malicious provider delays a service.
pub const MALICIOUS_DELAY_PROB: f64 = 0.95;

pub const ON_TIME_RATING: (f64, f64) = (0.8, 1.0);
pub const DELAYED_RATING: (f64, f64) = (0.0, 0.2);
pub const BAD_MOUTHING_REPORT: (f64, f64) = (0.0, 0.25);
pub const BALLOT_STUFFING_REPORT: (f64, f64) = (0.75, 1.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BehaviorError {
    #[error("cycle periods must be positive, got {0} and {1}")]
    Period(f64, f64),
    #[error("fraction {0} is outside [0, 1]")]
    Fraction(f64),
    #[error("cannot parse cycle {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    On,
    Off,
}

/// ON/OFF cycle of an on-off provider: `first` lasts `first_secs`, then the
/// other phase lasts `second_secs`, repeating from t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffSchedule {
    pub on_secs: f64,
    pub off_secs: f64,
    pub starts_with: Phase,
}

impl OnOffSchedule {
    pub fn new(on_secs: f64, off_secs: f64, starts_with: Phase) -> Result<Self, BehaviorError> {
        if !(on_secs > 0.0 && off_secs > 0.0 && on_secs.is_finite() && off_secs.is_finite()) {
            return Err(BehaviorError::Period(on_secs, off_secs));
        }
        Ok(Self {
            on_secs,
            off_secs,
            starts_with,
        })
    }

    pub fn period(&self) -> f64 {
        self.on_secs + self.off_secs
    }

    pub fn phase_at(&self, time: f64) -> Phase {
        let offset = time.rem_euclid(self.period());
        let first_len = match self.starts_with {
            Phase::On => self.on_secs,
            Phase::Off => self.off_secs,
        };
        match (offset < first_len, self.starts_with) {
            (true, first) => first,
            (false, Phase::On) => Phase::Off,
            (false, Phase::Off) => Phase::On,
        }
    }
}

/// Parses `"30on-70off"` (starts ON) or `"70off-30on"` (starts OFF).
impl FromStr for OnOffSchedule {
    type Err = BehaviorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || BehaviorError::Parse(s.to_string());
        let (a, b) = s.trim().split_once('-').ok_or_else(err)?;
        let part = |p: &str| -> Result<(f64, Phase), BehaviorError> {
            let p = p.trim().to_ascii_lowercase();
            let (num, phase) = if let Some(n) = p.strip_suffix("on") {
                (n, Phase::On)
            } else if let Some(n) = p.strip_suffix("off") {
                (n, Phase::Off)
            } else {
                return Err(err());
            };
            let secs = num.trim().trim_end_matches('s').parse::<f64>().map_err(|_| err())?;
            Ok((secs, phase))
        };
        let (first_secs, first) = part(a)?;
        let (second_secs, second) = part(b)?;
        match (first, second) {
            (Phase::On, Phase::Off) => Self::new(first_secs, second_secs, Phase::On),
            (Phase::Off, Phase::On) => Self::new(second_secs, first_secs, Phase::Off),
            _ => Err(err()),
        }
    }
}

impl fmt::Display for OnOffSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.starts_with {
            Phase::On => write!(f, "{}on-{}off", self.on_secs, self.off_secs),
            Phase::Off => write!(f, "{}off-{}on", self.off_secs, self.on_secs),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpBehavior {
    Honest,
    Malicious,
    /// Honest while OFF; while ON, delays with `on_delay_prob`.
    OnOffSchedule {
        schedule: OnOffSchedule,
        on_delay_prob: f64,
    },
    /// Each service is delayed independently with `bad_fraction`.
    OnOffRandom {
        bad_fraction: f64,
    },
}

impl SpBehavior {
    /// Classic on-off provider that is malicious while ON.
    pub fn on_off(schedule: OnOffSchedule) -> Self {
        SpBehavior::OnOffSchedule {
            schedule,
            on_delay_prob: MALICIOUS_DELAY_PROB,
        }
    }

    pub fn random(bad_fraction: f64) -> Result<Self, BehaviorError> {
        if !(0.0..=1.0).contains(&bad_fraction) {
            return Err(BehaviorError::Fraction(bad_fraction));
        }
        Ok(SpBehavior::OnOffRandom { bad_fraction })
    }

    pub fn validate(&self) -> Result<(), BehaviorError> {
        match *self {
            SpBehavior::Honest | SpBehavior::Malicious => Ok(()),
            SpBehavior::OnOffSchedule {
                schedule,
                on_delay_prob,
            } => {
                OnOffSchedule::new(schedule.on_secs, schedule.off_secs, schedule.starts_with)?;
                if !(0.0..=1.0).contains(&on_delay_prob) {
                    return Err(BehaviorError::Fraction(on_delay_prob));
                }
                Ok(())
            }
            SpBehavior::OnOffRandom { bad_fraction } => Self::random(bad_fraction).map(|_| ()),
        }
    }

    pub fn delay_probability(&self, time: f64) -> f64 {
        match *self {
            SpBehavior::Honest => HONEST_DELAY_PROB,
            SpBehavior::Malicious => MALICIOUS_DELAY_PROB,
            SpBehavior::OnOffSchedule {
                schedule,
                on_delay_prob,
            } => match schedule.phase_at(time) {
                Phase::On => on_delay_prob,
                Phase::Off => HONEST_DELAY_PROB,
            },
            SpBehavior::OnOffRandom { bad_fraction } => bad_fraction,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ServiceQuality {
    OnTime,
    Delayed,
}

pub fn sp_service_quality<R: Rng + ?Sized>(behavior: &SpBehavior, time: f64, rng: &mut R) -> ServiceQuality {
    let p = behavior.delay_probability(time);
    if rng.gen::<f64>() < p {
        ServiceQuality::Delayed
    } else {
        ServiceQuality::OnTime
    }
}

fn uniform<R: Rng + ?Sized>(band: (f64, f64), rng: &mut R) -> f64 {
    rng.gen_range(band.0..=band.1)
}

/// Delay-based rating: on-time services land in `[0.8, 1]`, delayed ones in
/// `[0, 0.2]`.
pub fn rate_service<R: Rng + ?Sized>(quality: ServiceQuality, rng: &mut R) -> f64 {
    match quality {
        ServiceQuality::OnTime => uniform(ON_TIME_RATING, rng),
        ServiceQuality::Delayed => uniform(DELAYED_RATING, rng),
    }
}

/// Honest-then-attack cycle of an on-off bad-mouther.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaterCycle {
    pub honest_secs: f64,
    pub attack_secs: f64,
}

impl RaterCycle {
    pub fn new(honest_secs: f64, attack_secs: f64) -> Result<Self, BehaviorError> {
        if !(honest_secs > 0.0 && attack_secs > 0.0 && honest_secs.is_finite() && attack_secs.is_finite()) {
            return Err(BehaviorError::Period(honest_secs, attack_secs));
        }
        Ok(Self {
            honest_secs,
            attack_secs,
        })
    }

    pub fn attacking_at(&self, time: f64) -> bool {
        time.rem_euclid(self.honest_secs + self.attack_secs) >= self.honest_secs
    }
}

/// Parses `"25honest-25attack"`.
impl FromStr for RaterCycle {
    type Err = BehaviorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || BehaviorError::Parse(s.to_string());
        let (a, b) = s.trim().split_once('-').ok_or_else(err)?;
        let honest = a.trim().strip_suffix("honest").ok_or_else(err)?;
        let attack = b.trim().strip_suffix("attack").ok_or_else(err)?;
        let parse = |n: &str| n.trim().parse::<f64>().map_err(|_| err());
        Self::new(parse(honest)?, parse(attack)?)
    }
}

impl fmt::Display for RaterCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}honest-{}attack", self.honest_secs, self.attack_secs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RaterBehavior {
    Honest,
    BadMouthing,
    BallotStuffing,
    BadMouthingOnOff(RaterCycle),
}

impl RaterBehavior {
    pub fn is_honest(&self) -> bool {
        matches!(self, RaterBehavior::Honest)
    }
}

/// Direct trust the rater sends to the community server. Attackers ignore
/// their own computed trust while attacking.
pub fn report_direct_trust<R: Rng + ?Sized>(behavior: &RaterBehavior, true_dt: f64, time: f64, rng: &mut R) -> f64 {
    match behavior {
        RaterBehavior::Honest => true_dt,
        RaterBehavior::BadMouthing => uniform(BAD_MOUTHING_REPORT, rng),
        RaterBehavior::BallotStuffing => uniform(BALLOT_STUFFING_REPORT, rng),
        RaterBehavior::BadMouthingOnOff(cycle) => {
            if cycle.attacking_at(time) {
                uniform(BAD_MOUTHING_REPORT, rng)
            } else {
                true_dt
            }
        }
    }
}
