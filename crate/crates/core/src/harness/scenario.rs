//! TOML scenario files and the built-in presets.
//!
//! ```toml
//! name = "A1"
//! n_devices = 50
//! service_request_interval_s = 4
//! sim_duration_s = 5000
//!
//! [[service_provider]]
//! behavior = "on_off"
//! on_off = "30on-70off"
//!
//! [[rater_group]]
//! behavior = "bad_mouthing"
//! count = 5
//! ```
//!
//! Devices not covered by a rater group are honest. Rater groups take device
//! ids in file order starting from 0.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attacks::{BehaviorError, OnOffSchedule, RaterBehavior, RaterCycle, SpBehavior, MALICIOUS_DELAY_PROB};
use crate::community::FilterMode;
use crate::direct_trust::TrustParams;
use crate::sim::{Escalation, ScenarioConfig, SimError};
use crate::window::WindowConfig;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("scenario line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Behavior(#[from] BehaviorError),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpKind {
    Honest,
    Malicious,
    OnOff,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpSpec {
    pub behavior: SpKind,
    /// Schedule such as `"30on-70off"` or `"70off-30on"`.
    pub on_off: Option<String>,
    /// Delay probability while ON; malicious by default.
    pub on_delay_prob: Option<f64>,
    pub bad_fraction: Option<f64>,
    #[serde(default = "one")]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RaterKind {
    Honest,
    BadMouthing,
    BallotStuffing,
    BadMouthingOnOff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaterGroup {
    pub behavior: RaterKind,
    pub count: usize,
    /// Cycle such as `"25honest-25attack"`.
    pub cycle: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EscalationSpec {
    pub attack: RaterKind,
    pub fractions: Vec<f64>,
    pub block_s: f64,
    pub cycle: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    #[serde(default = "default_max")]
    pub max_rating: usize,
    #[serde(default = "default_min")]
    pub min_rating: usize,
}

impl Default for WindowSection {
    fn default() -> Self {
        Self {
            max_rating: default_max(),
            min_rating: default_min(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustSection {
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_r")]
    pub reward_exp: f64,
    #[serde(default = "default_e")]
    pub penalty_exp: f64,
}

impl Default for TrustSection {
    fn default() -> Self {
        Self {
            beta: default_beta(),
            reward_exp: default_r(),
            penalty_exp: default_e(),
        }
    }
}

fn one() -> usize {
    1
}
fn default_max() -> usize {
    WindowConfig::default().max_rating
}
fn default_min() -> usize {
    WindowConfig::default().min_rating
}
fn default_beta() -> f64 {
    TrustParams::default().beta
}
fn default_r() -> f64 {
    TrustParams::default().reward_exp
}
fn default_e() -> f64 {
    TrustParams::default().penalty_exp
}
fn default_slot() -> f64 {
    WindowConfig::default().slot_duration
}
fn default_interval() -> f64 {
    100.0
}
fn default_duration() -> f64 {
    5000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub n_devices: usize,
    pub service_request_interval_s: f64,
    #[serde(default = "default_slot")]
    pub slot_duration_s: f64,
    #[serde(default = "default_interval")]
    pub domain_trust_interval_s: f64,
    #[serde(default = "default_duration")]
    pub sim_duration_s: f64,
    #[serde(default)]
    pub filter_mode: FilterMode,
    #[serde(default)]
    pub window: WindowSection,
    #[serde(default)]
    pub trust: TrustSection,
    #[serde(rename = "service_provider")]
    pub service_providers: Vec<SpSpec>,
    #[serde(default, rename = "rater_group")]
    pub rater_groups: Vec<RaterGroup>,
    pub escalation: Option<EscalationSpec>,
}

fn rater_behavior(kind: RaterKind, cycle: Option<&str>) -> Result<RaterBehavior, ScenarioError> {
    Ok(match kind {
        RaterKind::Honest => RaterBehavior::Honest,
        RaterKind::BadMouthing => RaterBehavior::BadMouthing,
        RaterKind::BallotStuffing => RaterBehavior::BallotStuffing,
        RaterKind::BadMouthingOnOff => {
            let cycle = cycle.ok_or_else(|| ScenarioError::Invalid("bad_mouthing_on_off needs `cycle`".into()))?;
            RaterBehavior::BadMouthingOnOff(cycle.parse::<RaterCycle>()?)
        }
    })
}

fn sp_behavior(spec: &SpSpec) -> Result<SpBehavior, ScenarioError> {
    let behavior = match spec.behavior {
        SpKind::Honest => SpBehavior::Honest,
        SpKind::Malicious => SpBehavior::Malicious,
        SpKind::OnOff => {
            let schedule = spec
                .on_off
                .as_deref()
                .ok_or_else(|| ScenarioError::Invalid("on_off provider needs `on_off`".into()))?
                .parse::<OnOffSchedule>()?;
            SpBehavior::OnOffSchedule {
                schedule,
                on_delay_prob: spec.on_delay_prob.unwrap_or(MALICIOUS_DELAY_PROB),
            }
        }
        SpKind::Random => SpBehavior::random(
            spec.bad_fraction
                .ok_or_else(|| ScenarioError::Invalid("random provider needs `bad_fraction`".into()))?,
        )?,
    };
    behavior.validate()?;
    Ok(behavior)
}

impl ScenarioFile {
    pub fn to_config(&self) -> Result<ScenarioConfig, ScenarioError> {
        let mut sp_behaviors = Vec::new();
        for spec in &self.service_providers {
            let b = sp_behavior(spec)?;
            sp_behaviors.extend(std::iter::repeat_n(b, spec.count));
        }

        let mut rater_behaviors = Vec::with_capacity(self.n_devices);
        for group in &self.rater_groups {
            let b = rater_behavior(group.behavior, group.cycle.as_deref())?;
            rater_behaviors.extend(std::iter::repeat_n(b, group.count));
        }
        if rater_behaviors.len() > self.n_devices {
            return Err(ScenarioError::Invalid(format!(
                "rater groups cover {} devices but n_devices is {}",
                rater_behaviors.len(),
                self.n_devices
            )));
        }
        rater_behaviors.resize(self.n_devices, RaterBehavior::Honest);

        let escalation = self
            .escalation
            .as_ref()
            .map(|e| {
                Ok::<_, ScenarioError>(Escalation {
                    attack: rater_behavior(e.attack, e.cycle.as_deref())?,
                    fractions: e.fractions.clone(),
                    block_secs: e.block_s,
                })
            })
            .transpose()?;

        let config = ScenarioConfig {
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            n_devices: self.n_devices,
            sp_behaviors,
            rater_behaviors,
            escalation,
            service_request_interval: self.service_request_interval_s,
            domain_trust_interval: self.domain_trust_interval_s,
            sim_duration: self.sim_duration_s,
            window: WindowConfig {
                slot_duration: self.slot_duration_s,
                max_rating: self.window.max_rating,
                min_rating: self.window.min_rating,
            },
            trust: TrustParams {
                beta: self.trust.beta,
                reward_exp: self.trust.reward_exp,
                penalty_exp: self.trust.penalty_exp,
                ..TrustParams::default()
            },
            filter_mode: self.filter_mode,
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let file = toml::from_str::<ScenarioFile>(text).map_err(|e| ScenarioError::Parse {
        line: e.span().map_or(1, |s| text[..s.start].matches('\n').count() + 1),
        message: e.message().trim().to_string(),
    })?;
    file.to_config()
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

const PRESETS: &[(&str, &str)] = &[
    (
        "honest-convergence",
        include_str!("../../presets/honest-convergence.toml"),
    ),
    (
        "malicious-convergence",
        include_str!("../../presets/malicious-convergence.toml"),
    ),
    ("badmouth-sweep", include_str!("../../presets/badmouth-sweep.toml")),
    ("ballot-sweep", include_str!("../../presets/ballot-sweep.toml")),
    ("A1", include_str!("../../presets/a1.toml")),
    ("A1p", include_str!("../../presets/a1p.toml")),
    ("A2", include_str!("../../presets/a2.toml")),
    ("A2p", include_str!("../../presets/a2p.toml")),
    ("A3", include_str!("../../presets/a3.toml")),
    ("A3p", include_str!("../../presets/a3p.toml")),
    ("A4", include_str!("../../presets/a4.toml")),
    ("A4p", include_str!("../../presets/a4p.toml")),
    ("A5", include_str!("../../presets/a5.toml")),
    ("A5p", include_str!("../../presets/a5p.toml")),
    ("B1", include_str!("../../presets/b1.toml")),
    ("B2", include_str!("../../presets/b2.toml")),
    ("mixed", include_str!("../../presets/mixed.toml")),
    (
        "mixed-onoff-badmouth",
        include_str!("../../presets/mixed-onoff-badmouth.toml"),
    ),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// Looks up a built-in preset. Matching ignores case; `honest` and
/// `malicious` name the convergence runs and `A1'` is accepted for `A1p`.
pub fn preset(name: &str) -> Result<ScenarioConfig, ScenarioError> {
    let key = name.trim().replace('\'', "p");
    let key = match key.to_ascii_lowercase().as_str() {
        "honest" => "honest-convergence".to_string(),
        "malicious" => "malicious-convergence".to_string(),
        "badmouth" | "bad-mouthing" => "badmouth-sweep".to_string(),
        "ballot" | "ballot-stuffing" => "ballot-sweep".to_string(),
        _ => key,
    };
    PRESETS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(&key))
        .ok_or_else(|| ScenarioError::UnknownPreset(name.to_string()))
        .and_then(|(_, text)| parse_scenario(text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::Phase;

    #[test]
    fn every_preset_parses() {
        for name in preset_names() {
            let cfg = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.rater_behaviors.len(), cfg.n_devices);
        }
    }

    #[test]
    fn preset_aliases() {
        assert_eq!(preset("honest").unwrap().name, "honest-convergence");
        assert_eq!(preset("a1'").unwrap(), preset("A1p").unwrap());
        assert!(matches!(preset("nope"), Err(ScenarioError::UnknownPreset(_))));
    }

    #[test]
    fn parse_error_points_at_line() {
        let err = parse_scenario("n_devices = 3\nservice_request_interval_s = \"x\"\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2, .. }), "{err}");
        assert_eq!(err.to_string().lines().count(), 1);
    }

    #[test]
    fn on_off_case_schedule() {
        let cfg = preset("A1p").unwrap();
        match cfg.sp_behaviors[0] {
            SpBehavior::OnOffSchedule { schedule, .. } => {
                assert_eq!(schedule.starts_with, Phase::Off);
                assert_eq!(schedule.phase_at(10.0), Phase::Off);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let cfg = parse_scenario(
            r#"
            n_devices = 4
            service_request_interval_s = 4
            [[service_provider]]
            behavior = "honest"
            count = 2
            [[rater_group]]
            behavior = "ballot_stuffing"
            count = 1
            "#,
        )
        .unwrap();
        assert_eq!(cfg.sp_behaviors, vec![SpBehavior::Honest; 2]);
        assert_eq!(cfg.rater_behaviors[0], RaterBehavior::BallotStuffing);
        assert_eq!(cfg.rater_behaviors[3], RaterBehavior::Honest);
        assert_eq!(cfg.window, WindowConfig::default());
        assert_eq!(cfg.domain_trust_interval, 100.0);
        assert_eq!(cfg.sim_duration, 5000.0);
    }

    #[test]
    fn bad_files_rejected() {
        let base = "n_devices = 2\nservice_request_interval_s = 4\n";
        let cases = [
            format!("{base}[[service_provider]]\nbehavior = \"on_off\"\n"),
            format!("{base}[[service_provider]]\nbehavior = \"random\"\nbad_fraction = 2.0\n"),
            format!("{base}[[service_provider]]\nbehavior = \"honest\"\n[[rater_group]]\nbehavior = \"honest\"\ncount = 3\n"),
            format!("{base}[[service_provider]]\nbehavior = \"honest\"\ntypo = 1\n"),
            "n_devices = 2\n".to_string(),
        ];
        for text in cases {
            assert!(parse_scenario(&text).is_err(), "{text}");
        }
    }
}
