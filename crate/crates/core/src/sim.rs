//! Deterministic discrete-event simulation of devices, service providers and
//! the community server.
//!
//! Three periodic event streams drive a run: slot closes every `Δt`, trust
//! collection every `δT`, and one service-request stream per device. Events
//! at the same instant are ordered slot close, then collection, then service
//! requests by device id, so a trace is a pure function of the
//! [`ScenarioConfig`].

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attacks::{rate_service, report_direct_trust, sp_service_quality, BehaviorError, RaterBehavior, SpBehavior};
use crate::community::{CommunityError, CommunityServer, DeviceId, FilterMode, Grid, SpId, TrustMatrix};
use crate::direct_trust::{direct_trust, ParamsError, TrustParams, UNCERTAINTY_DEFAULT};
use crate::harness::metrics::{mae, MetricSeries, MetricsError};
use crate::window::{TrustRating, TrustWindow, WindowConfig, WindowError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Raises the share of attackers block by block within one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Escalation {
    pub attack: RaterBehavior,
    pub fractions: Vec<f64>,
    pub block_secs: f64,
}

impl Escalation {
    /// Block whose data a collection at `time` summarizes.
    fn block_at(&self, time: f64) -> usize {
        let idx = ((time / self.block_secs).ceil() as usize).saturating_sub(1);
        idx.min(self.fractions.len().saturating_sub(1))
    }

    pub fn duration(&self) -> f64 {
        self.block_secs * self.fractions.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub n_devices: usize,
    pub sp_behaviors: Vec<SpBehavior>,
    /// One entry per device.
    pub rater_behaviors: Vec<RaterBehavior>,
    pub escalation: Option<Escalation>,
    pub service_request_interval: f64,
    /// `δT`
    pub domain_trust_interval: f64,
    pub sim_duration: f64,
    /// Holds `Δt` and the rating bounds.
    pub window: WindowConfig,
    pub trust: TrustParams,
    pub filter_mode: FilterMode,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            n_devices: 150,
            sp_behaviors: vec![SpBehavior::Honest; 5],
            rater_behaviors: vec![RaterBehavior::Honest; 150],
            escalation: None,
            service_request_interval: 4.0,
            domain_trust_interval: 100.0,
            sim_duration: 5000.0,
            window: WindowConfig::default(),
            trust: TrustParams::default(),
            filter_mode: FilterMode::Precision,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// `n_devices` honest raters against the given providers, other fields at
    /// their defaults.
    pub fn with_providers(n_devices: usize, sp_behaviors: Vec<SpBehavior>) -> Self {
        Self {
            n_devices,
            sp_behaviors,
            rater_behaviors: vec![RaterBehavior::Honest; n_devices],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let invalid = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.n_devices == 0 {
            return invalid("at least one device is required".into());
        }
        if self.sp_behaviors.is_empty() {
            return invalid("at least one service provider is required".into());
        }
        if self.rater_behaviors.len() != self.n_devices {
            return invalid(format!(
                "{} rater behaviours for {} devices",
                self.rater_behaviors.len(),
                self.n_devices
            ));
        }
        for (name, v) in [
            ("service_request_interval", self.service_request_interval),
            ("domain_trust_interval", self.domain_trust_interval),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.sim_duration.is_finite() && self.sim_duration >= 0.0) {
            return invalid(format!("sim_duration must be non-negative, got {}", self.sim_duration));
        }
        self.window.validate()?;
        self.trust.validate()?;
        for sp in &self.sp_behaviors {
            sp.validate()?;
        }
        if let Some(esc) = &self.escalation {
            if esc.fractions.is_empty() {
                return invalid("escalation needs at least one fraction".into());
            }
            if let Some(f) = esc.fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
                return invalid(format!("malicious fraction {f} is outside [0, 1]"));
            }
            if !(esc.block_secs.is_finite() && esc.block_secs > 0.0) {
                return invalid(format!("escalation block must be positive, got {}", esc.block_secs));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub time: f64,
    pub sp: SpId,
    pub domain_trust: f64,
    /// Same smoothing applied to honest devices' own direct trust.
    pub ground_truth: f64,
    pub selected: usize,
    pub filtered: usize,
    pub actual: Option<Grid>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecord {
    pub iteration: usize,
    pub dev: DeviceId,
    pub sp: SpId,
    pub pt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    SlotClose,
    TrustCollection,
    ServiceRequest { device: usize },
}

impl EventKind {
    fn rank(&self) -> (u8, usize) {
        match *self {
            EventKind::SlotClose => (0, 0),
            EventKind::TrustCollection => (1, 0),
            EventKind::ServiceRequest { device } => (2, device),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventLogEntry {
    pub time: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub scenario: String,
    pub n_sps: usize,
    /// Iteration-0 records, one per provider.
    pub initial: Vec<IterationRecord>,
    /// One record per provider per collection, in time order.
    pub iterations: Vec<IterationRecord>,
    pub precision: Vec<PrecisionRecord>,
    pub events: Vec<EventLogEntry>,
    pub escalation: Option<Escalation>,
}

impl SimulationTrace {
    pub fn for_sp(&self, sp: SpId) -> impl Iterator<Item = &IterationRecord> + '_ {
        self.iterations.iter().filter(move |r| r.sp == sp)
    }

    pub fn domain_series(&self, sp: SpId) -> MetricSeries {
        MetricSeries::from_points(self.for_sp(sp).map(|r| (r.time, r.domain_trust))).expect("collection times increase")
    }

    pub fn truth_series(&self, sp: SpId) -> MetricSeries {
        MetricSeries::from_points(self.for_sp(sp).map(|r| (r.time, r.ground_truth))).expect("collection times increase")
    }

    /// Per-block MAE against the honest-only ground truth, averaged over
    /// providers. Empty unless the run escalated attackers.
    pub fn mae_table(&self) -> Result<Vec<MaeRow>, MetricsError> {
        let Some(esc) = &self.escalation else {
            return Ok(Vec::new());
        };
        let mut rows = Vec::with_capacity(esc.fractions.len());
        for (block, &fraction) in esc.fractions.iter().enumerate() {
            let mut per_sp = Vec::with_capacity(self.n_sps);
            for sp in (0..self.n_sps).map(SpId) {
                let in_block: Vec<&IterationRecord> =
                    self.for_sp(sp).filter(|r| esc.block_at(r.time) == block).collect();
                if in_block.is_empty() {
                    continue;
                }
                let est = MetricSeries::from_points(in_block.iter().map(|r| (r.time, r.domain_trust)))?;
                let truth = MetricSeries::from_points(in_block.iter().map(|r| (r.time, r.ground_truth)))?;
                per_sp.push(mae(&est, &truth)?);
            }
            if per_sp.is_empty() {
                continue;
            }
            rows.push(MaeRow {
                block_start_s: block as f64 * esc.block_secs,
                malicious_fraction: fraction,
                mae: per_sp.iter().sum::<f64>() / per_sp.len() as f64,
            });
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaeRow {
    pub block_start_s: f64,
    pub malicious_fraction: f64,
    pub mae: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Scheduled {
    time: f64,
    kind: EventKind,
    tick: u64,
}

impl Eq for Scheduled {}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| self.kind.rank().cmp(&other.kind.rank()))
    }
}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const SP_STREAM_BASE: u64 = 1 << 40;
const ROLE_STREAM: u64 = u64::MAX;

fn actor_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

struct Simulation<'a> {
    config: &'a ScenarioConfig,
    windows: Vec<Vec<TrustWindow>>,
    device_rngs: Vec<ChaCha8Rng>,
    sp_rngs: Vec<ChaCha8Rng>,
    /// Devices in the order they turn malicious under escalation.
    escalation_order: Vec<usize>,
    server: CommunityServer,
    truth: Vec<f64>,
    matrix: TrustMatrix,
    trace: SimulationTrace,
}

impl<'a> Simulation<'a> {
    fn new(config: &'a ScenarioConfig) -> Result<Self, SimError> {
        let n_sps = config.sp_behaviors.len();
        let n = config.n_devices;
        let windows = (0..n)
            .map(|_| (0..n_sps).map(|_| TrustWindow::new(config.window, 0.0)).collect())
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        let mut escalation_order: Vec<usize> = (0..n).collect();
        escalation_order.shuffle(&mut actor_rng(config.seed, ROLE_STREAM));

        let initial = (0..n_sps)
            .map(|sp| IterationRecord {
                iteration: 0,
                time: 0.0,
                sp: SpId(sp),
                domain_trust: UNCERTAINTY_DEFAULT,
                ground_truth: UNCERTAINTY_DEFAULT,
                selected: 0,
                filtered: 0,
                actual: None,
            })
            .collect();

        Ok(Self {
            config,
            windows,
            device_rngs: (0..n as u64).map(|d| actor_rng(config.seed, d)).collect(),
            sp_rngs: (0..n_sps as u64)
                .map(|y| actor_rng(config.seed, SP_STREAM_BASE + y))
                .collect(),
            escalation_order,
            server: CommunityServer::new(n_sps, n, config.filter_mode),
            truth: vec![UNCERTAINTY_DEFAULT; n_sps],
            matrix: TrustMatrix::new(n_sps, n),
            trace: SimulationTrace {
                scenario: config.name.clone(),
                n_sps,
                initial,
                escalation: config.escalation.clone(),
                ..Default::default()
            },
        })
    }

    fn role(&self, device: usize, time: f64) -> RaterBehavior {
        if let Some(esc) = &self.config.escalation {
            let fraction = esc.fractions[esc.block_at(time)];
            let attackers = (fraction * self.config.n_devices as f64).round() as usize;
            if self.escalation_order[..attackers].contains(&device) {
                return esc.attack;
            }
        }
        self.config.rater_behaviors[device]
    }

    fn period(&self, kind: EventKind) -> f64 {
        match kind {
            EventKind::SlotClose => self.config.window.slot_duration,
            EventKind::TrustCollection => self.config.domain_trust_interval,
            EventKind::ServiceRequest { .. } => self.config.service_request_interval,
        }
    }

    fn run(mut self) -> Result<SimulationTrace, SimError> {
        let mut queue = BinaryHeap::new();
        queue.push(Reverse(Scheduled {
            time: self.config.window.slot_duration,
            kind: EventKind::SlotClose,
            tick: 1,
        }));
        queue.push(Reverse(Scheduled {
            time: self.config.domain_trust_interval,
            kind: EventKind::TrustCollection,
            tick: 1,
        }));
        for device in 0..self.config.n_devices {
            queue.push(Reverse(Scheduled {
                time: 0.0,
                kind: EventKind::ServiceRequest { device },
                tick: 0,
            }));
        }

        while let Some(Reverse(ev)) = queue.pop() {
            if ev.time > self.config.sim_duration {
                break;
            }
            self.trace.events.push(EventLogEntry {
                time: ev.time,
                kind: ev.kind,
            });
            match ev.kind {
                EventKind::SlotClose => self.close_slots(ev.time),
                EventKind::TrustCollection => self.collect(ev.time, ev.tick as usize)?,
                EventKind::ServiceRequest { device } => self.serve(device, ev.time)?,
            }
            // times are tick multiples so repeated additions cannot drift
            let tick = ev.tick + 1;
            queue.push(Reverse(Scheduled {
                time: tick as f64 * self.period(ev.kind),
                kind: ev.kind,
                tick,
            }));
        }
        Ok(self.trace)
    }

    fn close_slots(&mut self, time: f64) {
        for row in &mut self.windows {
            for w in row {
                w.close_slot_and_adjust(time);
            }
        }
    }

    fn serve(&mut self, device: usize, time: f64) -> Result<(), SimError> {
        for (sp, behavior) in self.config.sp_behaviors.iter().enumerate() {
            let quality = sp_service_quality(behavior, time, &mut self.sp_rngs[sp]);
            let value = rate_service(quality, &mut self.device_rngs[device]);
            self.windows[device][sp].record(TrustRating::new(value, time)?)?;
        }
        Ok(())
    }

    fn collect(&mut self, time: f64, iteration: usize) -> Result<(), SimError> {
        let n_sps = self.config.sp_behaviors.len();
        let mut honest_sum = vec![0.0; n_sps];
        let mut honest_n = 0usize;
        self.matrix.clear();
        for device in 0..self.config.n_devices {
            let role = self.role(device, time);
            if role.is_honest() {
                honest_n += 1;
            }
            for (sp, sum) in honest_sum.iter_mut().enumerate() {
                let true_dt = direct_trust(&self.windows[device][sp], &self.config.trust).direct_trust;
                if role.is_honest() {
                    *sum += true_dt;
                }
                let reported = report_direct_trust(&role, true_dt, time, &mut self.device_rngs[device]);
                self.matrix.set(SpId(sp), DeviceId(device), reported)?;
            }
        }

        let outcomes = self.server.run_iteration(&self.matrix)?;
        for (sp, outcome) in outcomes.iter().enumerate() {
            if honest_n > 0 {
                let consensus = honest_sum[sp] / honest_n as f64;
                self.truth[sp] = 0.5 * (self.truth[sp] + consensus);
            }
            self.trace.iterations.push(IterationRecord {
                iteration,
                time,
                sp: SpId(sp),
                domain_trust: outcome.record.value,
                ground_truth: self.truth[sp],
                selected: outcome.selected,
                filtered: outcome.filtered(),
                actual: outcome.actual,
            });
        }
        self.trace
            .precision
            .extend(
                self.server
                    .precision()
                    .cells()
                    .map(|(sp, dev, pt)| PrecisionRecord { iteration, dev, sp, pt }),
            );
        Ok(())
    }
}

/// Runs one scenario to completion.
pub fn run_scenario(config: &ScenarioConfig) -> Result<SimulationTrace, SimError> {
    config.validate()?;
    Simulation::new(config)?.run()
}

/// One continuous run in which the share of `attack` raters steps through
/// `fractions`, one block of `block_secs` each, with precision state carried
/// across blocks. Returns one MAE row per fraction.
pub fn sweep_malicious_fraction(
    base: &ScenarioConfig,
    attack: RaterBehavior,
    fractions: &[f64],
    block_secs: f64,
) -> Result<(Vec<MaeRow>, SimulationTrace), SimError> {
    let escalation = Escalation {
        attack,
        fractions: fractions.to_vec(),
        block_secs,
    };
    let config = ScenarioConfig {
        sim_duration: escalation.duration(),
        escalation: Some(escalation),
        ..base.clone()
    };
    let trace = run_scenario(&config)?;
    Ok((trace.mae_table()?, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(sps: Vec<SpBehavior>) -> ScenarioConfig {
        ScenarioConfig {
            sim_duration: 500.0,
            seed: 7,
            ..ScenarioConfig::with_providers(10, sps)
        }
    }

    #[test]
    fn zero_duration_has_only_initial_records() {
        let cfg = ScenarioConfig {
            sim_duration: 0.0,
            ..small(vec![SpBehavior::Honest, SpBehavior::Malicious])
        };
        let trace = run_scenario(&cfg).unwrap();
        assert!(trace.iterations.is_empty());
        assert!(trace.precision.is_empty());
        assert_eq!(trace.initial.len(), 2);
        assert!(trace.initial.iter().all(|r| r.domain_trust == 0.5 && r.iteration == 0));
    }

    #[test]
    fn one_record_per_sp_per_collection() {
        let trace = run_scenario(&small(vec![SpBehavior::Honest; 3])).unwrap();
        assert_eq!(trace.iterations.len(), 15);
        for (i, chunk) in trace.iterations.chunks(3).enumerate() {
            for (sp, r) in chunk.iter().enumerate() {
                assert_eq!(r.sp, SpId(sp));
                assert_eq!(r.iteration, i + 1);
                assert_eq!(r.time, (i + 1) as f64 * 100.0);
            }
        }
        assert_eq!(trace.precision.len(), 5 * 3 * 10);
    }

    #[test]
    fn same_seed_same_trace() {
        let cfg = small(vec![SpBehavior::Honest, SpBehavior::random(0.5).unwrap()]);
        assert_eq!(run_scenario(&cfg).unwrap(), run_scenario(&cfg).unwrap());
        let other = ScenarioConfig { seed: 8, ..cfg.clone() };
        assert_ne!(run_scenario(&cfg).unwrap(), run_scenario(&other).unwrap());
    }

    #[test]
    fn event_order_at_shared_instants() {
        let trace = run_scenario(&small(vec![SpBehavior::Honest])).unwrap();
        let at_100: Vec<EventKind> = trace
            .events
            .iter()
            .filter(|e| e.time == 100.0)
            .map(|e| e.kind)
            .collect();
        assert_eq!(at_100[0], EventKind::SlotClose);
        assert_eq!(at_100[1], EventKind::TrustCollection);
        assert_eq!(at_100[2], EventKind::ServiceRequest { device: 0 });
        assert_eq!(at_100.len(), 12);
        assert!(trace.events.windows(2).all(|w| w[0].time <= w[1].time));
    }

    #[test]
    fn honest_provider_rises_above_half() {
        let trace = run_scenario(&small(vec![SpBehavior::Honest])).unwrap();
        assert!(trace.iterations.iter().all(|r| r.domain_trust > 0.5));
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = small(vec![SpBehavior::Honest]);
        let cases = [
            ScenarioConfig {
                n_devices: 0,
                ..base.clone()
            },
            ScenarioConfig {
                sp_behaviors: vec![],
                ..base.clone()
            },
            ScenarioConfig {
                service_request_interval: 0.0,
                ..base.clone()
            },
            ScenarioConfig {
                sim_duration: -1.0,
                ..base.clone()
            },
            ScenarioConfig {
                rater_behaviors: vec![RaterBehavior::Honest; 3],
                ..base.clone()
            },
            ScenarioConfig {
                escalation: Some(Escalation {
                    attack: RaterBehavior::BadMouthing,
                    fractions: vec![1.5],
                    block_secs: 100.0,
                }),
                ..base.clone()
            },
        ];
        for cfg in cases {
            assert!(matches!(run_scenario(&cfg), Err(SimError::InvalidConfig(_))), "{cfg:?}");
        }
    }

    #[test]
    fn escalation_nests_attackers() {
        let cfg = ScenarioConfig {
            escalation: Some(Escalation {
                attack: RaterBehavior::BadMouthing,
                fractions: vec![0.1, 0.3],
                block_secs: 200.0,
            }),
            ..small(vec![SpBehavior::Honest])
        };
        let sim = Simulation::new(&cfg).unwrap();
        let attackers = |t: f64| (0..10).filter(|&d| !sim.role(d, t).is_honest()).collect::<Vec<_>>();
        assert_eq!(attackers(100.0).len(), 1);
        assert_eq!(attackers(200.0).len(), 1);
        assert_eq!(attackers(300.0).len(), 3);
        assert!(attackers(300.0).contains(&attackers(100.0)[0]));
    }

    #[test]
    fn sweep_shape_and_clean_baseline() {
        let base = ScenarioConfig {
            seed: 3,
            ..ScenarioConfig::with_providers(10, vec![SpBehavior::Honest])
        };
        let (rows, _) = sweep_malicious_fraction(&base, RaterBehavior::BadMouthing, &[0.0, 0.0], 800.0).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].block_start_s, 800.0);
        // after warm-up, no attackers means the filter barely moves anything
        assert!(rows[1].mae < 0.1, "{rows:?}");
    }
}
