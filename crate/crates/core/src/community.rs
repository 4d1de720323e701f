//! Community-server pipeline: three-grid clustering of direct-trust reports,
//! precision-based filtering, domain trust smoothing and precision updates.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::direct_trust::UNCERTAINTY_DEFAULT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DeviceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpId(pub usize);

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for SpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CommunityError {
    #[error("unknown device {0}")]
    UnknownDevice(DeviceId),
    #[error("unknown service provider {0}")]
    UnknownProvider(SpId),
    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("no reports to cluster")]
    NoReports,
}

fn check_unit(v: f64) -> Result<f64, CommunityError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(CommunityError::OutOfRange(v))
    }
}

/// Direct-trust reports `TM[sp][dev]` collected in one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustMatrix {
    n_sps: usize,
    n_devices: usize,
    cells: Vec<Option<f64>>,
}

impl TrustMatrix {
    pub fn new(n_sps: usize, n_devices: usize) -> Self {
        Self {
            n_sps,
            n_devices,
            cells: vec![None; n_sps * n_devices],
        }
    }

    fn index(&self, sp: SpId, dev: DeviceId) -> Result<usize, CommunityError> {
        if sp.0 >= self.n_sps {
            return Err(CommunityError::UnknownProvider(sp));
        }
        if dev.0 >= self.n_devices {
            return Err(CommunityError::UnknownDevice(dev));
        }
        Ok(sp.0 * self.n_devices + dev.0)
    }

    pub fn set(&mut self, sp: SpId, dev: DeviceId, value: f64) -> Result<(), CommunityError> {
        let i = self.index(sp, dev)?;
        self.cells[i] = Some(check_unit(value)?);
        Ok(())
    }

    pub fn get(&self, sp: SpId, dev: DeviceId) -> Option<f64> {
        self.index(sp, dev).ok().and_then(|i| self.cells[i])
    }

    pub fn clear(&mut self) {
        self.cells.iter_mut().for_each(|c| *c = None);
    }

    /// Present reports for `sp`, in device order.
    pub fn reports(&self, sp: SpId) -> Vec<(DeviceId, f64)> {
        if sp.0 >= self.n_sps {
            return Vec::new();
        }
        let row = &self.cells[sp.0 * self.n_devices..(sp.0 + 1) * self.n_devices];
        row.iter()
            .enumerate()
            .filter_map(|(d, v)| v.map(|v| (DeviceId(d), v)))
            .collect()
    }

    pub fn n_sps(&self) -> usize {
        self.n_sps
    }

    pub fn n_devices(&self) -> usize {
        self.n_devices
    }
}

/// Precision trust `PT[sp][dev]`; every cell starts at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionMatrix {
    n_sps: usize,
    n_devices: usize,
    cells: Vec<f64>,
}

impl PrecisionMatrix {
    pub fn new(n_sps: usize, n_devices: usize) -> Self {
        Self {
            n_sps,
            n_devices,
            cells: vec![1.0; n_sps * n_devices],
        }
    }

    fn index(&self, sp: SpId, dev: DeviceId) -> Result<usize, CommunityError> {
        if sp.0 >= self.n_sps {
            return Err(CommunityError::UnknownProvider(sp));
        }
        if dev.0 >= self.n_devices {
            return Err(CommunityError::UnknownDevice(dev));
        }
        Ok(sp.0 * self.n_devices + dev.0)
    }

    pub fn get(&self, sp: SpId, dev: DeviceId) -> Result<f64, CommunityError> {
        Ok(self.cells[self.index(sp, dev)?])
    }

    pub fn set(&mut self, sp: SpId, dev: DeviceId, value: f64) -> Result<(), CommunityError> {
        let i = self.index(sp, dev)?;
        self.cells[i] = check_unit(value)?;
        Ok(())
    }

    /// Mean of the device's precision over every service provider.
    pub fn avg_precision(&self, dev: DeviceId) -> Result<f64, CommunityError> {
        if dev.0 >= self.n_devices || self.n_sps == 0 {
            return Err(CommunityError::UnknownDevice(dev));
        }
        let sum: f64 = (0..self.n_sps).map(|sp| self.cells[sp * self.n_devices + dev.0]).sum();
        Ok(sum / self.n_sps as f64)
    }

    pub fn n_sps(&self) -> usize {
        self.n_sps
    }

    pub fn n_devices(&self) -> usize {
        self.n_devices
    }

    /// `(sp, dev, pt)` for every cell, sp-major.
    pub fn cells(&self) -> impl Iterator<Item = (SpId, DeviceId, f64)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, &v)| (SpId(i / self.n_devices), DeviceId(i % self.n_devices), v))
    }
}

/// One of the three fixed grids over the direct-trust axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grid {
    /// `[0, 0.3)`
    Low = 0,
    /// `[0.3, 0.7)`
    Uncertain = 1,
    /// `[0.7, 1]`
    High = 2,
}

impl Grid {
    pub const ALL: [Grid; 3] = [Grid::Low, Grid::Uncertain, Grid::High];

    pub fn of(direct_trust: f64) -> Grid {
        Grid::ALL[(direct_trust >= 0.3) as usize + (direct_trust >= 0.7) as usize]
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClusterRole {
    Actual,
    Neighbor,
    Wrong,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterPoint {
    pub device: DeviceId,
    pub direct_trust: f64,
    pub avg_precision: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub grids: [Vec<ClusterPoint>; 3],
    pub is_dense: [bool; 3],
    /// Defined only for dense grids.
    pub avg_prec: [Option<f64>; 3],
    pub actual: Grid,
    pub min_points: usize,
}

impl ClusterResult {
    pub fn total_points(&self) -> usize {
        self.grids.iter().map(Vec::len).sum()
    }

    pub fn role_of(&self, grid: Grid) -> ClusterRole {
        match grid.index().abs_diff(self.actual.index()) {
            0 => ClusterRole::Actual,
            1 => ClusterRole::Neighbor,
            _ => ClusterRole::Wrong,
        }
    }

    pub fn points(&self, grid: Grid) -> &[ClusterPoint] {
        &self.grids[grid.index()]
    }
}

/// Grid assignment and actual-cluster selection over prepared points.
///
/// A grid is dense when it holds at least `max(1, n / 3)` points; the actual
/// cluster is the dense grid with the highest mean precision, ties going to
/// the higher grid.
pub fn cluster_points(points: &[ClusterPoint]) -> Result<ClusterResult, CommunityError> {
    let mut grids = Bucketed::with_capacity(points.len());
    for p in points {
        grids.push(*p);
    }
    grids.finish()
}

/// Points split by grid with running precision sums, so the density scan
/// needs no second pass over the members.
struct Bucketed {
    grids: [Vec<ClusterPoint>; 3],
    sums: [f64; 3],
}

impl Bucketed {
    fn with_capacity(n: usize) -> Self {
        Self {
            grids: [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)],
            sums: [0.0; 3],
        }
    }

    fn push(&mut self, p: ClusterPoint) {
        let g = Grid::of(p.direct_trust).index();
        self.sums[g] += p.avg_precision;
        self.grids[g].push(p);
    }

    fn finish(self) -> Result<ClusterResult, CommunityError> {
        let total: usize = self.grids.iter().map(Vec::len).sum();
        if total == 0 {
            return Err(CommunityError::NoReports);
        }
        let min_points = (total / 3).max(1);
        let mut is_dense = [false; 3];
        let mut avg_prec = [None; 3];
        let mut best = f64::NEG_INFINITY;
        let mut actual = None;
        for grid in Grid::ALL {
            let g = grid.index();
            let len = self.grids[g].len();
            if len < min_points {
                continue;
            }
            let mean = self.sums[g] / len as f64;
            is_dense[g] = true;
            avg_prec[g] = Some(mean);
            if mean >= best {
                best = mean;
                actual = Some(grid);
            }
        }

        Ok(ClusterResult {
            grids: self.grids,
            is_dense,
            avg_prec,
            // some grid holds at least ceil(n/3) >= min_points points
            actual: actual.expect("pigeonhole guarantees a dense grid"),
            min_points,
        })
    }
}

/// Clusters the reports for one service provider using each device's
/// average precision from `pt`.
pub fn form_clusters(reports: &[(DeviceId, f64)], pt: &PrecisionMatrix) -> Result<ClusterResult, CommunityError> {
    let mut grids = Bucketed::with_capacity(reports.len());
    for &(device, dt) in reports {
        grids.push(ClusterPoint {
            device,
            direct_trust: check_unit(dt)?,
            avg_precision: pt.avg_precision(device)?,
        });
    }
    grids.finish()
}

/// Reports kept for domain trust: all of the actual cluster, neighbor-cluster
/// reports from devices with average precision above 0.3, and wrong-cluster
/// reports from devices with average precision above 0.7.
pub fn select_ratings(clusters: &ClusterResult) -> Vec<(DeviceId, f64)> {
    let mut selected = Vec::with_capacity(clusters.total_points());
    for grid in Grid::ALL {
        let threshold = match clusters.role_of(grid) {
            ClusterRole::Actual => f64::NEG_INFINITY,
            ClusterRole::Neighbor => 0.3,
            ClusterRole::Wrong => 0.7,
        };
        selected.extend(
            clusters
                .points(grid)
                .iter()
                .filter(|p| p.avg_precision > threshold)
                .map(|p| (p.device, p.direct_trust)),
        );
    }
    selected
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainTrustRecord {
    pub sp: SpId,
    pub value: f64,
    pub iteration: usize,
}

impl DomainTrustRecord {
    pub fn initial(sp: SpId) -> Self {
        Self {
            sp,
            value: UNCERTAINTY_DEFAULT,
            iteration: 0,
        }
    }
}

/// Averages the previous domain trust with the mean of the selected reports.
/// With nothing selected the previous value carries over.
pub fn domain_trust_update(prev: &DomainTrustRecord, selected: &[(DeviceId, f64)]) -> DomainTrustRecord {
    let value = if selected.is_empty() {
        prev.value
    } else {
        let fresh = selected.iter().map(|&(_, v)| v).sum::<f64>() / selected.len() as f64;
        (0.5 * (prev.value + fresh)).clamp(0.0, 1.0)
    };
    DomainTrustRecord {
        sp: prev.sp,
        value,
        iteration: prev.iteration + 1,
    }
}

/// Precision target for a report classified under `role`.
pub fn precision_target(role: ClusterRole) -> f64 {
    match role {
        ClusterRole::Actual => 1.0,
        ClusterRole::Neighbor => 0.5,
        ClusterRole::Wrong => 0.0,
    }
}

/// Moves each reporting device's `PT[sp][dev]` halfway toward the target of
/// its cluster role. Devices without a report are left alone.
pub fn update_precision(pt: &mut PrecisionMatrix, clusters: &ClusterResult, sp: SpId) -> Result<(), CommunityError> {
    for grid in Grid::ALL {
        let target = precision_target(clusters.role_of(grid));
        for p in clusters.points(grid) {
            let current = pt.get(sp, p.device)?;
            pt.set(sp, p.device, 0.5 * (current + target))?;
        }
    }
    Ok(())
}

/// How the server picks the reports that feed domain trust.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    #[default]
    Precision,
    /// Every report is used; the unfiltered baseline.
    AcceptAll,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOutcome {
    pub record: DomainTrustRecord,
    pub actual: Option<Grid>,
    pub reports: usize,
    pub selected: usize,
}

impl IterationOutcome {
    pub fn filtered(&self) -> usize {
        self.reports - self.selected
    }
}

/// Holds PT and the domain trust of every provider across iterations.
#[derive(Debug, Clone)]
pub struct CommunityServer {
    precision: PrecisionMatrix,
    domain: Vec<DomainTrustRecord>,
    mode: FilterMode,
}

impl CommunityServer {
    pub fn new(n_sps: usize, n_devices: usize, mode: FilterMode) -> Self {
        Self {
            precision: PrecisionMatrix::new(n_sps, n_devices),
            domain: (0..n_sps).map(|sp| DomainTrustRecord::initial(SpId(sp))).collect(),
            mode,
        }
    }

    pub fn precision(&self) -> &PrecisionMatrix {
        &self.precision
    }

    pub fn domain_trust(&self) -> &[DomainTrustRecord] {
        &self.domain
    }

    /// Runs cluster → select → update for every provider. Clustering reads
    /// the precision matrix as it stood at the start of the iteration.
    pub fn run_iteration(&mut self, tm: &TrustMatrix) -> Result<Vec<IterationOutcome>, CommunityError> {
        let snapshot = self.precision.clone();
        let mut outcomes = Vec::with_capacity(self.domain.len());
        for sp in (0..self.domain.len()).map(SpId) {
            let reports = tm.reports(sp);
            let prev = self.domain[sp.0];
            let outcome = if reports.is_empty() {
                IterationOutcome {
                    record: domain_trust_update(&prev, &[]),
                    actual: None,
                    reports: 0,
                    selected: 0,
                }
            } else {
                let clusters = form_clusters(&reports, &snapshot)?;
                let selected = match self.mode {
                    FilterMode::Precision => select_ratings(&clusters),
                    FilterMode::AcceptAll => reports.clone(),
                };
                update_precision(&mut self.precision, &clusters, sp)?;
                IterationOutcome {
                    record: domain_trust_update(&prev, &selected),
                    actual: Some(clusters.actual),
                    reports: reports.len(),
                    selected: selected.len(),
                }
            };
            self.domain[sp.0] = outcome.record;
            outcomes.push(outcome);
        }
        Ok(outcomes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt_with_column(values: &[f64]) -> PrecisionMatrix {
        let mut pt = PrecisionMatrix::new(values.len(), 1);
        for (sp, &v) in values.iter().enumerate() {
            pt.set(SpId(sp), DeviceId(0), v).unwrap();
        }
        pt
    }

    fn point(dev: usize, dt: f64, prec: f64) -> ClusterPoint {
        ClusterPoint {
            device: DeviceId(dev),
            direct_trust: dt,
            avg_precision: prec,
        }
    }

    #[test]
    fn avg_precision_examples() {
        assert_eq!(pt_with_column(&[1.0, 1.0, 1.0]).avg_precision(DeviceId(0)), Ok(1.0));
        let p = pt_with_column(&[0.8, 0.4, 0.6]).avg_precision(DeviceId(0)).unwrap();
        assert!((p - 0.6).abs() < 1e-12);
        assert_eq!(pt_with_column(&[0.0, 0.0, 0.0]).avg_precision(DeviceId(0)), Ok(0.0));
        assert_eq!(
            pt_with_column(&[1.0]).avg_precision(DeviceId(3)),
            Err(CommunityError::UnknownDevice(DeviceId(3)))
        );
    }

    #[test]
    fn nine_device_trace() {
        let mut pts = vec![point(0, 0.1, 0.9), point(1, 0.2, 0.9)];
        pts.extend((2..6).map(|d| point(d, 0.5, 0.8)));
        pts.extend((6..9).map(|d| point(d, 0.9, 0.4)));
        let c = cluster_points(&pts).unwrap();
        assert_eq!(c.min_points, 3);
        assert_eq!(c.is_dense, [false, true, true]);
        assert_eq!(c.avg_prec[0], None);
        assert_eq!(c.actual, Grid::Uncertain);
    }

    #[test]
    fn tie_goes_to_rightmost() {
        let pts = [point(0, 0.1, 1.0), point(1, 0.5, 1.0), point(2, 0.9, 1.0)];
        let c = cluster_points(&pts).unwrap();
        assert_eq!(c.min_points, 1);
        assert_eq!(c.is_dense, [true, true, true]);
        assert_eq!(c.actual, Grid::High);
    }

    #[test]
    fn unanimous_reports() {
        let pts: Vec<_> = (0..7).map(|d| point(d, 0.9, 1.0)).collect();
        let c = cluster_points(&pts).unwrap();
        assert_eq!(c.is_dense, [false, false, true]);
        assert_eq!(c.actual, Grid::High);
    }

    #[test]
    fn grid_boundaries() {
        assert_eq!(Grid::of(0.0), Grid::Low);
        assert_eq!(Grid::of(0.2999), Grid::Low);
        assert_eq!(Grid::of(0.3), Grid::Uncertain);
        assert_eq!(Grid::of(0.6999), Grid::Uncertain);
        assert_eq!(Grid::of(0.7), Grid::High);
        assert_eq!(Grid::of(1.0), Grid::High);
    }

    #[test]
    fn no_reports_is_an_error() {
        assert_eq!(cluster_points(&[]), Err(CommunityError::NoReports));
        let pt = PrecisionMatrix::new(1, 1);
        assert_eq!(form_clusters(&[], &pt), Err(CommunityError::NoReports));
    }

    #[test]
    fn selection_with_rightmost_actual() {
        // 4 high reports dominate, so actual = High, neighbor = Uncertain, wrong = Low
        let mut pts: Vec<_> = (0..4).map(|d| point(d, 0.9, 0.9)).collect();
        pts.push(point(10, 0.5, 0.5));
        pts.push(point(11, 0.1, 0.5));
        pts.push(point(12, 0.1, 0.2));
        pts.push(point(13, 0.5, 0.2));
        let c = cluster_points(&pts).unwrap();
        assert_eq!(c.actual, Grid::High);
        assert_eq!(c.role_of(Grid::Uncertain), ClusterRole::Neighbor);
        assert_eq!(c.role_of(Grid::Low), ClusterRole::Wrong);
        let sel: Vec<usize> = select_ratings(&c).iter().map(|(d, _)| d.0).collect();
        assert_eq!(sel, vec![10, 0, 1, 2, 3]);
    }

    #[test]
    fn middle_actual_has_no_wrong_cluster() {
        let pts = [
            point(0, 0.5, 1.0),
            point(1, 0.5, 1.0),
            point(2, 0.1, 0.5),
            point(3, 0.9, 0.5),
        ];
        let c = cluster_points(&pts).unwrap();
        assert_eq!(c.actual, Grid::Uncertain);
        for g in Grid::ALL {
            assert_ne!(c.role_of(g), ClusterRole::Wrong);
        }
        assert_eq!(select_ratings(&c).len(), 4);
    }

    #[test]
    fn wrong_cluster_needs_high_precision() {
        let mut pts: Vec<_> = (0..4).map(|d| point(d, 0.9, 0.8)).collect();
        pts.push(point(10, 0.1, 0.75));
        pts.push(point(11, 0.1, 0.7));
        let c = cluster_points(&pts).unwrap();
        assert_eq!(c.actual, Grid::High);
        let sel: Vec<usize> = select_ratings(&c).iter().map(|(d, _)| d.0).collect();
        assert!(sel.contains(&10));
        assert!(!sel.contains(&11));
    }

    #[test]
    fn domain_trust_examples() {
        let rec = |v| DomainTrustRecord {
            sp: SpId(0),
            value: v,
            iteration: 3,
        };
        let sel = |v| vec![(DeviceId(0), v)];
        assert_eq!(domain_trust_update(&rec(0.42), &sel(0.42)).value, 0.42);
        assert!((domain_trust_update(&rec(0.5), &sel(0.9)).value - 0.7).abs() < 1e-12);
        assert_eq!(domain_trust_update(&rec(1.0), &sel(0.0)).value, 0.5);
        let next = domain_trust_update(&rec(0.3), &[]);
        assert_eq!((next.value, next.iteration), (0.3, 4));
        assert_eq!(DomainTrustRecord::initial(SpId(2)).value, 0.5);
    }

    fn classify_single(dt: f64, others: &[f64]) -> ClusterResult {
        let mut pts = vec![point(0, dt, 1.0)];
        pts.extend(others.iter().enumerate().map(|(i, &v)| point(i + 1, v, 1.0)));
        cluster_points(&pts).unwrap()
    }

    #[test]
    fn precision_update_examples() {
        let cases = [
            // (initial PT, device report, others' reports, expected PT)
            (1.0, 0.9, vec![0.9, 0.9], 1.0),
            (0.2, 0.5, vec![0.9, 0.9, 0.9], 0.35),
            (0.8, 0.5, vec![0.9, 0.9, 0.9], 0.65),
            (0.8, 0.1, vec![0.9, 0.9, 0.9], 0.4),
            (0.0, 0.1, vec![0.9, 0.9, 0.9], 0.0),
        ];
        for (initial, dt, others, expected) in cases {
            let clusters = classify_single(dt, &others);
            let mut pt = PrecisionMatrix::new(1, others.len() + 1);
            pt.set(SpId(0), DeviceId(0), initial).unwrap();
            update_precision(&mut pt, &clusters, SpId(0)).unwrap();
            let got = pt.get(SpId(0), DeviceId(0)).unwrap();
            assert!((got - expected).abs() < 1e-12, "{initial} {dt}: {got} != {expected}");
        }
    }

    #[test]
    fn non_reporting_devices_unchanged() {
        let mut pt = PrecisionMatrix::new(1, 3);
        pt.set(SpId(0), DeviceId(2), 0.33).unwrap();
        let clusters = form_clusters(&[(DeviceId(0), 0.9), (DeviceId(1), 0.1)], &pt).unwrap();
        update_precision(&mut pt, &clusters, SpId(0)).unwrap();
        assert_eq!(pt.get(SpId(0), DeviceId(2)), Ok(0.33));
    }

    #[test]
    fn server_iteration_uses_snapshot() {
        let mut tm = TrustMatrix::new(2, 3);
        for d in 0..3 {
            tm.set(SpId(0), DeviceId(d), if d == 2 { 0.1 } else { 0.9 }).unwrap();
            tm.set(SpId(1), DeviceId(d), 0.9).unwrap();
        }
        let mut server = CommunityServer::new(2, 3, FilterMode::Precision);
        let out = server.run_iteration(&tm).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].reports, 3);
        assert_eq!(out[0].record.iteration, 1);
        // device 2 reported into the wrong grid for sp 0
        assert_eq!(server.precision().get(SpId(0), DeviceId(2)), Ok(0.5));
        assert_eq!(server.precision().get(SpId(1), DeviceId(2)), Ok(1.0));
    }

    #[test]
    fn server_carries_value_without_reports() {
        let tm = TrustMatrix::new(1, 4);
        let mut server = CommunityServer::new(1, 4, FilterMode::Precision);
        let out = server.run_iteration(&tm).unwrap();
        assert_eq!(out[0].record.value, 0.5);
        assert_eq!(out[0].record.iteration, 1);
        assert_eq!(out[0].actual, None);
    }

    #[test]
    fn matrices_reject_bad_input() {
        let mut tm = TrustMatrix::new(1, 1);
        assert!(tm.set(SpId(0), DeviceId(0), 1.5).is_err());
        assert!(tm.set(SpId(1), DeviceId(0), 0.5).is_err());
        let mut pt = PrecisionMatrix::new(1, 1);
        assert!(pt.set(SpId(0), DeviceId(1), 0.5).is_err());
        assert!(pt.set(SpId(0), DeviceId(0), -0.5).is_err());
    }
}
