//! Metrics, CSV output, the clustering benchmark and scenario files.

pub mod bench;
pub mod csv_io;
pub mod metrics;
pub mod scenario;

pub use bench::{bench_clustering, BenchRow, Kernel};
pub use csv_io::{emit_trace, Report};
pub use metrics::{mae, MetricSeries, MetricsError};
pub use scenario::{load_scenario, parse_scenario, preset, preset_names, ScenarioError, ScenarioFile};
