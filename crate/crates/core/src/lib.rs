//! Trust management for IoT service domains.
//!
//! Devices keep a dynamically sized sliding window of service ratings per
//! provider and derive a direct trust value from it ([`direct_trust`]). A
//! community server clusters the reported values on a three-grid partition,
//! filters reports by each device's precision record and smooths the result
//! into a per-provider domain trust ([`community`]). [`sim`] runs seeded
//! attack scenarios against this pipeline and [`harness`] handles scenario
//! files, CSV output and benchmarking.

pub mod attacks;
pub mod baseline_filters;
pub mod community;
pub mod direct_trust;
pub mod harness;
pub mod sim;
pub mod window;
