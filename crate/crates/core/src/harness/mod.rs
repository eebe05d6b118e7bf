//! Reproducible experiment driver: seeded generators, inequality sweeps
//! and trace/report serialization.

pub mod generators;
pub mod report;
pub mod rng;
pub mod sweep;
