//! Experiment runner for `dcm-core`: command-line front end, file formats
//! with provenance headers, and a deterministic multi-threaded replica runner.

pub mod cli;
pub mod error;
pub mod formats;
pub mod provenance;
pub mod runner;

pub use dcm_core;
pub use error::{LabError, LabResult};
