//! File formats: MPS input, JSON problems and patterns, JSON reports.

pub mod json;
pub mod mps;
pub mod report;
