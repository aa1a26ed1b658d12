//! Simulation laboratory for online TSP with known request locations: metric
//! spaces, instances, an exact offline oracle, an event-driven engine, online
//! policies, adaptive adversaries and batch ratio reports.

pub mod adversaries;
pub mod algorithms;
pub mod batch;
pub mod cli;
pub mod engine;
pub mod fixtures;
pub mod instance;
pub mod metric;
pub mod numfmt;
pub mod oracle;
pub mod report;

pub use metric::EPS;
