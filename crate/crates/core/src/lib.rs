//! Recurrence-interval analysis of extreme volatility.
//!
//! The pipeline runs from dated prices to normalized volatility
//! ([`ingest`]), extracts waiting times between threshold exceedances
//! ([`recurrence`]), fits a left-truncated stretched exponential by maximum
//! likelihood with a KS-driven cutoff scan ([`sefit`]), tests the fit and
//! the scaling hypothesis ([`gof`]), evaluates hazard probabilities
//! ([`hazard`]) and probes short- and long-term memory with conditional
//! statistics, DFA and DMA ([`memory`]). [`pipeline`] orchestrates a full
//! run and [`emit`] writes the report and its CSV projections.
//!
//! Data-parallel loops (bootstrap replicates, cutoff scans, per-threshold
//! work) go through [`exec`], which uses rayon when the `parallel` feature
//! is enabled and falls back to plain iteration otherwise. Results never
//! depend on the schedule: every random stream is derived from a base seed
//! and a task index.

pub mod emit;
pub mod error;
pub mod exec;
pub mod gof;
pub mod hazard;
pub mod ingest;
pub mod memory;
pub mod optimize;
pub mod pipeline;
pub mod recurrence;
pub mod seed;
pub mod sefit;
pub mod special;

pub use error::{Error, Result};
pub use exec::Execution;
