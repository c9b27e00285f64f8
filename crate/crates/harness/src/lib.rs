//! Experiment runner: convergence studies, constraint ablation, conditioning,
//! basis resilience, elasticity and preprocessing checks, with CSV/JSON output.

pub mod config;
pub mod experiments;
pub mod franke;
pub mod output;
pub mod rates;
