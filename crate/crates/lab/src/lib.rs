pub mod config;
pub mod experiments;
pub mod report;
pub mod rng;
