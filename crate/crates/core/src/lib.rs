pub mod process_sim;
pub mod mapping;
pub mod synth;
pub mod records;
pub mod analysis;
mod serde_f64;
pub mod config;
pub mod service;
pub mod robot;
