//! Campaign driver for the `dimwit` dimension witness.

pub mod analyze;
pub mod campaign;
pub mod cli;
pub mod config;
pub mod manifest;
pub mod spectrum;
