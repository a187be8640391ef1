//! Monte Carlo experiments, file formats and the command-line driver built on
//! `ebmatch-core`.

pub mod checks;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod records;
pub mod runner;
pub mod stats;

pub use error::{Error, Result};
