//! Command-line driver, output writers and experiment harnesses for `esmhd`.

pub mod cli;
pub mod config;
pub mod harness;
pub mod run;
pub mod snapshot;
