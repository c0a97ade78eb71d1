//! Library surface of the scenario runner: configuration parsing, sweep
//! execution, CSV emission, agreement reporting and the identity
//! self-test. The `hoplab` binary is a thin wrapper over these modules.

pub mod config;
pub mod report;
pub mod runner;
pub mod selftest;
