//! Harness library behind the `dwol` binary: configuration, orchestration,
//! reports and verification suites. Kept as a library so the integration
//! tests drive exactly the code the CLI runs.

pub mod config;
pub mod report;
pub mod run;
pub mod sweep;
pub mod units;
pub mod verify;
