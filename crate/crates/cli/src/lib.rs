//! Library surface of the workbench CLI, exposed so integration tests can
//! drive the pipelines without spawning processes.

pub mod config;
pub mod report;
pub mod run;
