//! Command-line front end: set specs, verification suites and reports.

pub mod commands;
pub mod config;
pub mod report;
pub mod setspec;
pub mod suites;
