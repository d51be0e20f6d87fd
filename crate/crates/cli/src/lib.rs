//! Configuration and subcommand implementations behind the `itsdeal` binary.

pub mod commands;
pub mod config;
