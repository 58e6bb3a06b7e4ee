//! Library side of the `polydist` command: problem files and subcommands.

pub mod commands;
pub mod error;
pub mod file;
