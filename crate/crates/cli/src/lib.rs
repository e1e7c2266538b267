//! Document formats, DOT rendering and subcommands behind the `ucat` binary.

pub mod commands;
pub mod document;
pub mod locate;
pub mod render;
