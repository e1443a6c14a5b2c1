//! Library surface of the `fsojitter` command-line tool; the binary in
//! `main.rs` is a thin argument-parsing layer over [`commands`].

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod fixtures;
pub mod report;
