//! Command line front end for the `infobound` library.
//!
//! The binary exposes four commands — `verify-examples`, `check`,
//! `search`, and `jarzynski` — each of which prints one JSON report on
//! stdout and communicates its outcome through a stable exit code. The
//! library surface exists so tests can drive commands in process and
//! reuse the document types; see [`docs`] for the accepted JSON shapes
//! and [`run`] for the dispatch entry point.

mod commands;
pub mod docs;
pub mod report;

pub use commands::{run, run_with};
