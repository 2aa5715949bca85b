//! File formats, experiment harness and command line for `tcycle-core`.

pub mod cli;
pub mod experiment;
pub mod io;
