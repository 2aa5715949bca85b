//! Threshold-based cycle-freeness detection on a simulated CONGEST network.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs and a 64-bit seed; file formats, the CLI and the
//! experiment harness live in the `tcycle` crate.
//!
//! Layout:
//!
//! * [`graph`], [`generators`], [`oracle`]: graphs, benign instance
//!   generators and the brute-force cycle oracle.
//! * [`sim`]: the round-synchronous engine and round-cost accounting.
//! * [`coloring`]: color assignments, threshold tables and color-BFS.
//! * [`detectors`]: the decision procedures.
//! * [`adversarial`]: the lower-bound instance families.
//! * [`analysis`]: path packings, bad sets and congestion statistics.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod adversarial;
pub mod analysis;
pub mod coloring;
pub mod detectors;
pub mod error;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod rng;
pub mod sim;
pub mod stats;

pub use error::Error;
pub use graph::{Cycle, Graph, NodeClass, NodeId};
