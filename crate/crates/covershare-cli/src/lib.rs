//! File formats and the benchmark pipeline behind the `covershare` binary.
//!
//! The core crate is IO-free; everything that touches disk lives here: the
//! shared instance JSON format, share vectors, trace and cut-log dumps,
//! core-audit reports, and the benchmark CSV.

pub mod bench;
pub mod format;
