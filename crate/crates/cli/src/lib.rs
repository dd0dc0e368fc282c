//! Command-line companion to the `rydcav` simulation library: parameter-file
//! ingestion, reference-detuning location, detuning sweeps, delayed
//! correlation traces, model comparisons, and CSV + SVG emission.
//!
//! The binary (`rydcav`) is a thin shell over this crate; everything it does
//! is callable as a library function, which is how the integration tests
//! drive it.

pub mod config;
pub mod csvio;
pub mod run;
pub mod svg;

/// Process exit codes of the `rydcav` binary.
pub mod exit {
    /// Everything succeeded.
    pub const SUCCESS: i32 = 0;
    /// Bad invocation, parameter file, or parameter values.
    pub const CONFIG: i32 = 1;
    /// A solver or search failed to converge or broke down.
    pub const NUMERICAL: i32 = 2;
    /// The sweep finished but one or more points failed (their rows carry
    /// the failure text).
    pub const PARTIAL: i32 = 3;
}
