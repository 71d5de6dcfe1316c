//! Library half of the `bethesep` command line tool: configuration parsing,
//! the analysis pipeline and report rendering.

pub mod analysis;
pub mod config;
pub mod summary;

/// Exit status when a run finished with a verdict or a passing check.
pub const EXIT_OK: u8 = 0;
/// Exit status for configuration or computation errors.
pub const EXIT_ERROR: u8 = 1;
/// Exit status for an inconclusive verdict or a check above tolerance.
pub const EXIT_INCONCLUSIVE: u8 = 2;
