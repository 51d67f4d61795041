//! Scenario files, the suite runner and report rendering behind `gcsv`.

pub mod render;
pub mod runner;
pub mod scenario;

pub use runner::{run, RunReport};
pub use scenario::{InputError, Resolved, Scenario, Suite};

/// Exit status for invalid input.
pub const EXIT_INVALID: i32 = 2;
