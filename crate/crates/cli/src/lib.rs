//! Library side of the `dynvis` command: scenario parsing, replay,
//! benchmarking and SVG rendering.

pub mod bench;
pub mod error;
pub mod render;
pub mod run;
pub mod scenario;

pub use error::CliError;
pub use run::{run, Mode, Report, Verdict};
pub use scenario::{Event, Scenario};
