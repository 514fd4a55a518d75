//! File formats, parallel sweeps and the command-line front end for
//! `ncqbv-core`.

pub mod cli;
pub mod error;
pub mod output;
pub mod parallel;
pub mod scenario_file;

pub use error::CliError;
pub use scenario_file::ScenarioFile;
