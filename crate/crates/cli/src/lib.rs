//! Scenario language and batch runner for the forcing workbench.

pub mod error;
pub mod load;
pub mod report;
pub mod run;
pub mod scenario;
pub mod sexpr;

use std::path::Path;

pub use error::{CliError, DslError};
pub use load::{load, Flags, Loaded};
pub use report::{Record, Report, Verdict};
pub use run::run;
pub use scenario::{parse, serialize, Scenario};

/// Reads, parses and loads a scenario file; errors name the file.
pub fn load_file(path: &Path, flags: &Flags) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let scenario = parse(&text)?;
    Ok(load(&scenario, flags)?)
}

/// Checks suite filter names before any work is done.
pub fn validate_suite_filter(flags: &Flags) -> Result<(), CliError> {
    match flags.suites.iter().find(|s| load::suite_name(s).is_none()) {
        Some(s) => Err(CliError::UnknownSuite(s.clone())),
        None => Ok(()),
    }
}
