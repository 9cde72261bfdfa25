//! Scenario runner for prequantum holonomy computations.
//!
//! A [`Scenario`] is read from JSON, executed by [`run`], and written out as
//! `results.json` (and `phases.csv` for parameter sweeps).

pub mod config;
pub mod error;
pub mod output;
pub mod record;
pub mod registry;
pub mod runner;
pub mod suite;

pub use config::{BasePoints, FamilySpec, Format, HamiltonianSpec, Scenario, Task, Tolerances};
pub use error::{CliError, ErrorRecord};
pub use output::write_outputs;
pub use record::{ResultRecord, SuiteEntry};
pub use runner::run;
pub use suite::verify_suite;
