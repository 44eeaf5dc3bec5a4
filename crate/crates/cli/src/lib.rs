//! Problem files, reports and the scenario gallery behind the `phiconv`
//! binary.

pub mod commands;
pub mod error;
pub mod gallery;
pub mod problem;
pub mod report;

pub use commands::{run, Options, Task};
pub use error::CliError;
pub use problem::{Problem, ProblemFile};
pub use report::{Check, Report};
