//! Command-line plumbing around the `cuplength` library: input loaders, the
//! JSON schema, SVG rendering and the job runner behind the `cuplength`
//! binary.

pub mod io;
pub mod job;
pub mod json;
pub mod plot;

pub use job::{execute, run, Command, Format, JobConfig, JobError, Report};
