//! Configuration, run directories and the studies driven by the `ibnls`
//! command line.

pub mod config;
pub mod error;
pub mod manifest;
pub mod report;
pub mod run;
pub mod studies;

pub use config::{load_config, RunConfig, Study};
pub use error::LabError;
pub use manifest::{read_manifest, RunManifest, Verdict};
pub use studies::{run_study, RunOptions};
