//! File formats, the preprocessing and training pipeline, and the
//! command-line front end built on `swarmnet-core`.

pub mod cli;
pub mod csv_io;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod report;

pub use error::{IoError, Result};
