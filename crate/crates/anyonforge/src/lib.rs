//! File formats, symbol-table persistence, threaded search and the
//! command-line front end for `anyonforge-core`.

pub mod cache;
pub mod cli;
pub mod error;
pub mod export;
pub mod files;
pub mod json;
pub mod parallel;

pub use error::{Error, Result};
