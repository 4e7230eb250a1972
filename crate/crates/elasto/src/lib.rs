//! Configuration files, CSV artifacts and the command line for the
//! experiments in `elasto-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;

pub use error::{AppError, AppResult};
