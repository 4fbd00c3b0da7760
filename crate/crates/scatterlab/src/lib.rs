//! Configuration, orchestration and report emitters for `scatterlab-core`.

// `!(x > 0.0)` style guards also reject NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod config;
pub mod error;
pub mod run;

pub use config::RunConfig;
pub use error::AppError;
pub use run::{run, RunOutput, RunReport};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SCATTERLAB_THREADS";

/// Parses the thread count setting; `None` means the hardware default.
pub fn threads_from_env(value: Option<&str>) -> Result<Option<usize>, AppError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(AppError::Config(format!(
                "{THREADS_ENV}: expected a positive integer, got {v:?}"
            ))),
        },
    }
}
