//! File formats, configuration, reports and the stage driver around
//! [`commchar_core`].

pub mod config;
mod error;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod sample;

pub use config::{PipelineConfig, Stage};
pub use error::{Error, Result};
