//! File formats, presets and parallel drivers for the `corr-ldpc` tool.

pub mod ensemble;
pub mod formats;
pub mod parallel;

pub use ensemble::{Ensemble, Preset};
