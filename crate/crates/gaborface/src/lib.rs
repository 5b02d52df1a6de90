//! Files, plots and the batch study pipeline around [`gaborface_core`].
//!
//! - [`pgm`]: 8-bit binary PGM images.
//! - [`formats`]: JSON and CSV documents for grids, jets, ratings, matrices,
//!   correlations and configurations.
//! - [`svg`]: scatter plots of 2-D configurations.
//! - [`pipeline`]: the staged study runner used by the `gaborface` binary.
//! - [`synth`]: synthetic studies for testing and demos.

pub mod error;
pub mod formats;
pub mod fsutil;
pub mod pgm;
pub mod pipeline;
pub mod svg;
pub mod synth;

pub use error::{Error, Result};
pub use gaborface_core as core;
pub use pipeline::{load_study_config, run, Stage, StudyConfig, StudyOptions};
